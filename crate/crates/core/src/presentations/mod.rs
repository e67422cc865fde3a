//! Group presentations: the Fractional Fibonacci family and its relatives,
//! parameter normalisation, and a small text format.

mod dsl;

use std::fmt;

use thiserror::Error;

pub use dsl::{parse_presentation, ParseError, ParseErrorKind};

use crate::invariants::IntMatrix;
use crate::words::{free_reduce, FreeWord, Syllable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("n must be at least 1")]
    ZeroN,
    #[error("parameter {name} must be nonzero")]
    ZeroParameter { name: &'static str },
    #[error("parameters must be normalised to k, l >= 1 (got k={k}, l={l})")]
    NotNormalized { k: i64, l: i64 },
    #[error("the shift extension is only defined for omega = 0")]
    ShiftExtensionWithOmega,
    #[error("relator {index} is empty after free reduction")]
    EmptyRelator { index: usize },
    #[error("relator {index} uses generator {gen} but the rank is {rank}")]
    GeneratorOutOfRange { index: usize, gen: usize, rank: usize },
    #[error("{given} generator names supplied for rank {rank}")]
    NameCount { given: usize, rank: usize },
    #[error("m must be at least 2")]
    QuaternionOrder,
}

/// Parameters of `F^{k/l}(n; omega)`; `omega = 0` means no power relators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct FibParams {
    pub n: usize,
    pub k: i64,
    pub l: i64,
    #[serde(default)]
    pub omega: u64,
}

impl FibParams {
    pub fn new(n: usize, k: i64, l: i64, omega: u64) -> Result<Self, PresentationError> {
        let p = FibParams { n, k, l, omega };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with signs of `k` and `l` normalised away.
    pub fn normalized(n: usize, k: i64, l: i64, omega: u64) -> Result<Self, PresentationError> {
        let (k, l) = normalize_params(k, l)?;
        FibParams::new(n, k, l, omega)
    }

    pub fn validate(&self) -> Result<(), PresentationError> {
        if self.n == 0 {
            return Err(PresentationError::ZeroN);
        }
        if self.k == 0 {
            return Err(PresentationError::ZeroParameter { name: "k" });
        }
        if self.l == 0 {
            return Err(PresentationError::ZeroParameter { name: "l" });
        }
        Ok(())
    }

    fn require_normalized(&self) -> Result<(), PresentationError> {
        self.validate()?;
        if self.k < 1 || self.l < 1 {
            return Err(PresentationError::NotNormalized { k: self.k, l: self.l });
        }
        Ok(())
    }

    /// The defining relator `x_0^l x_1^k x_2^{-l}` (reduced mod n).
    pub fn base_relator(&self) -> FreeWord {
        fractional_relator(self.n, self.k, self.l, 0)
    }
}

impl fmt::Display for FibParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.omega == 0 {
            write!(f, "F^{{{}/{}}}({})", self.k, self.l, self.n)
        } else {
            write!(f, "F^{{{}/{}}}({};{})", self.k, self.l, self.n, self.omega)
        }
    }
}

/// Drops the signs of `k` and `l`: all four sign choices give isomorphic groups.
pub fn normalize_params(k: i64, l: i64) -> Result<(i64, i64), PresentationError> {
    if k == 0 {
        return Err(PresentationError::ZeroParameter { name: "k" });
    }
    if l == 0 {
        return Err(PresentationError::ZeroParameter { name: "l" });
    }
    Ok((k.abs(), l.abs()))
}

fn fractional_relator(n: usize, k: i64, l: i64, i: usize) -> FreeWord {
    free_reduce([
        Syllable::new(i % n, l),
        Syllable::new((i + 1) % n, k),
        Syllable::new((i + 2) % n, -l),
    ])
}

/// A finite presentation: generator names and a list of reduced, nonempty relators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<FreeWord>,
}

impl Presentation {
    /// Builds a presentation on `x0 .. x{rank-1}`.
    pub fn new(rank: usize, relators: Vec<FreeWord>) -> Result<Self, PresentationError> {
        Presentation::with_names((0..rank).map(|i| format!("x{i}")).collect(), relators)
    }

    pub fn with_names(
        names: Vec<String>,
        relators: Vec<FreeWord>,
    ) -> Result<Self, PresentationError> {
        let rank = names.len();
        for (index, r) in relators.iter().enumerate() {
            if r.is_identity() {
                return Err(PresentationError::EmptyRelator { index });
            }
            if let Some(gen) = r.max_gen() {
                if gen >= rank {
                    return Err(PresentationError::GeneratorOutOfRange { index, gen, rank });
                }
            }
        }
        Ok(Presentation { names, relators })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    /// The same presentation with extra relators appended; identity words are skipped.
    pub fn with_extra_relators(&self, extra: &[FreeWord]) -> Result<Self, PresentationError> {
        let mut relators = self.relators.clone();
        relators.extend(extra.iter().filter(|w| !w.is_identity()).cloned());
        Presentation::with_names(self.names.clone(), relators)
    }

    /// One row per relator, one column per generator, entries are exponent sums.
    pub fn relation_matrix(&self) -> IntMatrix {
        let rank = self.rank();
        let mut m = IntMatrix::zeros(self.relators.len(), rank);
        for (i, r) in self.relators.iter().enumerate() {
            for s in r.syllables() {
                *m.get_mut(i, s.gen) += s.exp;
            }
        }
        m
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} |", self.names.join(", "))?;
        for (i, r) in self.relators.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {}", r.display_with(&self.names))?;
        }
        write!(f, " >")
    }
}

/// `F^{k/l}(n; omega)`: relators `x_i^l x_{i+1}^k x_{i+2}^{-l}` for `0 <= i < n`,
/// plus `x_i^omega` when `omega >= 1`.
pub fn build_fractional(p: &FibParams) -> Result<Presentation, PresentationError> {
    p.require_normalized()?;
    let n = p.n;
    let mut relators: Vec<FreeWord> = (0..n).map(|i| fractional_relator(n, p.k, p.l, i)).collect();
    if p.omega >= 1 {
        let omega = i64::try_from(p.omega).expect("omega fits in i64");
        relators.extend((0..n).map(|i| FreeWord::power(i, omega)));
    }
    Presentation::new(n, relators)
}

/// The shift extension `< x, t | t^n, x^l t x^k t x^{-l} t^{-2} >`.
pub fn build_shift_extension(p: &FibParams) -> Result<Presentation, PresentationError> {
    p.require_normalized()?;
    if p.omega != 0 {
        return Err(PresentationError::ShiftExtensionWithOmega);
    }
    let (x, t) = (0, 1);
    let n = i64::try_from(p.n).expect("n fits in i64");
    let relators = vec![
        FreeWord::power(t, n),
        free_reduce([
            Syllable::new(x, p.l),
            Syllable::new(t, 1),
            Syllable::new(x, p.k),
            Syllable::new(t, 1),
            Syllable::new(x, -p.l),
            Syllable::new(t, -2),
        ]),
    ];
    Presentation::with_names(vec!["x".into(), "t".into()], relators)
}

/// `G(n, l) = < x_0..x_{n-1} | x_i^l = x_{i+1}^l >`. For `n = 1` the relator
/// collapses and the presentation has none.
pub fn build_gnl(n: usize, l: i64) -> Result<Presentation, PresentationError> {
    if n == 0 {
        return Err(PresentationError::ZeroN);
    }
    if l < 1 {
        return Err(PresentationError::NotNormalized { k: 1, l });
    }
    let relators = (0..n)
        .map(|i| free_reduce([Syllable::new(i, l), Syllable::new((i + 1) % n, -l)]))
        .filter(|w| !w.is_identity())
        .collect();
    Presentation::new(n, relators)
}

/// The generalised quaternion group `Q_{4m} = < x, y | x^2 = (xy)^2 = y^m >`.
pub fn build_quaternion(m: i64) -> Result<Presentation, PresentationError> {
    if m < 2 {
        return Err(PresentationError::QuaternionOrder);
    }
    let (x, y) = (0, 1);
    let relators = vec![
        free_reduce([Syllable::new(x, 2), Syllable::new(y, -m)]),
        free_reduce([
            Syllable::new(x, 1),
            Syllable::new(y, 1),
            Syllable::new(x, 1),
            Syllable::new(y, 1),
            Syllable::new(y, -m),
        ]),
    ];
    Presentation::with_names(vec!["x".into(), "y".into()], relators)
}
