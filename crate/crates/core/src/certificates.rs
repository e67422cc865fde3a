//! Checkable proofs that words are trivial in `F^{k/l}(n)`.
//!
//! A certificate is a start word and a list of moves. Each move inserts a
//! conjugate `c^-1 r^{±1} c` of a shifted defining relator
//! `r = x_s^l x_{s+1}^k x_{s+2}^-l` at a letter position and freely reduces.
//! Such a move never changes the group element, so a certificate whose moves
//! end at the empty word proves its start word is trivial.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentations::FibParams;
use crate::words::{commutator, cyclic_product, free_reduce, FreeWord, Syllable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("n must be odd and at least 3, got {0}")]
    EvenOrSmallN(usize),
    #[error("k and l must be positive")]
    NonPositive,
    #[error("insertion position {pos} exceeds word length {len}")]
    Position { pos: u64, len: u64 },
    #[error("conjugator uses generator {gen} but the family has n = {n}")]
    Conjugator { gen: usize, n: usize },
    #[error("family has n = 0")]
    ZeroN,
}

/// The relator family `x_i^l x_{i+1}^k x_{i+2}^-l`, indices mod `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    pub n: usize,
    pub k: i64,
    pub l: i64,
}

impl Family {
    pub fn relator(&self, shift: i64) -> FreeWord {
        let n = self.n as i64;
        let g = |i: i64| (shift + i).rem_euclid(n) as usize;
        free_reduce([
            Syllable::new(g(0), self.l),
            Syllable::new(g(1), self.k),
            Syllable::new(g(2), -self.l),
        ])
    }
}

impl From<&FibParams> for Family {
    fn from(p: &FibParams) -> Self {
        Family {
            n: p.n,
            k: p.k,
            l: p.l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    /// Insertion point, in letters.
    pub pos: u64,
    pub shift: i64,
    pub inverted: bool,
    pub conjugator: FreeWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Certificate {
    pub family: Family,
    pub start: FreeWord,
    pub moves: Vec<Move>,
}

/// Inserts `m.conjugator^-1 r^{±1} m.conjugator` at `m.pos` and reduces.
pub fn apply_move(current: &FreeWord, m: &Move, family: &Family) -> Result<FreeWord, CertificateError> {
    if family.n == 0 {
        return Err(CertificateError::ZeroN);
    }
    if let Some(gen) = m.conjugator.max_gen() {
        if gen >= family.n {
            return Err(CertificateError::Conjugator { gen, n: family.n });
        }
    }
    let (left, right) = current
        .split_at_letter(m.pos)
        .ok_or(CertificateError::Position {
            pos: m.pos,
            len: current.letter_len(),
        })?;
    let r = family.relator(m.shift);
    let r = if m.inverted { r.inverse() } else { r };
    let c = &m.conjugator;
    Ok(free_reduce(
        [&left, &c.inverse(), &r, c, &right]
            .into_iter()
            .flat_map(|w| w.syllables().iter().copied())
            .collect::<Vec<_>>(),
    ))
}

/// Result of replaying a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub valid: bool,
    /// Index of the move that could not be applied.
    pub failed_move: Option<usize>,
    pub error: Option<String>,
    /// Word reached after the last applied move.
    pub residue: FreeWord,
}

pub fn check_certificate(c: &Certificate) -> CheckReport {
    let mut current = c.start.clone();
    for (i, m) in c.moves.iter().enumerate() {
        match apply_move(&current, m, &c.family) {
            Ok(next) => current = next,
            Err(e) => {
                return CheckReport {
                    valid: false,
                    failed_move: Some(i),
                    error: Some(e.to_string()),
                    residue: current,
                }
            }
        }
    }
    CheckReport {
        valid: current.is_identity(),
        failed_move: None,
        error: None,
        residue: current,
    }
}

impl Certificate {
    /// The image under `x_i -> x_{i+s}`, a certificate for the shifted start word.
    pub fn shifted(&self, s: i64) -> Certificate {
        let n = self.family.n;
        Certificate {
            family: self.family,
            start: self.start.shift(s, n).expect("start word within rank"),
            moves: self
                .moves
                .iter()
                .map(|m| Move {
                    pos: m.pos,
                    shift: (m.shift + s).rem_euclid(n as i64),
                    inverted: m.inverted,
                    conjugator: m.conjugator.shift(s, n).expect("conjugator within rank"),
                })
                .collect(),
        }
    }
}

/// Builds moves while tracking the current word as an unreduced syllable list.
struct Builder {
    family: Family,
    raw: Vec<Syllable>,
    word: FreeWord,
    moves: Vec<Move>,
}

impl Builder {
    fn new(family: Family, start: FreeWord) -> Self {
        Builder {
            family,
            raw: start.syllables().to_vec(),
            word: start,
            moves: Vec::new(),
        }
    }

    /// Replaces the raw list by another with the same free reduction.
    fn regroup(&mut self, raw: Vec<Syllable>) {
        debug_assert_eq!(free_reduce(raw.clone()), self.word);
        self.raw = raw;
    }

    /// Rewrites `raw[at..at + len]` (the word `u`) as `v`, where `v u^-1` is a
    /// conjugate of relator `shift` or its inverse.
    fn rewrite(&mut self, at: usize, len: usize, v: &[Syllable], shift: i64) {
        let a = free_reduce(self.raw[..at].to_vec());
        let u = free_reduce(self.raw[at..at + len].to_vec());
        let v_word = free_reduce(v.to_vec());
        let d = v_word.concat(&u.inverse());
        let (inverted, e) = self
            .conjugate_form(&d, shift)
            .expect("rewrite step is a relator consequence");

        // A v B = (A d A^-1) W; insert after the prefix A shares with W.
        let shared = common_prefix_letters(&self.word, &a);
        let (p, _) = self.word.split_at_letter(shared).expect("prefix of word");
        let conjugator = e.concat(&a.inverse()).concat(&p);
        let m = Move {
            pos: shared,
            shift: shift.rem_euclid(self.family.n as i64),
            inverted,
            conjugator,
        };
        self.word = apply_move(&self.word, &m, &self.family).expect("generated move is well formed");
        self.moves.push(m);
        self.raw.splice(at..at + len, v.iter().copied());
        debug_assert_eq!(free_reduce(self.raw.clone()), self.word);
    }

    /// Finds `(inverted, e)` with `d = e^-1 r^{±1} e`, `e` a prefix of `r^{±1}`.
    fn conjugate_form(&self, d: &FreeWord, shift: i64) -> Option<(bool, FreeWord)> {
        for inverted in [false, true] {
            let r = self.family.relator(shift);
            let r = if inverted { r.inverse() } else { r };
            for t in 0..=r.letter_len() {
                let (e, rest) = r.split_at_letter(t)?;
                if &rest.concat(&e) == d {
                    return Some((inverted, e));
                }
            }
        }
        None
    }

    fn finish(self, start: FreeWord) -> Certificate {
        debug_assert!(self.word.is_identity());
        Certificate {
            family: self.family,
            start,
            moves: self.moves,
        }
    }
}

fn common_prefix_letters(a: &FreeWord, b: &FreeWord) -> u64 {
    a.letters()
        .zip(b.letters())
        .take_while(|(x, y)| x == y)
        .count() as u64
}

fn check_family(n: usize, k: i64, l: i64) -> Result<Family, CertificateError> {
    if n < 3 || n % 2 == 0 {
        return Err(CertificateError::EvenOrSmallN(n));
    }
    if k < 1 || l < 1 {
        return Err(CertificateError::NonPositive);
    }
    Ok(Family { n, k, l })
}

fn syl(n: usize, i: i64, exp: i64) -> Syllable {
    Syllable::new(i.rem_euclid(n as i64) as usize, exp)
}

/// Rewrites the run `x_0^k x_2^k ... x_{2(count-1)}^k` occupying
/// `raw[first..]` with `x_{2m}^k = x_{2m-1}^-l x_{2m+1}^l`, right to left.
fn telescope_even_run(b: &mut Builder, first: usize, count: usize) {
    let Family { n, k: _, l } = b.family;
    for m in (0..count).rev() {
        let i = 2 * m as i64 - 1;
        b.rewrite(first + m, 1, &[syl(n, i, -l), syl(n, i + 2, l)], i);
    }
}

/// Certificate that `w(n,k)^2 = 1` in `F^{k/l}(n)`.
pub fn gen_square_cert(n: usize, k: i64, l: i64) -> Result<Certificate, CertificateError> {
    let family = check_family(n, k, l)?;
    let w = cyclic_product(n, k);
    let start = w.concat(&w);
    let mut b = Builder::new(family, start.clone());

    // Pair the 2n syllables as (x_j^k x_{j+1}^k), j = 2m, and rewrite each
    // x_{j+1}^k as x_j^-l x_{j+2}^l.
    for m in 0..n {
        let j = 2 * m as i64;
        b.rewrite(2 * m + 1 + m, 1, &[syl(n, j, -l), syl(n, j + 2, l)], j);
    }
    // The product telescopes to x_0^-l (x_0^k x_2^k ... x_{2n-2}^k) x_0^l.
    let mut raw = vec![syl(n, 0, -l)];
    raw.extend((0..n).map(|m| syl(n, 2 * m as i64, k)));
    raw.push(syl(n, 0, l));
    b.regroup(raw);
    telescope_even_run(&mut b, 1, n);
    Ok(b.finish(start))
}

/// Certificate that `w(n,k) [x_0^l, x_{n-1}^l]^-1 = 1` in `F^{k/l}(n)`.
pub fn gen_commutator_cert(n: usize, k: i64, l: i64) -> Result<Certificate, CertificateError> {
    let family = check_family(n, k, l)?;
    let a = FreeWord::power(0, l);
    let c = FreeWord::power(n - 1, l);
    let tail = commutator(&a, &c).inverse();
    let start = cyclic_product(n, k).concat(&tail);
    let mut b = Builder::new(family, start.clone());
    let tail_raw = tail.syllables().to_vec();

    // x_0^-l x_0^k x_2^k ... x_{2t}^k (x_{2t}^l x_{2t+1}^k) x_{2t+2}^k ... x_{n-1}^k,
    // then x_{2t}^l x_{2t+1}^k = x_{2t+2}^l.
    for t in 0..=(n - 3) / 2 {
        let mut raw = vec![syl(n, 0, -l)];
        raw.extend((0..=t).map(|s| syl(n, 2 * s as i64, k)));
        raw.push(syl(n, 2 * t as i64, l));
        raw.push(syl(n, 2 * t as i64 + 1, k));
        raw.extend((2 * t + 2..n).map(|j| syl(n, j as i64, k)));
        raw.extend(tail_raw.iter().copied());
        b.regroup(raw);
        let j = 2 * t as i64;
        b.rewrite(t + 2, 2, &[syl(n, j + 2, l)], j);
    }
    // x_0^-l (x_0^k x_2^k ... x_{n-1}^k) x_{n-1}^l, and the even run telescopes
    // to x_{n-1}^-l x_0^l.
    let evens = (n + 1) / 2;
    let mut raw = vec![syl(n, 0, -l)];
    raw.extend((0..evens).map(|s| syl(n, 2 * s as i64, k)));
    raw.push(syl(n, n as i64 - 1, l));
    raw.extend(tail_raw.iter().copied());
    b.regroup(raw);
    telescope_even_run(&mut b, 1, evens);
    Ok(b.finish(start))
}
