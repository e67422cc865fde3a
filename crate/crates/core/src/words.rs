//! Free-group words over generators `x0, x1, ...`, stored run-length encoded.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {gen} out of range for {rank} generators")]
    IndexOutOfRange { gen: usize, rank: usize },
    #[error("cannot parse word at column {column}: {message}")]
    Parse { column: usize, message: String },
}

/// A generator raised to a nonzero power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub gen: usize,
    pub exp: i64,
}

impl Syllable {
    pub fn new(gen: usize, exp: i64) -> Self {
        Syllable { gen, exp }
    }
}

/// A single letter `x_gen^{±1}`, the unit in which positions are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub positive: bool,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            positive: !self.positive,
        }
    }
}

/// A freely reduced word. Adjacent syllables always have distinct generators
/// and no syllable has exponent zero; the empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    syllables: Vec<Syllable>,
}

fn add_exp(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("exponent overflow in free reduction")
}

/// Freely reduces an arbitrary list of syllables.
pub fn free_reduce<I: IntoIterator<Item = Syllable>>(raw: I) -> FreeWord {
    let mut out: Vec<Syllable> = Vec::new();
    for s in raw {
        if s.exp == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.gen == s.gen => {
                let e = add_exp(last.exp, s.exp);
                if e == 0 {
                    out.pop();
                } else {
                    last.exp = e;
                }
            }
            _ => out.push(s),
        }
    }
    FreeWord { syllables: out }
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    /// `x_gen^exp`.
    pub fn power(gen: usize, exp: i64) -> Self {
        free_reduce([Syllable::new(gen, exp)])
    }

    pub fn generator(gen: usize) -> Self {
        FreeWord::power(gen, 1)
    }

    pub fn from_syllables<I: IntoIterator<Item = Syllable>>(raw: I) -> Self {
        free_reduce(raw)
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        free_reduce(
            letters
                .into_iter()
                .map(|l| Syllable::new(l.gen, if l.positive { 1 } else { -1 })),
        )
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Length in letters (sum of absolute exponents).
    pub fn letter_len(&self) -> u64 {
        self.syllables.iter().map(|s| s.exp.unsigned_abs()).sum()
    }

    /// Iterates the word one letter at a time.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.syllables.iter().flat_map(|s| {
            let letter = Letter {
                gen: s.gen,
                positive: s.exp > 0,
            };
            std::iter::repeat(letter).take(s.exp.unsigned_abs() as usize)
        })
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        free_reduce(self.syllables.iter().chain(other.syllables.iter()).copied())
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable::new(s.gen, -s.exp))
                .collect(),
        }
    }

    /// `self^m` for any integer `m`.
    pub fn pow(&self, m: i64) -> FreeWord {
        let base = if m < 0 { self.inverse() } else { self.clone() };
        let reps = m.unsigned_abs();
        free_reduce(
            (0..reps).flat_map(|_| base.syllables.iter().copied()).collect::<Vec<_>>(),
        )
    }

    /// Replaces every generator index `i` by `(i + s) mod rank`.
    pub fn shift(&self, s: i64, rank: usize) -> Result<FreeWord, WordError> {
        if let Some(gen) = self.max_gen() {
            if gen >= rank {
                return Err(WordError::IndexOutOfRange { gen, rank });
            }
        }
        let r = rank as i64;
        Ok(free_reduce(self.syllables.iter().map(|syl| {
            let g = (syl.gen as i64 + s).rem_euclid(r) as usize;
            Syllable::new(g, syl.exp)
        })))
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.syllables.iter().map(|s| s.gen).max()
    }

    /// Net exponent of `gen` in the word.
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.syllables
            .iter()
            .filter(|s| s.gen == gen)
            .map(|s| s.exp)
            .sum()
    }

    /// Splits after the first `pos` letters. Returns `None` when `pos` exceeds the length.
    pub fn split_at_letter(&self, pos: u64) -> Option<(FreeWord, FreeWord)> {
        if pos > self.letter_len() {
            return None;
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut remaining = pos;
        for s in &self.syllables {
            let len = s.exp.unsigned_abs();
            if remaining >= len {
                left.push(*s);
                remaining -= len;
            } else if remaining == 0 {
                right.push(*s);
            } else {
                let sign = s.exp.signum();
                left.push(Syllable::new(s.gen, sign * remaining as i64));
                right.push(Syllable::new(s.gen, sign * (len - remaining) as i64));
                remaining = 0;
            }
        }
        Some((FreeWord { syllables: left }, FreeWord { syllables: right }))
    }

    /// Renders the word with a custom generator naming.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        NamedWord { word: self, names }
    }
}

/// `[a, b] = a^-1 b^-1 a b`.
pub fn commutator(a: &FreeWord, b: &FreeWord) -> FreeWord {
    free_reduce(
        a.inverse()
            .syllables
            .iter()
            .chain(b.inverse().syllables.iter())
            .chain(a.syllables.iter())
            .chain(b.syllables.iter())
            .copied()
            .collect::<Vec<_>>(),
    )
}

/// `x_0^k x_1^k ... x_{n-1}^k`, the torsion candidate of the odd-`n` families.
pub fn cyclic_product(n: usize, k: i64) -> FreeWord {
    free_reduce((0..n).map(|i| Syllable::new(i, k)))
}

struct NamedWord<'a> {
    word: &'a FreeWord,
    names: &'a [String],
}

impl fmt::Display for NamedWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, self.word, |g| {
            self.names.get(g).cloned().unwrap_or_else(|| format!("x{g}"))
        })
    }
}

fn write_word(
    f: &mut fmt::Formatter<'_>,
    w: &FreeWord,
    name: impl Fn(usize) -> String,
) -> fmt::Result {
    if w.is_identity() {
        return write!(f, "1");
    }
    for (i, s) in w.syllables.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        if s.exp == 1 {
            write!(f, "{}", name(s.gen))?;
        } else {
            write!(f, "{}^{}", name(s.gen), s.exp)?;
        }
    }
    Ok(())
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, self, |g| format!("x{g}"))
    }
}

/// Parses `x0^2 x1^-1 x2`. `1` or the empty string is the identity.
impl FromStr for FreeWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut raw = Vec::new();
        let mut offset = 0;
        for token in s.split_whitespace() {
            let column = s[offset..].find(token).map(|i| i + offset + 1).unwrap_or(1);
            offset = column - 1 + token.len();
            if token == "1" {
                continue;
            }
            raw.push(parse_syllable(token).map_err(|message| WordError::Parse { column, message })?);
        }
        Ok(free_reduce(raw))
    }
}

fn parse_syllable(token: &str) -> Result<Syllable, String> {
    let (base, exp) = match token.split_once('^') {
        Some((b, e)) => (
            b,
            e.parse::<i64>()
                .map_err(|_| format!("bad exponent `{e}`"))?,
        ),
        None => (token, 1),
    };
    let digits = base
        .strip_prefix('x')
        .ok_or_else(|| format!("expected generator `x<index>`, found `{base}`"))?;
    let gen = digits
        .parse::<usize>()
        .map_err(|_| format!("bad generator index `{digits}`"))?;
    Ok(Syllable::new(gen, exp))
}

impl Serialize for FreeWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
