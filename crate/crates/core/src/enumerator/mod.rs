//! Coset enumeration, low-index subgroup search and abelianised
//! Reidemeister–Schreier rewriting.
//!
//! Columns of a coset table are indexed by letters: `x_g` is column `2g` and
//! `x_g^-1` is column `2g + 1`. Coset `0` is the subgroup coset; JSON exports
//! and user-facing output number cosets from `1`.

mod low_index;
mod schreier;
mod todd_coxeter;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentations::Presentation;
use crate::words::{FreeWord, Letter};

pub use low_index::{low_index_subgroups, low_index_subgroups_with};
pub use schreier::subgroup_abelianization;
pub use todd_coxeter::{enumerate, quotient_order};

pub const DEFAULT_MAX_COSETS: usize = 2_000_000;

/// Longest relator (in letters) the enumerator will expand.
pub const MAX_RELATOR_LETTERS: u64 = 1_000_000;

pub(crate) const UNDEF: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("subgroup word uses generator {gen} but the presentation has rank {rank}")]
    SubgroupGenerator { gen: usize, rank: usize },
    #[error("word of {letters} letters exceeds the expansion limit of {MAX_RELATOR_LETTERS}")]
    WordTooLong { letters: u64 },
    #[error(transparent)]
    Presentation(#[from] crate::presentations::PresentationError),
    #[error("coset table is incomplete")]
    Incomplete,
    #[error("coset table has {cosets} cosets but {rank} generators cannot index {cols} columns")]
    Shape { cosets: usize, rank: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Hasselgrove–Leech–Trotter with lookahead.
    #[default]
    Hlt,
    Felsch,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hlt" => Ok(Strategy::Hlt),
            "felsch" => Ok(Strategy::Felsch),
            other => Err(format!("unknown strategy `{other}` (expected hlt or felsch)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumOutcome {
    Complete(CosetTable),
    Overflow { max_cosets: usize },
}

impl EnumOutcome {
    pub fn table(&self) -> Option<&CosetTable> {
        match self {
            EnumOutcome::Complete(t) => Some(t),
            EnumOutcome::Overflow { .. } => None,
        }
    }

    pub fn into_table(self) -> Option<CosetTable> {
        match self {
            EnumOutcome::Complete(t) => Some(t),
            EnumOutcome::Overflow { .. } => None,
        }
    }

    /// Index of the subgroup (group order for the trivial subgroup).
    pub fn order(&self) -> Option<usize> {
        self.table().map(CosetTable::num_cosets)
    }
}

/// Action of the generators and their inverses on cosets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CosetTable {
    rank: usize,
    num_cosets: usize,
    entries: Vec<u32>,
    complete: bool,
    subgroup: Vec<FreeWord>,
}

pub(crate) fn column(l: Letter) -> usize {
    2 * l.gen + usize::from(!l.positive)
}

#[cfg(test)]
pub(crate) fn letter_of(col: usize) -> Letter {
    Letter {
        gen: col / 2,
        positive: col % 2 == 0,
    }
}

/// Expands a word into table columns.
pub(crate) fn word_columns(w: &FreeWord) -> Result<Vec<usize>, EnumError> {
    let letters = w.letter_len();
    if letters > MAX_RELATOR_LETTERS {
        return Err(EnumError::WordTooLong { letters });
    }
    Ok(w.letters().map(column).collect())
}

impl CosetTable {
    pub(crate) fn from_raw(
        rank: usize,
        num_cosets: usize,
        entries: Vec<u32>,
        subgroup: Vec<FreeWord>,
    ) -> Self {
        debug_assert_eq!(entries.len(), num_cosets * 2 * rank);
        let complete = entries.iter().all(|&e| e != UNDEF);
        CosetTable {
            rank,
            num_cosets,
            entries,
            complete,
            subgroup,
        }
    }

    /// Builds a table from the images of each generator (0-based), deriving
    /// the inverse columns.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Self, EnumError> {
        let rank = perms.len();
        let n = perms.first().map_or(1, Vec::len);
        let mut entries = vec![UNDEF; n * 2 * rank];
        for (g, perm) in perms.iter().enumerate() {
            if perm.len() != n {
                return Err(EnumError::Shape {
                    cosets: n,
                    rank,
                    cols: perm.len(),
                });
            }
            for (c, &d) in perm.iter().enumerate() {
                if d >= n || entries[d * 2 * rank + 2 * g + 1] != UNDEF {
                    return Err(EnumError::Incomplete);
                }
                entries[c * 2 * rank + 2 * g] = d as u32;
                entries[d * 2 * rank + 2 * g + 1] = c as u32;
            }
        }
        Ok(CosetTable::from_raw(rank, n, entries, Vec::new()))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_cosets(&self) -> usize {
        self.num_cosets
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Words generating the subgroup whose cosets are enumerated (may be empty).
    pub fn subgroup(&self) -> &[FreeWord] {
        &self.subgroup
    }

    pub(crate) fn entry(&self, coset: usize, col: usize) -> Option<usize> {
        let e = self.entries[coset * 2 * self.rank + col];
        (e != UNDEF).then_some(e as usize)
    }

    /// Image of `coset` under `x_gen^{±1}`.
    pub fn image(&self, coset: usize, letter: Letter) -> Option<usize> {
        self.entry(coset, column(letter))
    }

    /// Coset reached by tracing `w` from `coset`, if every step is defined.
    pub fn trace(&self, coset: usize, w: &FreeWord) -> Option<usize> {
        let mut c = coset;
        for s in w.syllables() {
            let col = 2 * s.gen + usize::from(s.exp < 0);
            for _ in 0..s.exp.unsigned_abs() {
                c = self.entry(c, col)?;
            }
        }
        Some(c)
    }

    /// 0-based images of every coset under generator `gen`.
    pub fn permutation(&self, gen: usize) -> Option<Vec<usize>> {
        (0..self.num_cosets)
            .map(|c| self.entry(c, 2 * gen))
            .collect()
    }

    /// Whether every relator of `p` closes at every coset and every subgroup
    /// word fixes coset 0.
    pub fn is_consistent_with(&self, p: &Presentation) -> bool {
        self.complete
            && p.rank() == self.rank
            && (0..self.num_cosets).all(|c| {
                p.relators()
                    .iter()
                    .all(|r| self.trace(c, r) == Some(c))
            })
            && self.subgroup.iter().all(|w| self.trace(0, w) == Some(0))
    }

    /// One array per generator listing the 1-based image of each coset
    /// (`null` for undefined entries).
    pub fn to_json(&self) -> serde_json::Value {
        let cols: Vec<Vec<Option<usize>>> = (0..self.rank)
            .map(|g| {
                (0..self.num_cosets)
                    .map(|c| self.entry(c, 2 * g).map(|d| d + 1))
                    .collect()
            })
            .collect();
        serde_json::json!(cols)
    }

    /// Renumbers cosets in order of first appearance scanning rows in order
    /// from coset 0. Complete tables of the same subgroup become identical.
    pub(crate) fn standardize(&mut self) {
        let width = 2 * self.rank;
        let n = self.num_cosets;
        let mut new_of = vec![UNDEF; n];
        let mut order = Vec::with_capacity(n);
        new_of[0] = 0;
        order.push(0usize);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for col in 0..width {
                if let Some(d) = self.entry(c, col) {
                    if new_of[d] == UNDEF {
                        new_of[d] = order.len() as u32;
                        order.push(d);
                    }
                }
            }
            i += 1;
        }
        if order.len() < n {
            for c in 0..n {
                if new_of[c] == UNDEF {
                    new_of[c] = order.len() as u32;
                    order.push(c);
                }
            }
        }
        let mut entries = vec![UNDEF; n * width];
        for (new, &old) in order.iter().enumerate() {
            for col in 0..width {
                let e = self.entries[old * width + col];
                entries[new * width + col] = if e == UNDEF { UNDEF } else { new_of[e as usize] };
            }
        }
        self.entries = entries;
    }
}

impl Serialize for CosetTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Normalises subgroup words and checks their generators.
pub(crate) fn check_subgroup(p: &Presentation, subgroup: &[FreeWord]) -> Result<(), EnumError> {
    for w in subgroup {
        if let Some(gen) = w.max_gen() {
            if gen >= p.rank() {
                return Err(EnumError::SubgroupGenerator {
                    gen,
                    rank: p.rank(),
                });
            }
        }
        word_columns(w)?;
    }
    Ok(())
}
