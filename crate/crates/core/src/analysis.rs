//! Brute-force structure of a finite group given by its regular
//! representation: element orders, derived subgroup, centre, involutions.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerator::CosetTable;
use crate::invariants::{abelianization, AbelianGroup};
use crate::presentations::Presentation;
use crate::words::{FreeWord, Letter};

/// Largest group order the analyses accept.
pub const MAX_ANALYSIS_ORDER: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("coset table is incomplete")]
    Incomplete,
    #[error("coset table enumerates a nontrivial subgroup")]
    NontrivialSubgroup,
    #[error("group order {order} exceeds the analysis bound {MAX_ANALYSIS_ORDER}")]
    TooLarge { order: usize },
    #[error("word uses generator {gen} but the group has rank {rank}")]
    GeneratorOutOfRange { gen: usize, rank: usize },
}

/// A finite group acting on itself by right multiplication. Element `0` is
/// the identity; element `e` is represented by a transversal word `u_e`.
#[derive(Debug, Clone)]
pub struct FiniteGroupTable {
    rank: usize,
    /// `right[col][e]` is `e` times the letter of column `col`.
    right: Vec<Vec<u32>>,
    transversal: Vec<Vec<u8>>,
}

/// Regular representation from a complete trivial-subgroup coset table.
pub fn regular_rep(t: &CosetTable) -> Result<FiniteGroupTable, AnalysisError> {
    if !t.is_complete() {
        return Err(AnalysisError::Incomplete);
    }
    if t.subgroup().iter().any(|w| !w.is_identity()) {
        return Err(AnalysisError::NontrivialSubgroup);
    }
    let order = t.num_cosets();
    if order > MAX_ANALYSIS_ORDER {
        return Err(AnalysisError::TooLarge { order });
    }
    let rank = t.rank();
    let right: Vec<Vec<u32>> = (0..2 * rank)
        .map(|col| {
            (0..order)
                .map(|e| {
                    let letter = Letter {
                        gen: col / 2,
                        positive: col % 2 == 0,
                    };
                    t.image(e, letter).expect("complete") as u32
                })
                .collect()
        })
        .collect();

    let mut transversal: Vec<Option<Vec<u8>>> = vec![None; order];
    transversal[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(e) = queue.pop_front() {
        for (col, images) in right.iter().enumerate() {
            let f = images[e] as usize;
            if transversal[f].is_none() {
                let mut w = transversal[e].clone().expect("visited");
                w.push(col as u8);
                transversal[f] = Some(w);
                queue.push_back(f);
            }
        }
    }
    Ok(FiniteGroupTable {
        rank,
        right,
        transversal: transversal
            .into_iter()
            .map(|w| w.expect("coset tables are connected"))
            .collect(),
    })
}

impl FiniteGroupTable {
    pub fn order(&self) -> usize {
        self.transversal.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Image of generator `gen` as a permutation of the elements.
    pub fn generator_permutation(&self, gen: usize) -> &[u32] {
        &self.right[2 * gen]
    }

    fn check_word(&self, w: &FreeWord) -> Result<(), AnalysisError> {
        match w.max_gen() {
            Some(gen) if gen >= self.rank => Err(AnalysisError::GeneratorOutOfRange {
                gen,
                rank: self.rank,
            }),
            _ => Ok(()),
        }
    }

    fn apply(&self, e: usize, w: &FreeWord) -> usize {
        let mut e = e;
        for s in w.syllables() {
            let images = &self.right[2 * s.gen + usize::from(s.exp < 0)];
            for _ in 0..s.exp.unsigned_abs() {
                e = images[e] as usize;
            }
        }
        e
    }

    /// The element represented by `w`.
    pub fn element(&self, w: &FreeWord) -> Result<usize, AnalysisError> {
        self.check_word(w)?;
        Ok(self.apply(0, w))
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.transversal[b]
            .iter()
            .fold(a, |e, &col| self.right[col as usize][e] as usize)
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.transversal[a]
            .iter()
            .rev()
            .fold(0, |e, &col| self.right[(col ^ 1) as usize][e] as usize)
    }

    fn generator_element(&self, gen: usize) -> usize {
        self.right[2 * gen][0] as usize
    }

    /// Membership vector of the subgroup generated by `gens`.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut member = vec![false; self.order()];
        member[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            for &s in gens {
                let hs = self.mul(h, s);
                if !member[hs] {
                    member[hs] = true;
                    queue.push_back(hs);
                }
            }
        }
        member
    }

    /// Normal closure of `seeds`, as a membership vector.
    pub fn normal_closure(&self, seeds: &[usize]) -> Vec<bool> {
        let mut gens: Vec<usize> = seeds.to_vec();
        loop {
            let member = self.subgroup_closure(&gens);
            let mut added = false;
            for i in 0..gens.len() {
                for g in 0..self.rank {
                    let x = self.generator_element(g);
                    let conj = self.mul(self.mul(self.inverse(x), gens[i]), x);
                    if !member[conj] && !gens.contains(&conj) {
                        gens.push(conj);
                        added = true;
                    }
                }
            }
            if !added {
                return member;
            }
        }
    }
}

fn count(member: &[bool]) -> usize {
    member.iter().filter(|&&b| b).count()
}

/// Multiplicative order of the image of `w`.
pub fn element_order(g: &FiniteGroupTable, w: &FreeWord) -> Result<usize, AnalysisError> {
    let e = g.element(w)?;
    let mut cur = e;
    let mut order = 1;
    while cur != 0 {
        cur = g.apply(cur, w);
        order += 1;
    }
    Ok(order)
}

/// Order of the normal closure of the commutators of the generators.
pub fn derived_subgroup_order(g: &FiniteGroupTable) -> usize {
    let gens: Vec<usize> = (0..g.rank).map(|i| g.generator_element(i)).collect();
    let mut seeds = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let (a, b) = (gens[i], gens[j]);
            let c = g.mul(g.mul(g.inverse(a), g.inverse(b)), g.mul(a, b));
            if c != 0 && !seeds.contains(&c) {
                seeds.push(c);
            }
        }
    }
    count(&g.normal_closure(&seeds))
}

pub fn center_order(g: &FiniteGroupTable) -> usize {
    let gens: Vec<usize> = (0..g.rank).map(|i| g.generator_element(i)).collect();
    (0..g.order())
        .filter(|&z| {
            gens.iter()
                .enumerate()
                .all(|(i, &x)| g.right[2 * i][z] as usize == g.mul(x, z))
        })
        .count()
}

pub fn involution_count(g: &FiniteGroupTable) -> usize {
    (1..g.order()).filter(|&a| g.mul(a, a) == 0).count()
}

/// Whether the images of `x_0` and `x_1` generate the whole group.
pub fn check_two_generated(g: &FiniteGroupTable) -> bool {
    let gens: Vec<usize> = (0..g.rank.min(2)).map(|i| g.generator_element(i)).collect();
    count(&g.subgroup_closure(&gens)) == g.order()
}

/// Isomorphism-invariant data of a finite group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: usize,
    pub ab: AbelianGroup,
    pub derived_order: usize,
    pub center_order: usize,
    pub involution_count: usize,
    pub is_perfect: bool,
}

impl Fingerprint {
    pub fn is_abelian(&self) -> bool {
        self.derived_order == 1
    }
}

/// Fingerprint of the group `g`, which must be the group presented by `p`.
pub fn fingerprint(g: &FiniteGroupTable, p: &Presentation) -> Fingerprint {
    let derived_order = derived_subgroup_order(g);
    Fingerprint {
        order: g.order(),
        ab: abelianization(p),
        derived_order,
        center_order: center_order(g),
        involution_count: involution_count(g),
        is_perfect: derived_order == g.order(),
    }
}

/// Necessary conditions for `Q_8 x Z_p` (`p` odd): order `8p`, a unique
/// involution, derived subgroup of order 2, abelianisation `Z_2 + Z_2 + Z_p`
/// and centre of order `2p`.
pub fn match_q8_times_zp(f: &Fingerprint, p: usize) -> bool {
    let ab = AbelianGroup::from_cyclic_orders([2, 2, p].map(BigInt::from));
    p % 2 == 1
        && f.order == 8 * p
        && f.involution_count == 1
        && f.derived_order == 2
        && f.ab == ab
        && f.center_order == 2 * p
}

/// Necessary conditions for `PSL(2, 11)`: order 660, perfect, trivial centre.
pub fn consistent_with_psl2_11(f: &Fingerprint) -> bool {
    f.order == 660 && f.is_perfect && f.center_order == 1
}

/// `|ab|` as a machine integer, when finite.
pub fn ab_order(f: &Fingerprint) -> Option<usize> {
    f.ab.order().and_then(|o| o.to_usize())
}
