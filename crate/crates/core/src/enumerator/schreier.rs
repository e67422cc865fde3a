use std::collections::VecDeque;

use super::{CosetTable, EnumError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::invariants::{
    abelian_group_of_matrix, smith_normal_form_with_transform, AbelianGroup, IntMatrix,
};
use crate::presentations::Presentation;

/// Reidemeister–Schreier data of a complete coset table: one generator per
/// non-tree edge `(coset, x_g)` of a breadth-first spanning tree, one relation
/// per (coset, relator) pair, abelianised.
struct SchreierSystem {
    rank: usize,
    /// Generator index of edge `c * rank + g`, `usize::MAX` on tree edges.
    index: Vec<usize>,
    relations: IntMatrix,
}

fn schreier_system(p: &Presentation, t: &CosetTable) -> Result<SchreierSystem, EnumError> {
    if !t.is_complete() {
        return Err(EnumError::Incomplete);
    }
    let rank = t.rank();
    if rank != p.rank() {
        return Err(EnumError::Shape {
            cosets: t.num_cosets(),
            rank: p.rank(),
            cols: 2 * rank,
        });
    }
    let n = t.num_cosets();

    let mut tree = vec![false; n * rank];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for col in 0..2 * rank {
            let d = t.entry(c, col).expect("complete");
            if seen[d] {
                continue;
            }
            seen[d] = true;
            queue.push_back(d);
            let g = col / 2;
            if col % 2 == 0 {
                tree[c * rank + g] = true;
            } else {
                tree[d * rank + g] = true;
            }
        }
    }

    let mut index = vec![usize::MAX; n * rank];
    let mut gens = 0;
    for (edge, &is_tree) in tree.iter().enumerate() {
        if !is_tree {
            index[edge] = gens;
            gens += 1;
        }
    }

    let relators = p.relators();
    let mut m = IntMatrix::zeros(n * relators.len(), gens);
    for c in 0..n {
        for (ri, r) in relators.iter().enumerate() {
            let row = c * relators.len() + ri;
            let mut a = c;
            for s in r.syllables() {
                let g = s.gen;
                for _ in 0..s.exp.unsigned_abs() {
                    if s.exp > 0 {
                        let idx = index[a * rank + g];
                        if idx != usize::MAX {
                            *m.get_mut(row, idx) += 1;
                        }
                        a = t.entry(a, 2 * g).expect("complete");
                    } else {
                        let b = t.entry(a, 2 * g + 1).expect("complete");
                        let idx = index[b * rank + g];
                        if idx != usize::MAX {
                            *m.get_mut(row, idx) -= 1;
                        }
                        a = b;
                    }
                }
            }
        }
    }
    Ok(SchreierSystem {
        rank,
        index,
        relations: m,
    })
}

/// Abelianisation of the subgroup whose cosets `t` enumerates.
pub fn subgroup_abelianization(p: &Presentation, t: &CosetTable) -> Result<AbelianGroup, EnumError> {
    Ok(abelian_group_of_matrix(&schreier_system(p, t)?.relations))
}

/// Given the complete coset table of a cyclic subgroup `H`, builds the
/// trivial-subgroup table of the whole group: elements are pairs
/// `(a, c)` standing for `w^a u_c` with `H = <w>` identified with `Z_h`.
/// `None` when `H` is infinite, not cyclic, or the result would exceed
/// `max_cosets`.
pub(crate) fn lift_cyclic_subgroup(
    p: &Presentation,
    t: &CosetTable,
    max_cosets: usize,
) -> Option<CosetTable> {
    let sys = schreier_system(p, t).ok()?;
    let gens = sys.relations.cols();
    let (diag, v) = smith_normal_form_with_transform(&sys.relations);
    if diag.len() < gens || diag.iter().any(Zero::is_zero) {
        return None;
    }
    let nontrivial: Vec<usize> = (0..diag.len()).filter(|&j| !diag[j].is_one()).collect();
    if nontrivial.len() > 1 {
        return None;
    }
    let (h, coord) = match nontrivial.first() {
        Some(&j) => (diag[j].to_usize()?, Some(j)),
        None => (1, None),
    };
    let m = t.num_cosets();
    if m.checked_mul(h)? > max_cosets {
        return None;
    }
    let h_big = BigInt::from(h);
    let label = |edge: usize| -> usize {
        match (sys.index[edge], coord) {
            (usize::MAX, _) | (_, None) => 0,
            (idx, Some(j)) => v.get(idx, j).mod_floor(&h_big).to_usize().expect("below h"),
        }
    };
    let perms: Vec<Vec<usize>> = (0..sys.rank)
        .map(|g| {
            let mut perm = vec![0; m * h];
            for c in 0..m {
                let d = t.entry(c, 2 * g).expect("complete");
                let lab = label(c * sys.rank + g);
                for a in 0..h {
                    perm[c * h + a] = d * h + (a + lab) % h;
                }
            }
            perm
        })
        .collect();
    let mut table = CosetTable::from_permutations(&perms).ok()?;
    table.standardize();
    table.is_consistent_with(p).then_some(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerator::{enumerate, low_index_subgroups, Strategy};
    use crate::invariants::abelianization;
    use crate::presentations::{build_fractional, FibParams};
    use crate::words::FreeWord;

    #[test]
    fn whole_group_matches_abelianization() {
        for (n, k, l) in [(3, 1, 1), (3, 2, 1), (5, 1, 2), (4, 2, 3)] {
            let p = build_fractional(&FibParams::new(n, k, l, 0).unwrap()).unwrap();
            let whole = &low_index_subgroups(&p, 1)[0];
            assert_eq!(subgroup_abelianization(&p, whole).unwrap(), abelianization(&p));
        }
    }

    #[test]
    fn nielsen_schreier_rank() {
        for rank in 1..=3usize {
            let p = Presentation::new(rank, vec![]).unwrap();
            for t in low_index_subgroups(&p, 3) {
                let ab = subgroup_abelianization(&p, &t).unwrap();
                assert!(ab.torsion.is_empty());
                assert_eq!(ab.free_rank, t.num_cosets() * (rank - 1) + 1);
            }
        }
    }

    #[test]
    fn trivial_subgroup_of_finite_group() {
        let p = build_fractional(&FibParams::new(3, 1, 1, 0).unwrap()).unwrap();
        let t = enumerate(&p, &[], 100, Strategy::Hlt).unwrap().into_table().unwrap();
        assert_eq!(subgroup_abelianization(&p, &t).unwrap(), AbelianGroup::trivial());
    }

    #[test]
    fn lifting_cyclic_subgroup_tables() {
        for (n, k, l, omega) in [(3, 1, 1, 0), (3, 2, 1, 0), (3, 1, 2, 0), (3, 3, 1, 6), (5, 1, 1, 0)] {
            let p = build_fractional(&FibParams::new(n, k, l, omega).unwrap()).unwrap();
            let direct = enumerate(&p, &[], 100_000, Strategy::Hlt)
                .unwrap()
                .into_table()
                .unwrap();
            for w in ["x0", "x1", "x0 x1"] {
                let h = enumerate(&p, &[w.parse().unwrap()], 100_000, Strategy::Felsch)
                    .unwrap()
                    .into_table()
                    .unwrap();
                let lifted = lift_cyclic_subgroup(&p, &h, 100_000).unwrap();
                assert_eq!(lifted, direct, "{p} over <{w}>");
            }
        }
    }

    #[test]
    fn lifting_refuses_infinite_subgroups() {
        // Z_2 x Z with H = <x1> of index 2.
        let p = Presentation::new(
            2,
            vec!["x0^2".parse().unwrap(), "x0 x1 x0^-1 x1^-1".parse().unwrap()],
        )
        .unwrap();
        let t = enumerate(&p, &[FreeWord::generator(1)], 100, Strategy::Hlt)
            .unwrap()
            .into_table()
            .unwrap();
        assert_eq!(lift_cyclic_subgroup(&p, &t, 1000), None);
    }

    #[test]
    fn cyclic_subgroup_of_quaternion() {
        // <x0> in Q_8 is cyclic of order 4.
        let p = build_fractional(&FibParams::new(3, 1, 1, 0).unwrap()).unwrap();
        let t = enumerate(&p, &[FreeWord::generator(0)], 100, Strategy::Felsch)
            .unwrap()
            .into_table()
            .unwrap();
        let ab = subgroup_abelianization(&p, &t).unwrap();
        assert_eq!(ab, AbelianGroup::from_cyclic_orders([4.into()]));
    }
}
