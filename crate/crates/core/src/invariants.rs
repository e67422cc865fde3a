//! Exact integer linear algebra: Smith normal form, abelian invariants and
//! circulant determinants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::presentations::Presentation;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of equal length.
    ///
    /// # Panics
    /// If the rows are ragged.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows
                .iter()
                .flat_map(|r| r.iter().cloned().map(Into::into))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.get_mut(j, i) = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(<[BigInt]>::to_vec)
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] -= factor * row[source]
    fn row_axpy(&mut self, target: usize, source: usize, factor: &BigInt, from_col: usize) {
        for j in from_col..self.cols {
            let delta = factor * self.get(source, j);
            *self.get_mut(target, j) -= delta;
        }
    }

    fn col_axpy(&mut self, target: usize, source: usize, factor: &BigInt, from_row: usize) {
        for i in from_row..self.rows {
            let delta = factor * self.get(i, source);
            *self.get_mut(i, target) -= delta;
        }
    }

    fn reduce_row(&mut self, i: usize, from_col: usize, d: &BigInt) {
        for j in from_col..self.cols {
            let x = sym_mod(self.get(i, j), d);
            *self.get_mut(i, j) = x;
        }
    }

    fn reduce_col(&mut self, j: usize, from_row: usize, d: &BigInt) {
        for i in from_row..self.rows {
            let x = sym_mod(self.get(i, j), d);
            *self.get_mut(i, j) = x;
        }
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<BigInt>>::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(IntMatrix::from_rows(&rows))
    }
}

/// Invariant factors `d_1 | d_2 | ...` of `m`, one per diagonal position
/// (`min(rows, cols)` of them), computed with unimodular integer row and
/// column operations only.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    snf(m.clone(), None)
}

/// Invariant factors together with a unimodular `V` such that `U m V` is
/// diagonal for some unimodular `U`. Row vectors `x` map to Smith
/// coordinates `x V`.
pub fn smith_normal_form_with_transform(m: &IntMatrix) -> (Vec<BigInt>, IntMatrix) {
    let mut v = IntMatrix::identity(m.cols);
    let diag = snf(m.clone(), Some(&mut v));
    (diag, v)
}

/// Column counts up to this use arithmetic modulo a lattice determinant.
const MODULAR_MAX_COLS: usize = 64;

fn snf(mut a: IntMatrix, mut v: Option<&mut IntMatrix>) -> Vec<BigInt> {
    let size = a.rows.min(a.cols);
    let mut diag = Vec::with_capacity(size);
    // With `d Z^cols` inside the row lattice, entries may be reduced mod d.
    let modulus = if a.cols <= MODULAR_MAX_COLS {
        full_rank_modulus(&a)
    } else {
        None
    };
    if let Some(d) = &modulus {
        for x in &mut a.entries {
            *x = sym_mod(x, d);
        }
    }

    for t in 0..size {
        // Pivot: nonzero entry of least absolute value in the trailing block.
        let Some((pi, pj)) = min_abs_entry(&a, t) else {
            let rest = modulus.clone().unwrap_or_else(BigInt::zero);
            diag.extend(std::iter::repeat(rest).take(size - t));
            break;
        };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        if let Some(v) = v.as_deref_mut() {
            v.swap_cols(t, pj);
        }

        loop {
            let mut changed = false;
            // Clear column t below the pivot.
            for i in t + 1..a.rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).div_floor(a.get(t, t));
                a.row_axpy(i, t, &q, t);
                if let Some(d) = &modulus {
                    a.reduce_row(i, t + 1, d);
                }
                if !a.get(i, t).is_zero() {
                    // Remainder smaller than the pivot: promote it.
                    a.swap_rows(t, i);
                    changed = true;
                }
            }
            // Clear row t right of the pivot.
            for j in t + 1..a.cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).div_floor(a.get(t, t));
                a.col_axpy(j, t, &q, t);
                if let Some(d) = &modulus {
                    a.reduce_col(j, t + 1, d);
                }
                if let Some(v) = v.as_deref_mut() {
                    v.col_axpy(j, t, &q, 0);
                }
                if !a.get(t, j).is_zero() {
                    a.swap_cols(t, j);
                    if let Some(v) = v.as_deref_mut() {
                        v.swap_cols(t, j);
                    }
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Row and column are clear; enforce divisibility of the remaining block.
            let pivot = a.get(t, t).clone();
            let offender = (t + 1..a.rows)
                .flat_map(|i| (t + 1..a.cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    // row t += row i, then the pivot no longer divides row t.
                    let minus_one = -BigInt::one();
                    a.row_axpy(t, i, &minus_one, t);
                    if let Some(d) = &modulus {
                        a.reduce_row(t, t + 1, d);
                    }
                }
                None => break,
            }
        }
        let p = a.get(t, t).abs();
        diag.push(match &modulus {
            Some(d) => p.gcd(d),
            None => p,
        });
    }
    diag
}

/// Symmetric residue of `x` modulo `d > 0`.
fn sym_mod(x: &BigInt, d: &BigInt) -> BigInt {
    let r = x.mod_floor(d);
    if &r + &r > *d {
        r - d
    } else {
        r
    }
}

/// `|det|` of some square submatrix built from `cols` independent rows of
/// `a`, or `None` when the rows do not span a full-rank lattice.
fn full_rank_modulus(a: &IntMatrix) -> Option<BigInt> {
    let n = a.cols;
    if n == 0 || a.rows < n {
        return None;
    }
    let mut m = a.to_rows();
    let mut prev = BigInt::one();
    for k in 0..n {
        let r = (k..m.len()).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, r);
        for i in k + 1..m.len() {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Some(prev.abs())
}

fn min_abs_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let v = a.get(i, j);
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Fraction-free (Bareiss) determinant of a square matrix.
///
/// # Panics
/// If `m` is not square.
pub fn determinant(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Finitely generated abelian group `Z^free_rank + Z_{d_1} + ... + Z_{d_t}`
/// with `2 <= d_1 | d_2 | ... | d_t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            torsion: Vec::new(),
            free_rank: 0,
        }
    }

    /// Normalises a direct sum of cyclic groups `Z_{c_1} + ... ` (0 meaning `Z`)
    /// into invariant-factor form.
    pub fn from_cyclic_orders<I: IntoIterator<Item = BigInt>>(orders: I) -> Self {
        let mut free_rank = 0;
        let mut factors: Vec<BigInt> = Vec::new();
        for c in orders {
            let c = c.abs();
            if c.is_zero() {
                free_rank += 1;
            } else if !c.is_one() {
                factors.push(c);
            }
        }
        // Invariant factors from the diagonal matrix.
        let n = factors.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, c) in factors.into_iter().enumerate() {
            *m.get_mut(i, i) = c;
        }
        let torsion = smith_normal_form(&m)
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        AbelianGroup { torsion, free_rank }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// `None` when the group is infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d))
    }

    pub fn is_cyclic(&self) -> bool {
        self.torsion.len() + self.free_rank <= 1
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z_{d}")).collect();
        parts.extend(std::iter::repeat("Z".to_string()).take(self.free_rank));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Abelian invariants of a relation matrix with one column per generator.
pub fn abelian_group_of_matrix(m: &IntMatrix) -> AbelianGroup {
    let diag = smith_normal_form(m);
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    AbelianGroup {
        torsion: diag
            .into_iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .collect(),
        free_rank: m.cols - nonzero,
    }
}

/// The abelianisation of the group presented by `p`.
pub fn abelianization(p: &Presentation) -> AbelianGroup {
    abelian_group_of_matrix(&p.relation_matrix())
}

/// The `n x n` circulant with first row `l, k, -l` in columns `0, 1, 2` (mod n).
pub fn circulant_matrix(n: usize, k: i64, l: i64) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        *m.get_mut(i, i) += l;
        *m.get_mut(i, (i + 1) % n) += k;
        *m.get_mut(i, (i + 2) % n) -= l;
    }
    m
}

/// `|Res(l + k t - l t^2, t^n - 1)|` as the absolute circulant determinant.
pub fn circulant_resultant(n: usize, k: i64, l: i64) -> BigInt {
    determinant(&circulant_matrix(n, k, l)).abs()
}
