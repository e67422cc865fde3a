use super::schreier::lift_cyclic_subgroup;
use super::{
    check_subgroup, word_columns, CosetTable, EnumError, EnumOutcome, Strategy, UNDEF,
};
use crate::presentations::Presentation;
use crate::words::FreeWord;

/// Signals that defining another coset would exceed the cap.
struct Full;

struct Enumerator {
    width: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    max_cosets: usize,
    relators: Vec<Vec<usize>>,
    /// For each column, cyclic rotations of the relators and their inverses
    /// that begin with that column.
    rotations: Vec<Vec<Vec<usize>>>,
    felsch: bool,
    deductions: Vec<(u32, u32)>,
    queue: Vec<u32>,
}

impl Enumerator {
    fn new(rank: usize, relators: Vec<Vec<usize>>, max_cosets: usize, felsch: bool) -> Self {
        let width = 2 * rank;
        let mut rotations = vec![Vec::new(); width];
        if felsch {
            let mut seen = std::collections::HashSet::new();
            for r in &relators {
                let inv: Vec<usize> = r.iter().rev().map(|c| c ^ 1).collect();
                for w in [r, &inv] {
                    for s in 0..w.len() {
                        let rot: Vec<usize> = w[s..].iter().chain(&w[..s]).copied().collect();
                        if seen.insert(rot.clone()) {
                            rotations[rot[0]].push(rot);
                        }
                    }
                }
            }
        }
        Enumerator {
            width,
            table: vec![UNDEF; width],
            parent: vec![0],
            live: 1,
            max_cosets: max_cosets.clamp(1, UNDEF as usize - 1),
            relators,
            rotations,
            felsch,
            deductions: Vec::new(),
            queue: Vec::new(),
        }
    }

    #[inline]
    fn get(&self, c: usize, col: usize) -> u32 {
        self.table[c * self.width + col]
    }

    #[inline]
    fn set(&mut self, c: usize, col: usize, d: u32) {
        self.table[c * self.width + col] = d;
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] as usize == c
    }

    fn allocated(&self) -> usize {
        self.parent.len()
    }

    /// Sets `c·col = d` and `d·col^-1 = c`.
    fn link(&mut self, c: usize, col: usize, d: usize) {
        self.set(c, col, d as u32);
        self.set(d, col ^ 1, c as u32);
        if self.felsch {
            self.deductions.push((c as u32, col as u32));
        }
    }

    fn define(&mut self, c: usize, col: usize) -> Result<usize, Full> {
        if self.allocated() >= self.max_cosets {
            return Err(Full);
        }
        let d = self.allocated();
        self.table.extend(std::iter::repeat(UNDEF).take(self.width));
        self.parent.push(d as u32);
        self.live += 1;
        self.link(c, col, d);
        Ok(d)
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut c = c;
        while self.parent[c] as usize != root {
            let next = self.parent[c] as usize;
            self.parent[c] = root as u32;
            c = next;
        }
        root
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, kill) = (a.min(b), a.max(b));
        self.parent[kill] = keep as u32;
        self.live -= 1;
        self.queue.push(kill as u32);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i] as usize;
            i += 1;
            for col in 0..self.width {
                let f = self.get(e, col);
                if f == UNDEF {
                    continue;
                }
                let f = f as usize;
                self.set(f, col ^ 1, UNDEF);
                let mu = self.rep(e);
                let nu = self.rep(f);
                let m = self.get(mu, col);
                if m != UNDEF {
                    self.merge(nu, m as usize);
                    continue;
                }
                let n = self.get(nu, col ^ 1);
                if n != UNDEF {
                    self.merge(mu, n as usize);
                    continue;
                }
                self.link(mu, col, nu);
            }
        }
        self.queue.clear();
    }

    /// Traces `w` around `alpha` from both ends; on a one-letter gap records
    /// the deduction, on closure processes any coincidence. Otherwise returns
    /// the coset and position where the forward trace stopped.
    fn scan(&mut self, alpha: usize, w: &[usize]) -> Option<(usize, usize)> {
        let (mut f, mut i) = (alpha, 0);
        let (mut b, mut j) = (alpha, w.len());
        while i < j {
            let e = self.get(f, w[i]);
            if e == UNDEF {
                break;
            }
            f = e as usize;
            i += 1;
        }
        if i == j {
            if f != b {
                self.coincidence(f, b);
            }
            return None;
        }
        while j > i {
            let e = self.get(b, w[j - 1] ^ 1);
            if e == UNDEF {
                break;
            }
            b = e as usize;
            j -= 1;
        }
        if j == i {
            self.coincidence(f, b);
            None
        } else if j == i + 1 {
            self.link(f, w[i], b);
            None
        } else {
            Some((f, i))
        }
    }

    fn scan_and_fill(&mut self, alpha: usize, w: &[usize]) -> Result<(), Full> {
        while let Some((f, i)) = self.scan(alpha, w) {
            self.define(f, w[i])?;
            if self.felsch {
                self.process_deductions();
            }
            if !self.alive(alpha) {
                break;
            }
        }
        Ok(())
    }

    fn process_deductions(&mut self) {
        while let Some((c, col)) = self.deductions.pop() {
            let c = c as usize;
            if !self.alive(c) {
                continue;
            }
            for r in 0..self.rotations[col as usize].len() {
                let w = std::mem::take(&mut self.rotations[col as usize][r]);
                self.scan(c, &w);
                self.rotations[col as usize][r] = w;
                if !self.alive(c) {
                    break;
                }
            }
        }
    }

    /// Scans every relator at every live coset without defining new cosets.
    fn lookahead(&mut self) {
        let relators = std::mem::take(&mut self.relators);
        for beta in 0..self.allocated() {
            for r in &relators {
                if !self.alive(beta) {
                    break;
                }
                self.scan(beta, r);
            }
        }
        self.relators = relators;
    }

    /// Removes dead cosets, preserving the order of the live ones. Returns the
    /// new index of the first live coset at or after `cursor`.
    fn compact(&mut self, cursor: usize) -> usize {
        debug_assert!(self.queue.is_empty() && self.deductions.is_empty());
        let n = self.allocated();
        let mut new_of = vec![UNDEF; n];
        let mut next = 0u32;
        let mut new_cursor = None;
        for c in 0..n {
            if c >= cursor && new_cursor.is_none() && self.alive(c) {
                new_cursor = Some(next as usize);
            }
            if self.alive(c) {
                new_of[c] = next;
                next += 1;
            }
        }
        let width = self.width;
        let mut table = Vec::with_capacity(next as usize * width);
        for c in 0..n {
            if new_of[c] == UNDEF {
                continue;
            }
            for col in 0..width {
                let e = self.table[c * width + col];
                table.push(if e == UNDEF { UNDEF } else { new_of[e as usize] });
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        self.live = next as usize;
        new_cursor.unwrap_or(next as usize)
    }

    fn first_undefined(&self, c: usize) -> Option<usize> {
        (0..self.width).find(|&col| self.get(c, col) == UNDEF)
    }

    /// Makes room after the cap was hit. Returns the new cursor, or `None`
    /// when no space could be recovered.
    fn recover(&mut self, cursor: usize) -> Option<usize> {
        if !self.felsch {
            self.lookahead();
        }
        let cursor = self.compact(cursor);
        let reserve = (self.max_cosets / 16).max(1);
        (self.allocated() + reserve <= self.max_cosets).then_some(cursor)
    }

    fn run(&mut self, subgroup: &[Vec<usize>]) -> bool {
        let mut cursor = 0;
        // Coset 0 is never merged away, so subgroup scans can simply be retried.
        loop {
            let done = subgroup.iter().all(|w| self.scan_and_fill(0, w).is_ok());
            if done {
                break;
            }
            self.deductions.clear();
            match self.recover(0) {
                Some(_) => continue,
                None => return false,
            }
        }
        if self.felsch {
            self.process_deductions();
        }
        loop {
            if cursor >= self.allocated() {
                return true;
            }
            if self.live * 2 < self.allocated() {
                cursor = self.compact(cursor);
                continue;
            }
            if !self.alive(cursor) {
                cursor += 1;
                continue;
            }
            let step = if self.felsch {
                self.felsch_step(cursor)
            } else {
                self.hlt_step(cursor)
            };
            match step {
                Ok(()) => cursor += 1,
                Err(Full) => {
                    self.deductions.clear();
                    match self.recover(cursor) {
                        Some(c) => cursor = c,
                        None => return false,
                    }
                }
            }
        }
    }

    fn hlt_step(&mut self, alpha: usize) -> Result<(), Full> {
        let relators = std::mem::take(&mut self.relators);
        let mut result = Ok(());
        for r in &relators {
            if !self.alive(alpha) {
                break;
            }
            if let Err(full) = self.scan_and_fill(alpha, r) {
                result = Err(full);
                break;
            }
        }
        self.relators = relators;
        result?;
        while self.alive(alpha) {
            match self.first_undefined(alpha) {
                Some(col) => {
                    self.define(alpha, col)?;
                }
                None => break,
            }
        }
        Ok(())
    }

    fn felsch_step(&mut self, alpha: usize) -> Result<(), Full> {
        while self.alive(alpha) {
            match self.first_undefined(alpha) {
                Some(col) => {
                    self.define(alpha, col)?;
                    self.process_deductions();
                }
                None => break,
            }
        }
        Ok(())
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the group
/// presented by `p`, giving up once `max_cosets` cosets are in use.
///
/// For the trivial subgroup, when direct enumeration overflows, the cosets
/// of a cyclic subgroup `<x_g>` are enumerated instead and the table is
/// lifted to the whole group through the subgroup's Reidemeister–Schreier
/// abelianisation. Either way the result is the standardised table of the
/// regular action.
pub fn enumerate(
    p: &Presentation,
    subgroup: &[FreeWord],
    max_cosets: usize,
    strategy: Strategy,
) -> Result<EnumOutcome, EnumError> {
    let outcome = enumerate_direct(p, subgroup, max_cosets, strategy)?;
    if outcome.table().is_some() || !subgroup.iter().all(FreeWord::is_identity) {
        return Ok(outcome);
    }
    let strategies = [strategy, Strategy::Hlt, Strategy::Felsch];
    for gen in 0..p.rank().min(CYCLIC_FALLBACK_GENERATORS) {
        let h = [FreeWord::generator(gen)];
        for (i, &s) in strategies.iter().enumerate() {
            if strategies[..i].contains(&s) {
                continue;
            }
            if let EnumOutcome::Complete(t) = enumerate_direct(p, &h, max_cosets, s)? {
                if let Some(mut table) = lift_cyclic_subgroup(p, &t, max_cosets) {
                    table.subgroup = subgroup.to_vec();
                    return Ok(EnumOutcome::Complete(table));
                }
            }
        }
    }
    Ok(outcome)
}

/// Generators `x_0, x_1, ...` tried as cyclic subgroups by [`enumerate`].
const CYCLIC_FALLBACK_GENERATORS: usize = 2;

fn enumerate_direct(
    p: &Presentation,
    subgroup: &[FreeWord],
    max_cosets: usize,
    strategy: Strategy,
) -> Result<EnumOutcome, EnumError> {
    check_subgroup(p, subgroup)?;
    let relators = p
        .relators()
        .iter()
        .map(word_columns)
        .collect::<Result<Vec<_>, _>>()?;
    let sub_cols = subgroup
        .iter()
        .map(word_columns)
        .collect::<Result<Vec<_>, _>>()?;
    let mut e = Enumerator::new(p.rank(), relators, max_cosets, strategy == Strategy::Felsch);
    if !e.run(&sub_cols) {
        return Ok(EnumOutcome::Overflow { max_cosets });
    }
    e.compact(0);
    let mut table = CosetTable::from_raw(p.rank(), e.live, e.table, subgroup.to_vec());
    table.standardize();
    debug_assert!(table.is_consistent_with(p));
    Ok(EnumOutcome::Complete(table))
}

/// Order of `p` modulo the normal closure of `extra`.
pub fn quotient_order(
    p: &Presentation,
    extra: &[FreeWord],
    max_cosets: usize,
) -> Result<EnumOutcome, EnumError> {
    let q = p.with_extra_relators(extra)?;
    enumerate(&q, &[], max_cosets, Strategy::default())
}
