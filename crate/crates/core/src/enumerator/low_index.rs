use std::collections::HashSet;

use super::{word_columns, CosetTable, UNDEF};
use crate::exec::{self, Exec};
use crate::presentations::Presentation;

/// Frontier size per worker thread before the search is handed out.
const FRONTIER_PER_THREAD: usize = 8;

struct Search {
    max_index: usize,
    width: usize,
    rank: usize,
    rotations: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone)]
struct Node {
    table: Vec<u32>,
    n: usize,
}

enum Expansion {
    Complete(Node),
    Children(Vec<Node>),
}

impl Search {
    fn new(p: &Presentation, max_index: usize) -> Self {
        let width = 2 * p.rank();
        let mut rotations = vec![Vec::new(); width];
        let mut seen = HashSet::new();
        for r in p.relators() {
            let r = word_columns(r).expect("relators fit the expansion limit");
            let inv: Vec<usize> = r.iter().rev().map(|c| c ^ 1).collect();
            for w in [&r, &inv] {
                for s in 0..w.len() {
                    let rot: Vec<usize> = w[s..].iter().chain(&w[..s]).copied().collect();
                    if seen.insert(rot.clone()) {
                        rotations[rot[0]].push(rot);
                    }
                }
            }
        }
        Search {
            max_index,
            width,
            rank: p.rank(),
            rotations,
        }
    }

    fn root(&self) -> Node {
        Node {
            table: vec![UNDEF; self.max_index * self.width],
            n: 1,
        }
    }

    #[inline]
    fn get(&self, node: &Node, c: usize, col: usize) -> u32 {
        node.table[c * self.width + col]
    }

    /// Closes the partial table under relator deductions; `false` on a
    /// contradiction.
    fn deduce(&self, node: &mut Node, mut stack: Vec<(usize, usize)>) -> bool {
        while let Some((c, col)) = stack.pop() {
            for w in &self.rotations[col] {
                let (mut f, mut i) = (c, 0);
                let (mut b, mut j) = (c, w.len());
                while i < j {
                    let e = self.get(node, f, w[i]);
                    if e == UNDEF {
                        break;
                    }
                    f = e as usize;
                    i += 1;
                }
                if i == j {
                    if f != c {
                        return false;
                    }
                    continue;
                }
                while j > i {
                    let e = self.get(node, b, w[j - 1] ^ 1);
                    if e == UNDEF {
                        break;
                    }
                    b = e as usize;
                    j -= 1;
                }
                if j == i {
                    if f != b {
                        return false;
                    }
                } else if j == i + 1 {
                    node.table[f * self.width + w[i]] = b as u32;
                    node.table[b * self.width + (w[i] ^ 1)] = f as u32;
                    stack.push((f, w[i]));
                }
            }
        }
        true
    }

    /// Whether no choice of base point yields a smaller table, deciding only
    /// on entries already defined.
    ///
    /// Tables are compared entry by entry in definition order: the next entry
    /// is always the one in the lowest column, then lowest coset, among the
    /// cosets labelled so far. The search defines entries (and introduces new
    /// cosets) in this order, so every table it builds is standard for base
    /// point 0.
    fn is_canonical(&self, node: &Node) -> bool {
        let n = node.n;
        let mut label = vec![UNDEF; n];
        let mut order = Vec::with_capacity(n);
        let mut next_row = vec![0usize; self.width];
        'base: for beta in 1..n {
            label.iter_mut().for_each(|l| *l = UNDEF);
            next_row.iter_mut().for_each(|r| *r = 0);
            order.clear();
            label[beta] = 0;
            order.push(beta);
            loop {
                let Some(col) = (0..self.width).find(|&c| next_row[c] < order.len()) else {
                    continue 'base;
                };
                let i = next_row[col];
                next_row[col] += 1;
                let t = self.get(node, order[i], col);
                let orig = self.get(node, i, col);
                if t == UNDEF || orig == UNDEF {
                    continue 'base;
                }
                let t = t as usize;
                if label[t] == UNDEF {
                    label[t] = order.len() as u32;
                    order.push(t);
                }
                match label[t].cmp(&orig) {
                    std::cmp::Ordering::Less => return false,
                    std::cmp::Ordering::Greater => continue 'base,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        true
    }

    fn first_undefined(&self, node: &Node) -> Option<(usize, usize)> {
        (0..self.width).find_map(|col| {
            (0..node.n)
                .find(|&c| self.get(node, c, col) == UNDEF)
                .map(|c| (c, col))
        })
    }

    fn expand(&self, node: &Node) -> Expansion {
        let Some((c, col)) = self.first_undefined(node) else {
            return Expansion::Complete(node.clone());
        };
        let mut children = Vec::new();
        let targets = (0..node.n).chain((node.n < self.max_index).then_some(node.n));
        for d in targets {
            if d < node.n && self.get(node, d, col ^ 1) != UNDEF {
                continue;
            }
            let mut child = node.clone();
            if d == node.n {
                child.n += 1;
            }
            child.table[c * self.width + col] = d as u32;
            child.table[d * self.width + (col ^ 1)] = c as u32;
            if self.deduce(&mut child, vec![(c, col)]) && self.is_canonical(&child) {
                children.push(child);
            }
        }
        Expansion::Children(children)
    }

    fn finish(&self, node: Node) -> CosetTable {
        let mut table = node.table;
        table.truncate(node.n * self.width);
        CosetTable::from_raw(self.rank, node.n, table, Vec::new())
    }

    fn run(&self, node: Node, out: &mut Vec<CosetTable>) {
        match self.expand(&node) {
            Expansion::Complete(node) => out.push(self.finish(node)),
            Expansion::Children(children) => {
                for child in children {
                    self.run(child, out);
                }
            }
        }
    }
}

/// One coset table per conjugacy class of subgroups of index at most
/// `max_index`, ordered by index and then by table entries.
pub fn low_index_subgroups(p: &Presentation, max_index: usize) -> Vec<CosetTable> {
    low_index_subgroups_with(p, max_index, Exec::default())
}

pub fn low_index_subgroups_with(p: &Presentation, max_index: usize, exec: Exec) -> Vec<CosetTable> {
    if max_index == 0 {
        return Vec::new();
    }
    let search = Search::new(p, max_index);
    let mut found = Vec::new();
    let mut frontier = vec![search.root()];
    let target = match exec {
        Exec::Sequential => 1,
        Exec::Parallel => FRONTIER_PER_THREAD * available_threads(),
    };
    while !frontier.is_empty() && frontier.len() < target {
        let mut next = Vec::new();
        for node in frontier {
            match search.expand(&node) {
                Expansion::Complete(node) => found.push(search.finish(node)),
                Expansion::Children(children) => next.extend(children),
            }
        }
        frontier = next;
    }
    let subtrees = exec::map(exec, frontier, |node| {
        let mut out = Vec::new();
        search.run(node, &mut out);
        out
    });
    found.extend(subtrees.into_iter().flatten());
    found.sort_by(|a, b| {
        (a.num_cosets, &a.entries).cmp(&(b.num_cosets, &b.entries))
    });
    found
}

fn available_threads() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}
