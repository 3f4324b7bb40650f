//! Compatibility graphs of partial matrices and exact clique existence.
//!
//! A partial matrix with `r` rows completes to order `n` only if the rows
//! that may follow it contain `n - r` pairwise orthogonal ones.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::extend::{Extender, RowConstraints};
use crate::matrix::{sub_mod, LogMatrix, LogRow};
use crate::vanishing::VanishingSet;

/// Undirected simple graph on candidate rows, adjacency stored as bitsets.
#[derive(Clone, Debug)]
pub struct CompatGraph {
    vertices: Vec<LogRow>,
    words: usize,
    adjacency: Vec<Vec<u64>>,
}

impl CompatGraph {
    /// Graph on `vertices` with edges from `adjacent`, which must be
    /// symmetric; self-loops are dropped.
    pub fn from_fn(vertices: Vec<LogRow>, adjacent: impl Fn(usize, usize) -> bool) -> Self {
        let v = vertices.len();
        let words = v.div_ceil(64).max(1);
        let mut adjacency = vec![vec![0u64; words]; v];
        for a in 0..v {
            for b in a + 1..v {
                if adjacent(a, b) {
                    adjacency[a][b / 64] |= 1 << (b % 64);
                    adjacency[b][a / 64] |= 1 << (a % 64);
                }
            }
        }
        CompatGraph {
            vertices,
            words,
            adjacency,
        }
    }

    /// Abstract graph on `v` vertices (rows are left empty).
    pub fn from_edges(v: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = CompatGraph::from_fn(Vec::new(), |_, _| false);
        g.words = v.div_ceil(64).max(1);
        g.adjacency = vec![vec![0u64; g.words]; v];
        for &(a, b) in edges {
            if a != b {
                g.adjacency[a][b / 64] |= 1 << (b % 64);
                g.adjacency[b][a / 64] |= 1 << (a % 64);
            }
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency
            .iter()
            .map(|row| row.iter().map(|w| w.count_ones() as usize).sum::<usize>())
            .sum::<usize>()
            / 2
    }

    pub fn vertices(&self) -> &[LogRow] {
        &self.vertices
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b / 64] >> (b % 64) & 1 == 1
    }

    /// DIMACS `edge` format, vertices numbered from 1.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p edge {} {}", self.vertex_count(), self.edge_count()).unwrap();
        for a in 0..self.vertex_count() {
            for b in a + 1..self.vertex_count() {
                if self.adjacent(a, b) {
                    writeln!(out, "e {} {}", a + 1, b + 1).unwrap();
                }
            }
        }
        out
    }

    /// Whether the graph has a clique on `k` vertices.
    pub fn has_clique(&self, k: usize) -> bool {
        has_clique(self, k)
    }
}

/// `Γ(R)`: rows orthogonal to every row of `R` (and with some arrangement in
/// `O(n,q)`) that are greater than the last row, joined when orthogonal.
pub fn compatibility_graph(r: &LogMatrix, set: &VanishingSet) -> Result<CompatGraph> {
    if r.ncols() != set.n() || r.q() != set.q() {
        return Err(Error::DimensionMismatch {
            expected: set.n(),
            found: r.ncols(),
        });
    }
    let constraints = RowConstraints {
        above: (r.nrows() > 0).then(|| r.row(r.nrows() - 1).to_vec()),
        ..RowConstraints::default()
    };
    let rows = Extender::new(set).extensions(r, &constraints);
    Ok(graph_of_rows(rows, set))
}

pub(crate) fn graph_of_rows(rows: Vec<Vec<u8>>, set: &VanishingSet) -> CompatGraph {
    let q = set.q();
    let mut d = vec![0u8; set.n()];
    let adjacent = |a: &[u8], b: &[u8], d: &mut Vec<u8>| {
        for ((dj, &x), &y) in d.iter_mut().zip(a).zip(b) {
            *dj = sub_mod(x, y, q);
        }
        set.vanishes(d)
    };
    let v = rows.len();
    let words = v.div_ceil(64).max(1);
    let mut adjacency = vec![vec![0u64; words]; v];
    for a in 0..v {
        for b in a + 1..v {
            if adjacent(&rows[a], &rows[b], &mut d) {
                adjacency[a][b / 64] |= 1 << (b % 64);
                adjacency[b][a / 64] |= 1 << (a % 64);
            }
        }
    }
    CompatGraph {
        vertices: rows.into_iter().map(|x| LogRow::from_raw(q, x)).collect(),
        words,
        adjacency,
    }
}

/// Exact `k`-clique existence by branch and bound; candidates are bounded by
/// a greedy colouring, since a clique uses at most one vertex per colour.
pub fn has_clique(g: &CompatGraph, k: usize) -> bool {
    if k == 0 {
        return true;
    }
    let v = g.vertex_count();
    if k > v {
        return false;
    }
    if k == 1 {
        return true;
    }
    let mut cand = vec![0u64; g.words];
    for i in 0..v {
        cand[i / 64] |= 1 << (i % 64);
    }
    let mut search = CliqueSearch { g, k };
    search.expand(&cand, 0)
}

struct CliqueSearch<'g> {
    g: &'g CompatGraph,
    k: usize,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, cand: &[u64], size: usize) -> bool {
        let (order, colors) = self.color(cand);
        let mut cand = cand.to_vec();
        for idx in (0..order.len()).rev() {
            if size + colors[idx] < self.k {
                return false;
            }
            let v = order[idx];
            if size + 1 >= self.k {
                return true;
            }
            let next: Vec<u64> = cand
                .iter()
                .zip(&self.g.adjacency[v])
                .map(|(a, b)| a & b)
                .collect();
            if next.iter().any(|&w| w != 0) && self.expand(&next, size + 1) {
                return true;
            }
            cand[v / 64] &= !(1 << (v % 64));
        }
        false
    }

    /// Vertices of `cand` in nondecreasing colour order with their colours
    /// (starting at 1).
    fn color(&self, cand: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = cand.to_vec();
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut color = 0;
        while uncolored.iter().any(|&w| w != 0) {
            color += 1;
            let mut avail = uncolored.clone();
            while let Some(v) = first_set(&avail) {
                avail[v / 64] &= !(1 << (v % 64));
                uncolored[v / 64] &= !(1 << (v % 64));
                for (a, b) in avail.iter_mut().zip(&self.g.adjacency[v]) {
                    *a &= !b;
                }
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }
}

fn first_set(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}
