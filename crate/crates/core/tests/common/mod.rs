#![allow(dead_code)]

use std::f64::consts::TAU;

use butson::canonical::is_canonical;
use butson::extend::{extensions_naive, Extender};
use butson::{LogMatrix, VanishingSet};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

pub const EPS: f64 = 1e-9;

pub fn root(q: u8, e: u8) -> (f64, f64) {
    let t = TAU * e as f64 / q as f64;
    (t.cos(), t.sin())
}

/// Floating-point test that the roots `ζ_q^x` sum to zero.
pub fn vanishes_numeric(x: &[u8], q: u8) -> bool {
    let (re, im) = x.iter().fold((0.0, 0.0), |(a, b), &e| {
        let (c, s) = root(q, e);
        (a + c, b + s)
    });
    re.abs() < EPS && im.abs() < EPS
}

pub fn orthogonal_numeric(a: &[u8], b: &[u8], q: u8) -> bool {
    let d: Vec<u8> = a.iter().zip(b).map(|(&x, &y)| (x + q - y) % q).collect();
    vanishes_numeric(&d, q)
}

pub fn butson_numeric(m: &LogMatrix) -> bool {
    let q = m.q();
    let rows = m.to_rows();
    rows.iter()
        .tuple_combinations()
        .all(|(a, b)| orthogonal_numeric(a, b, q))
}

/// Least dephased matrix over every row and column permutation; phases are
/// forced once both permutations are fixed.
pub fn brute_canonical(m: &LogMatrix) -> LogMatrix {
    let (r, n) = (m.nrows(), m.ncols());
    let mut best: Option<LogMatrix> = None;
    for sigma in (0..r).permutations(r) {
        for tau in (0..n).permutations(n) {
            let c = m.permuted(&sigma, &tau).dephase();
            if best.as_ref().is_none_or(|b| c.as_slice() < b.as_slice()) {
                best = Some(c);
            }
        }
    }
    best.expect("at least one permutation")
}

/// Random monomial image `D₁ P H Q D₂` of `h`.
pub fn random_monomial(h: &LogMatrix, rng: &mut impl Rng) -> LogMatrix {
    let (r, n, q) = (h.nrows(), h.ncols(), h.q());
    let mut sigma: Vec<usize> = (0..r).collect();
    let mut tau: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    tau.shuffle(rng);
    let p = h.permuted(&sigma, &tau);
    let a: Vec<u8> = (0..r).map(|_| rng.gen_range(0..q)).collect();
    let b: Vec<u8> = (0..n).map(|_| rng.gen_range(0..q)).collect();
    let rows = (0..r)
        .map(|i| (0..n).map(|j| (p.get(i, j) + a[i] + b[j]) % q).collect())
        .collect();
    LogMatrix::new(q as u32, rows).unwrap()
}

/// Children of a canonical partial matrix as the search defines them,
/// computed from the rearrangement generator alone.
pub fn canonical_children(r: &LogMatrix, set: &VanishingSet) -> Vec<LogMatrix> {
    extensions_naive(r, set)
        .unwrap()
        .filter_map(|x| {
            let mut c = r.clone();
            c.push_row(x.entries()).unwrap();
            let col = c.column(1);
            (set.has_prefix(&col) && is_canonical(&c).unwrap()).then_some(c)
        })
        .collect()
}

/// Random walk down the search tree to a node with `rows` rows, or to the
/// deepest node met on the way.
pub fn sample_canonical_partial(
    set: &VanishingSet,
    rows: usize,
    rng: &mut impl Rng,
) -> LogMatrix {
    let mut r = LogMatrix::zeros(1, set.n(), set.q() as u32).unwrap();
    while r.nrows() < rows {
        let kids = canonical_children(&r, set);
        match kids.choose(rng) {
            Some(k) => r = k.clone(),
            None => break,
        }
    }
    r
}

/// Every node on a random root-to-leaf path of the search tree, stepping
/// with the library's generator.
pub fn walk(set: &VanishingSet, rng: &mut impl Rng) -> Vec<LogMatrix> {
    let ext = Extender::new(set);
    let mut path = vec![LogMatrix::zeros(1, set.n(), set.q() as u32).unwrap()];
    loop {
        let last = path.last().unwrap();
        if last.nrows() == set.n() {
            return path;
        }
        let kids: Vec<LogMatrix> = ext
            .extensions(last, &ext.canonical_constraints(last))
            .into_iter()
            .map(|x| {
                let mut c = last.clone();
                c.push_row(&x).unwrap();
                c
            })
            .filter(|c| is_canonical(c).unwrap())
            .collect();
        match kids.choose(rng) {
            Some(k) => path.push(k.clone()),
            None => return path,
        }
    }
}
