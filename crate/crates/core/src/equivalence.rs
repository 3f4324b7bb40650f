//! Automorphism group orders, equivalence tests and orbit counting.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::analysis::verify_butson;
use crate::arith::units;
use crate::canonical::canonical_form;
use crate::error::{Error, Result};
use crate::matrix::{sub_mod, LogMatrix};

/// Automorphism order of one matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutReport {
    pub id: String,
    pub aut_order: u64,
}

/// `|Aut(H)|` for a Butson matrix `H`.
pub fn aut_group_size(h: &LogMatrix) -> Result<u64> {
    if !verify_butson(h) {
        return Err(Error::NotButson);
    }
    Ok(monomial_stabilizer_order(h))
}

/// Order of `{(X,Y) : X M Y* = M}` for any matrix `M`.
///
/// An element maps row `k` to row `π(k)` with phase `a_k` and column `j` to
/// `τ(j)`; up to the global scalar (a factor `q`) we may take `a_0 = 0`.
/// Fixing the images of rows `0..k` pointwise, the admissible images of row
/// `k` form an orbit of the stabiliser, so the order is `q` times the
/// product of these orbit lengths.
pub(crate) fn monomial_stabilizer_order(m: &LogMatrix) -> u64 {
    let (r, q) = (m.nrows(), m.q());
    if r == 0 {
        return 1;
    }
    let mut order = q as u64;
    let mut fixed: Vec<(usize, u8)> = Vec::new();
    for k in 0..r {
        let mut orbit = 0u64;
        let phases = if k == 0 { 1 } else { q };
        for t in 0..r {
            for a in 0..phases {
                let mut forced = fixed.clone();
                forced.push((t, a));
                let mut s = AutSearch::new(m, &forced);
                if s.exists() {
                    orbit += 1;
                }
            }
        }
        order *= orbit;
        fixed.push((k, 0));
    }
    // columns left in common cells are interchangeable
    let mut s = AutSearch::new(m, &fixed);
    order * s.leaf_multiplicity().unwrap_or(1)
}

/// Backtracking over row images for automorphisms, with column cells refined
/// by the labels `M[k][j] - M[0][j] - a_k` on the source side and
/// `M[π(k)][l] - M[π(0)][l]` on the target side.
struct AutSearch<'a> {
    m: &'a LogMatrix,
    forced: &'a [(usize, u8)],
    used: Vec<bool>,
    pi: Vec<usize>,
    /// Per level: source column order, target column order, cell ends.
    src: Vec<Vec<usize>>,
    tgt: Vec<Vec<usize>>,
    ends: Vec<Vec<usize>>,
    multiplicity: Option<u64>,
}

impl<'a> AutSearch<'a> {
    fn new(m: &'a LogMatrix, forced: &'a [(usize, u8)]) -> Self {
        let (r, n) = (m.nrows(), m.ncols());
        let mut src = vec![Vec::new(); r + 1];
        let mut tgt = vec![Vec::new(); r + 1];
        let mut ends = vec![Vec::new(); r + 1];
        src[1] = (0..n).collect();
        tgt[1] = (0..n).collect();
        ends[1] = if n > 0 { vec![n] } else { vec![] };
        AutSearch {
            m,
            forced,
            used: vec![false; r],
            pi: Vec::with_capacity(r),
            src,
            tgt,
            ends,
            multiplicity: None,
        }
    }

    fn exists(&mut self) -> bool {
        let Some(&(s, a)) = self.forced.first() else {
            return false;
        };
        if a != 0 {
            return false;
        }
        self.used[s] = true;
        self.pi.push(s);
        let found = self.descend(1);
        self.pi.pop();
        self.used[s] = false;
        found
    }

    /// With every row forced, the number of column bijections compatible
    /// with the final cells.
    fn leaf_multiplicity(&mut self) -> Option<u64> {
        if self.exists() {
            self.multiplicity
        } else {
            None
        }
    }

    fn descend(&mut self, k: usize) -> bool {
        let r = self.m.nrows();
        if k == r {
            let mut mult = 1u64;
            let mut start = 0;
            for &end in &self.ends[r.max(1)] {
                mult *= (1..=(end - start) as u64).product::<u64>();
                start = end;
            }
            self.multiplicity = Some(mult);
            return true;
        }
        if let Some(&(t, a)) = self.forced.get(k) {
            return !self.used[t] && self.place(k, t, a);
        }
        for t in 0..r {
            if self.used[t] {
                continue;
            }
            for a in 0..self.m.q() {
                if self.place(k, t, a) {
                    return true;
                }
            }
        }
        false
    }

    fn place(&mut self, k: usize, t: usize, a: u8) -> bool {
        if !self.refine(k, t, a) {
            return false;
        }
        self.used[t] = true;
        self.pi.push(t);
        let found = self.descend(k + 1);
        self.pi.pop();
        self.used[t] = false;
        found
    }

    /// Splits every cell by the new labels; fails when a label occurs a
    /// different number of times on the two sides of some cell.
    fn refine(&mut self, k: usize, t: usize, a: u8) -> bool {
        let (m, q) = (self.m, self.m.q());
        let s = self.pi[0];
        let y = |j: usize| sub_mod(sub_mod(m.get(k, j), m.get(0, j), q), a, q);
        let z = |l: usize| sub_mod(m.get(t, l), m.get(s, l), q);
        let (cur_src, next_src) = self.src.split_at_mut(k + 1);
        let (cur_tgt, next_tgt) = self.tgt.split_at_mut(k + 1);
        let (cur_ends, next_ends) = self.ends.split_at_mut(k + 1);
        let (src, tgt, ends) = (&cur_src[k], &cur_tgt[k], &cur_ends[k]);
        let (ns, nt, ne) = (&mut next_src[0], &mut next_tgt[0], &mut next_ends[0]);
        ns.clear();
        nt.clear();
        ne.clear();
        let mut counts = vec![0i32; q as usize];
        let mut start = 0;
        for &end in ends {
            counts.iter_mut().for_each(|c| *c = 0);
            for idx in start..end {
                counts[y(src[idx]) as usize] += 1;
                counts[z(tgt[idx]) as usize] -= 1;
            }
            if counts.iter().any(|&c| c != 0) {
                return false;
            }
            for v in 0..q {
                let before = ns.len();
                ns.extend(src[start..end].iter().copied().filter(|&j| y(j) == v));
                nt.extend(tgt[start..end].iter().copied().filter(|&l| z(l) == v));
                if ns.len() > before {
                    ne.push(ns.len());
                }
            }
            start = end;
        }
        true
    }
}

pub fn are_equivalent(h1: &LogMatrix, h2: &LogMatrix) -> Result<bool> {
    if h1.q() != h2.q() {
        return Err(Error::ModulusMismatch {
            left: h1.q(),
            right: h2.q(),
        });
    }
    if h1.nrows() != h2.nrows() || h1.ncols() != h2.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h1.nrows() * h1.ncols(),
            found: h2.nrows() * h2.ncols(),
        });
    }
    Ok(canonical_form(h1) == canonical_form(h2))
}

/// `|G|` for `n×n` matrices over `Z_q`: `(n!)²·q^{2n}`.
pub fn group_order(n: usize, q: u32) -> BigUint {
    let fact: BigUint = (1..=n as u64).map(BigUint::from).product();
    let qpow = BigUint::from(q).pow(2 * n as u32);
    &fact * &fact * qpow
}

/// `|G|·Σ 1/|Aut(X)|`, the number of matrices in the given orbits.
pub fn total_count(aut_sizes: &[u64], n: usize, q: u32) -> Result<BigUint> {
    if aut_sizes.contains(&0) {
        return Err(Error::Precondition("automorphism orders must be positive".into()));
    }
    let g = BigRational::from_integer(group_order(n, q).into());
    let mut acc = BigRational::zero();
    for &a in aut_sizes {
        acc += BigRational::new(One::one(), a.into());
    }
    let total = g * acc;
    if !total.is_integer() {
        return Err(Error::NonIntegral(format!("orbit sum {total} is not an integer")));
    }
    total
        .to_integer()
        .to_biguint()
        .ok_or_else(|| Error::NonIntegral("negative orbit sum".into()))
}

/// [`total_count`] from `(|Aut|, frequency)` pairs.
pub fn total_count_from_table(table: &[(u64, u64)], n: usize, q: u32) -> Result<BigUint> {
    let g = BigRational::from_integer(group_order(n, q).into());
    let mut acc = BigRational::zero();
    for &(a, count) in table {
        if a == 0 {
            return Err(Error::Precondition("automorphism orders must be positive".into()));
        }
        acc += BigRational::new(count.into(), a.into());
    }
    let total = g * acc;
    if !total.is_integer() {
        return Err(Error::NonIntegral(format!("orbit sum {total} is not an integer")));
    }
    total
        .to_integer()
        .to_biguint()
        .ok_or_else(|| Error::NonIntegral("negative orbit sum".into()))
}

/// Number of monomial classes among `ψ(H)`, `ψ` ranging over `Aut(Z_q)`.
pub fn galois_orbit_size(h: &LogMatrix) -> usize {
    units(h.q())
        .into_iter()
        .map(|u| canonical_form(&h.scaled(u)))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Hadamard classes among a complete list of monomial classes:
/// `Σ k_i / i`, with `k_i` the number of representatives whose unit images
/// span `i` monomial classes.
pub fn hadamard_classes(reps: &[LogMatrix]) -> Result<u64> {
    let mut k: BTreeMap<usize, u64> = BTreeMap::new();
    for h in reps {
        *k.entry(galois_orbit_size(h)).or_default() += 1;
    }
    let mut acc = BigRational::zero();
    for (&i, &ki) in &k {
        acc += BigRational::new(ki.into(), i.into());
    }
    if !acc.is_integer() {
        return Err(Error::NonIntegral(format!(
            "Hadamard class sum {acc} is not an integer"
        )));
    }
    acc.to_integer()
        .to_u64()
        .ok_or_else(|| Error::NonIntegral("class count out of range".into()))
}

/// `(|Aut|, count)` pairs in decreasing order of `|Aut|`.
pub fn aut_frequency_table(aut_sizes: &[u64]) -> Vec<(u64, u64)> {
    let mut freq: BTreeMap<u64, u64> = BTreeMap::new();
    for &a in aut_sizes {
        *freq.entry(a).or_default() += 1;
    }
    freq.into_iter().rev().collect()
}

/// Aligned two-column text rendering of [`aut_frequency_table`].
pub fn format_frequency_table(table: &[(u64, u64)]) -> String {
    let w = table
        .iter()
        .map(|(a, _)| a.to_string().len())
        .max()
        .unwrap_or(0)
        .max(5);
    let mut out = format!("{:>w$}  {}\n", "|Aut|", "#");
    for (a, c) in table {
        out.push_str(&format!("{a:>w$}  {c}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::MonomialMap;

    fn m(q: u32, rows: &[&[u8]]) -> LogMatrix {
        LogMatrix::new(q, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Every `(π, a, τ, b)` checked directly.
    fn brute_aut(h: &LogMatrix) -> u64 {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for k in 0..n {
                    let mut np = p.clone();
                    np.insert(k, n - 1);
                    out.push(np);
                }
            }
            out
        }
        fn phases(n: usize, q: u8) -> Vec<Vec<u8>> {
            let mut out = vec![vec![]];
            for _ in 0..n {
                out = out
                    .into_iter()
                    .flat_map(|p| {
                        (0..q).map(move |v| {
                            let mut np = p.clone();
                            np.push(v);
                            np
                        })
                    })
                    .collect();
            }
            out
        }
        let (r, n, q) = (h.nrows(), h.ncols(), h.q());
        let mut count = 0;
        for rp in perms(r) {
            for cp in perms(n) {
                for a in phases(r, q) {
                    for b in phases(n, q) {
                        let map = MonomialMap {
                            row_perm: rp.clone(),
                            row_phase: a.clone(),
                            col_perm: cp.clone(),
                            col_phase: b,
                        };
                        if map.apply(h).unwrap() == *h {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn aut_of_small_matrices() {
        let f2 = m(2, &[&[0, 0], &[0, 1]]);
        assert_eq!(aut_group_size(&f2).unwrap(), 8);
        assert_eq!(brute_aut(&f2), 8);
        let f3 = LogMatrix::fourier(3).unwrap();
        assert_eq!(aut_group_size(&f3).unwrap(), brute_aut(&f3));
        let f4 = LogMatrix::fourier(4).unwrap();
        let c4 = canonical_form(&f4);
        assert_eq!(
            aut_group_size(&f4).unwrap(),
            4 * crate::canonical::transform_stabilizer(&c4)
        );
        assert!(aut_group_size(&m(2, &[&[0, 0], &[0, 0]])).is_err());
    }

    #[test]
    fn aut_of_non_hadamard_rows() {
        let x = m(2, &[&[0, 0, 1], &[0, 1, 1]]);
        assert_eq!(monomial_stabilizer_order(&x), brute_aut(&x));
        let y = m(3, &[&[0, 0, 0], &[0, 0, 1]]);
        assert_eq!(monomial_stabilizer_order(&y), brute_aut(&y));
    }

    #[test]
    fn equivalence_examples() {
        let f2 = m(2, &[&[0, 0], &[0, 1]]);
        assert!(are_equivalent(&f2, &m(2, &[&[1, 0], &[1, 1]])).unwrap());
        assert!(are_equivalent(&f2, &f2).unwrap());
        assert!(are_equivalent(&f2, &m(3, &[&[0, 0], &[0, 1]])).is_err());
    }

    #[test]
    fn totals() {
        assert_eq!(total_count(&[8], 2, 2).unwrap(), BigUint::from(8u32));
        let g = group_order(3, 3).to_u64().unwrap();
        assert_eq!(total_count(&[g], 3, 3).unwrap(), BigUint::from(1u32));
        assert!(total_count(&[7], 2, 2).is_err());
    }

    #[test]
    fn frequency_table() {
        let t = aut_frequency_table(&[4, 8, 4]);
        assert_eq!(t, vec![(8, 1), (4, 2)]);
        assert_eq!(format_frequency_table(&t), "|Aut|  #\n    8  1\n    4  2\n");
    }

    #[test]
    fn binary_matrices_have_trivial_galois_orbits() {
        let f2 = m(2, &[&[0, 0], &[0, 1]]);
        assert_eq!(hadamard_classes(&[f2]).unwrap(), 1);
    }
}
