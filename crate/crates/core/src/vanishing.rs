//! The orthogonality set `O(n,q)`: sorted, zero-leading vectors of `Z_q^n`
//! whose root-of-unity sum vanishes.
//!
//! For `q` with at most two distinct prime divisors every vanishing sum splits
//! into rotated regular `p`-gons, `p | q` prime, so the set is assembled from
//! those blocks with integer arithmetic only.

use std::collections::BTreeSet;

use crate::arith::{binomial, factorize};
use crate::error::{Error, Result};
use crate::matrix::{sub_mod, LogRow};

/// Theorem-of-Lam–Leung existence test: `n` is a nonnegative integer
/// combination of the prime divisors of `q`.
pub fn exists_vanishing(n: usize, q: u32) -> bool {
    if n == 0 || q < 2 {
        return false;
    }
    let primes: Vec<usize> = factorize(q).into_iter().map(|(p, _)| p as usize).collect();
    let mut reachable = vec![false; n + 1];
    reachable[0] = true;
    for k in 1..=n {
        reachable[k] = primes.iter().any(|&p| p <= k && reachable[k - p]);
    }
    reachable[n]
}

/// `|O(n,q)|` for a prime power `q = p^a`.
pub fn count_vanishing_prime_power(n: usize, q: u32) -> Result<u128> {
    let f = factorize(q);
    if f.len() != 1 {
        return Err(Error::Precondition(format!("{q} is not a prime power")));
    }
    let p = f[0].0 as usize;
    if n == 0 || !n.is_multiple_of(p) {
        return Ok(0);
    }
    Ok(binomial(((n + q as usize) / p - 2) as u64, (n / p - 1) as u64))
}

/// `|O(n,2p)|` for an odd prime `p`.
pub fn count_vanishing_2p(n: usize, q: u32) -> Result<u128> {
    let f = factorize(q);
    if f.len() != 2 || f[0] != (2, 1) || f[1].1 != 1 {
        return Err(Error::Precondition(format!("{q} is not twice an odd prime")));
    }
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    let p = f[1].0 as usize;
    let mut total: u128 = 0;
    if n.is_multiple_of(2) {
        let h = n / 2;
        total += binomial((p + h - 2) as u64, (h - 1) as u64);
    }
    let mut t = 1;
    while p * t < n {
        let rest = n - p * t;
        if rest.is_multiple_of(2) {
            let s = rest / 2;
            total += binomial((p + s - 1) as u64, s as u64);
            total += binomial((p + s - 2) as u64, (s - 1) as u64);
        }
        t += 1;
    }
    if n.is_multiple_of(p) {
        total += 1;
    }
    Ok(total)
}

/// Precomputed `O(n,q)`, members in increasing lexicographic order.
#[derive(Clone, Debug)]
pub struct VanishingSet {
    n: usize,
    q: u8,
    members: Vec<Vec<u8>>,
}

impl VanishingSet {
    pub fn generate(n: usize, q: u32) -> Result<Self> {
        if !(2..=255).contains(&q) {
            return Err(Error::UnsupportedModulus {
                q,
                reason: "modulus must lie in 2..=255",
            });
        }
        let factors = factorize(q);
        if factors.len() > 2 {
            return Err(Error::UnsupportedModulus {
                q,
                reason: "three or more distinct prime factors; the rotated-polygon \
                         description of vanishing sums does not apply",
            });
        }
        if n == 0 {
            return Err(Error::Precondition("n must be positive".into()));
        }
        let qq = q as usize;
        let primes: Vec<usize> = factors.iter().map(|&(p, _)| p as usize).collect();
        let mut found = BTreeSet::new();
        for counts in block_counts(n, &primes) {
            // rotation multisets for each prime, as nondecreasing sequences
            let per_prime: Vec<Vec<Vec<usize>>> = primes
                .iter()
                .zip(&counts)
                .map(|(&p, &c)| multisets(c, qq / p))
                .collect();
            let mut choice = vec![0usize; primes.len()];
            loop {
                let picked: Vec<&Vec<usize>> =
                    choice.iter().enumerate().map(|(i, &k)| &per_prime[i][k]).collect();
                if picked.iter().any(|rot| rot.first() == Some(&0)) {
                    let mut x = Vec::with_capacity(n);
                    for (&p, rots) in primes.iter().zip(&picked) {
                        let step = qq / p;
                        for &r in rots.iter() {
                            x.extend((0..p).map(|k| ((r + k * step) % qq) as u8));
                        }
                    }
                    x.sort_unstable();
                    found.insert(x);
                }
                // odometer over the per-prime choices
                let mut i = 0;
                while i < choice.len() {
                    choice[i] += 1;
                    if choice[i] < per_prime[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == choice.len() {
                    break;
                }
            }
        }
        Ok(VanishingSet {
            n,
            q: q as u8,
            members: found.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Vec<u8>] {
        &self.members
    }

    pub fn rows(&self) -> impl Iterator<Item = LogRow> + '_ {
        self.members.iter().map(|m| LogRow::from_raw(self.q, m.clone()))
    }

    /// Membership of an already sorted vector.
    pub fn contains(&self, sorted: &[u8]) -> bool {
        self.members.binary_search_by(|m| m.as_slice().cmp(sorted)).is_ok()
    }

    /// Whether `E(x) = 0`, for any `x ∈ Z_q^n`.
    pub fn vanishes(&self, x: &[u8]) -> bool {
        if x.len() != self.n {
            return false;
        }
        let shift = x[0];
        let mut d: Vec<u8> = x.iter().map(|&e| sub_mod(e, shift, self.q)).collect();
        d.sort_unstable();
        self.contains(&d)
    }

    /// Whether some member starts with `prefix`.
    pub fn has_prefix(&self, prefix: &[u8]) -> bool {
        if prefix.len() > self.n {
            return false;
        }
        let k = prefix.len();
        let at = self.members.partition_point(|m| &m[..k] < prefix);
        at < self.members.len() && &self.members[at][..k] == prefix
    }

    /// Residue counts of each member, aligned with [`members`](Self::members).
    pub fn frequency_vectors(&self) -> Vec<Vec<u8>> {
        self.members
            .iter()
            .map(|m| {
                let mut f = vec![0u8; self.q as usize];
                for &e in m {
                    f[e as usize] += 1;
                }
                f
            })
            .collect()
    }
}

/// All `w` with `Σ w_i p_i = n`.
fn block_counts(n: usize, primes: &[usize]) -> Vec<Vec<usize>> {
    match primes {
        [p] => {
            if n.is_multiple_of(*p) {
                vec![vec![n / p]]
            } else {
                vec![]
            }
        }
        [p1, p2] => (0..=n / p1)
            .filter(|s| (n - s * p1).is_multiple_of(*p2))
            .map(|s| vec![s, (n - s * p1) / p2])
            .collect(),
        _ => unreachable!("at most two primes"),
    }
}

/// Nondecreasing sequences of length `len` over `0..range`.
fn multisets(len: usize, range: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, range: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in from..range {
            cur.push(v);
            rec(len, range, v, cur, out);
            cur.pop();
        }
    }
    rec(len, range, 0, &mut cur, &mut out);
    out
}

/// Orthogonality of two rows: `E(r1 - r2) = 0`.
pub fn is_orthogonal(r1: &LogRow, r2: &LogRow, set: &VanishingSet) -> Result<bool> {
    let d = r1.difference(r2)?;
    if d.len() != set.n() || d.q() != set.q() {
        return Err(Error::DimensionMismatch {
            expected: set.n(),
            found: d.len(),
        });
    }
    Ok(set.vanishes(d.entries()))
}

pub fn prefix_feasible(prefix: &LogRow, set: &VanishingSet) -> bool {
    set.has_prefix(prefix.entries())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(n: usize, q: u32) -> Vec<Vec<u8>> {
        VanishingSet::generate(n, q).unwrap().members().to_vec()
    }

    #[test]
    fn existence() {
        assert!(exists_vanishing(7, 6));
        assert!(!exists_vanishing(5, 4));
        for q in 2..30 {
            assert!(!exists_vanishing(1, q));
        }
    }

    #[test]
    fn small_sets() {
        assert_eq!(members(4, 2), vec![vec![0, 0, 1, 1]]);
        assert_eq!(
            members(8, 4),
            vec![
                vec![0, 0, 0, 0, 2, 2, 2, 2],
                vec![0, 0, 0, 1, 2, 2, 2, 3],
                vec![0, 0, 1, 1, 2, 2, 3, 3],
                vec![0, 1, 1, 1, 2, 3, 3, 3],
            ]
        );
        assert_eq!(members(16, 4).len(), 8);
        assert_eq!(members(6, 6).len(), 7);
        assert_eq!(members(2, 6), vec![vec![0, 3]]);
    }

    #[test]
    fn counting_formulas() {
        assert_eq!(count_vanishing_prime_power(16, 4).unwrap(), 8);
        assert_eq!(count_vanishing_prime_power(4, 2).unwrap(), 1);
        assert_eq!(count_vanishing_prime_power(9, 3).unwrap(), 1);
        assert_eq!(count_vanishing_prime_power(5, 4).unwrap(), 0);
        assert_eq!(count_vanishing_2p(6, 6).unwrap(), 7);
        assert_eq!(count_vanishing_2p(5, 6).unwrap(), 4);
        assert_eq!(count_vanishing_2p(2, 6).unwrap(), 1);
        assert!(count_vanishing_2p(4, 12).is_err());
    }

    #[test]
    fn three_primes_rejected() {
        assert!(matches!(
            VanishingSet::generate(6, 30),
            Err(Error::UnsupportedModulus { q: 30, .. })
        ));
    }

    #[test]
    fn orthogonality() {
        let o3 = VanishingSet::generate(3, 3).unwrap();
        let r = |q: u32, v: &[u8]| LogRow::new(q, v.to_vec()).unwrap();
        assert!(is_orthogonal(&r(3, &[0, 0, 0]), &r(3, &[0, 1, 2]), &o3).unwrap());
        let o2 = VanishingSet::generate(2, 2).unwrap();
        assert!(!is_orthogonal(&r(2, &[0, 0]), &r(2, &[0, 0]), &o2).unwrap());
        assert!(is_orthogonal(&r(3, &[0, 0, 0]), &r(3, &[0, 0]), &o3).is_err());
    }

    #[test]
    fn prefixes() {
        let o42 = VanishingSet::generate(4, 2).unwrap();
        let r = |q: u32, v: &[u8]| LogRow::new(q, v.to_vec()).unwrap();
        assert!(prefix_feasible(&r(2, &[0, 0, 1]), &o42));
        assert!(!prefix_feasible(&r(2, &[0, 1, 1]), &o42));
        let o84 = VanishingSet::generate(8, 4).unwrap();
        assert!(prefix_feasible(&r(4, &[0, 0, 0, 1]), &o84));
        assert!(!prefix_feasible(&r(4, &[0, 0, 0, 3]), &o84));
    }
}
