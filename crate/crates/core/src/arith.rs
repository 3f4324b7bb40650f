//! Small integer helpers: factorisation, binomials, units, cyclotomic reduction.

use num_integer::Integer;

/// Distinct prime factors with multiplicities, in increasing order.
pub fn factorize(mut q: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut a = 0;
            while q.is_multiple_of(p) {
                q /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += 1;
    }
    if q > 1 {
        out.push((q, 1));
    }
    out
}

pub fn distinct_primes(q: u32) -> Vec<u32> {
    factorize(q).into_iter().map(|(p, _)| p).collect()
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// Units of `Z_q`, i.e. the automorphisms `e ↦ u·e` of the additive group.
pub fn units(q: u8) -> Vec<u8> {
    (1..q).filter(|&u| (u as u32).gcd(&(q as u32)) == 1).collect()
}

/// Integer polynomial arithmetic modulo the `q`-th cyclotomic polynomial.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    q: u8,
    /// `t^k mod Φ_q` for `k in 0..q`, as coefficient vectors of length `deg Φ_q`.
    powers: Vec<Vec<i64>>,
}

impl Cyclotomic {
    pub fn new(q: u8) -> Self {
        let phi = cyclotomic_polynomial(q as usize);
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(q as usize);
        let mut cur = vec![0i64; degree.max(1)];
        cur[0] = 1;
        for _ in 0..q {
            powers.push(cur[..degree].to_vec());
            // multiply by t, then reduce the leading term with the monic Φ_q
            let mut next = vec![0i64; degree + 1];
            next[1..=degree].copy_from_slice(&cur[..degree]);
            let lead = next[degree];
            if lead != 0 {
                for (k, &c) in phi[..degree].iter().enumerate() {
                    next[k] -= lead * c;
                }
            }
            next.truncate(degree);
            cur = next;
            if cur.is_empty() {
                cur.push(0);
            }
        }
        Cyclotomic { q, powers }
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    /// Reduces `Σ counts[k] · ζ^k` to the power basis of `Q(ζ_q)`.
    pub fn reduce_counts(&self, counts: &[i64]) -> Vec<i64> {
        let degree = self.powers[0].len();
        let mut acc = vec![0i64; degree];
        for (k, &c) in counts.iter().enumerate() {
            if c != 0 {
                for (a, &p) in acc.iter_mut().zip(&self.powers[k]) {
                    *a += c * p;
                }
            }
        }
        acc
    }

    /// Whether `Σ ζ^{x_i}` is exactly zero.
    pub fn vanishes(&self, x: &[u8]) -> bool {
        let mut counts = vec![0i64; self.q as usize];
        for &e in x {
            counts[e as usize] += 1;
        }
        self.reduce_counts(&counts).iter().all(|&c| c == 0)
    }
}

/// Coefficients (constant term first) of `Φ_n`.
fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    // t^n - 1 divided by Φ_d for every proper divisor d of n
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        num = divide_exact(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[k + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(distinct_primes(30), vec![2, 3, 5]);
        assert_eq!(factorize(17), vec![(17, 1)]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 7), 8);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(10), vec![1, -1, 1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn vanishing_examples() {
        assert!(Cyclotomic::new(30).vanishes(&[0, 1, 7, 13, 19, 20]));
        assert!(Cyclotomic::new(6).vanishes(&[0, 3]));
        assert!(!Cyclotomic::new(6).vanishes(&[0, 2]));
        assert!(Cyclotomic::new(2).vanishes(&[0, 1]));
        assert!(!Cyclotomic::new(2).vanishes(&[0, 0]));
    }

    #[test]
    fn units_of_zq() {
        assert_eq!(units(12), vec![1, 5, 7, 11]);
        assert_eq!(units(2), vec![1]);
    }
}
