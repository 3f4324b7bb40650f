//! Exact values of `‖E_{n,q}(x)‖²` from the frequency vector of `x`.

use crate::error::{Error, Result};
use crate::matrix::LogRow;

/// `‖E(x)‖²` for `q ∈ {2,3,4,6}`, or `2‖E(x)‖² = a + b·√5` for `q = 10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormValue {
    Integer(u64),
    Quadratic { a: i64, b: i64 },
}

impl NormValue {
    pub fn is_zero(&self) -> bool {
        match *self {
            NormValue::Integer(v) => v == 0,
            NormValue::Quadratic { a, b } => a == 0 && b == 0,
        }
    }

    /// The real value of `‖E‖²`.
    pub fn to_f64(&self) -> f64 {
        match *self {
            NormValue::Integer(v) => v as f64,
            NormValue::Quadratic { a, b } => (a as f64 + b as f64 * 5f64.sqrt()) / 2.0,
        }
    }
}

/// Moduli with an exact closed-form norm.
pub fn has_exact_norm(q: u8) -> bool {
    matches!(q, 2 | 3 | 4 | 6 | 10)
}

pub fn norm_squared(x: &LogRow) -> Result<NormValue> {
    let f: Vec<i64> = x.frequencies().into_iter().map(|c| c as i64).collect();
    norm_from_frequencies(&f, x.q())
}

/// Norm from residue counts `f[0..q]`.
pub fn norm_from_frequencies(f: &[i64], q: u8) -> Result<NormValue> {
    debug_assert_eq!(f.len(), q as usize);
    let value = match q {
        2 => {
            let d = f[0] - f[1];
            NormValue::Integer((d * d) as u64)
        }
        3 => NormValue::Integer(eisenstein_norm(f[0], f[1], f[2])),
        4 => {
            let (x, y) = (f[0] - f[2], f[1] - f[3]);
            NormValue::Integer((x * x + y * y) as u64)
        }
        6 => {
            // E = (x + z) - (y + z)·ζ with ζ = exp(iπ/3) and |a + bζ|² = a² + ab + b².
            let x = f[0] - f[3];
            let y = f[4] - f[1];
            let z = f[5] - f[2];
            let v = x * x + y * y + z * z - x * y + x * z + y * z;
            NormValue::Integer(v as u64)
        }
        10 => {
            let c = |k: usize| -> i64 { (0..10).map(|i| f[i] * f[(i + k) % 10]).sum() };
            let (c0, c1, c2, c3, c4, c5) = (c(0), c(1), c(2), c(3), c(4), c(5));
            NormValue::Quadratic {
                a: 2 * c0 - 2 * c5 + c1 - c2 + c3 - c4,
                b: c1 + c2 - c3 - c4,
            }
        }
        _ => {
            return Err(Error::UnsupportedModulus {
                q: q as u32,
                reason: "exact norms are available for q in {2,3,4,6,10}",
            })
        }
    };
    Ok(value)
}

#[inline]
fn eisenstein_norm(a: i64, b: i64, c: i64) -> u64 {
    (a * a + b * b + c * c - a * b - a * c - b * c) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(q: u32, v: &[u8]) -> LogRow {
        LogRow::new(q, v.to_vec()).unwrap()
    }

    fn float_norm(x: &[u8], q: u8) -> f64 {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for &e in x {
            let t = 2.0 * std::f64::consts::PI * e as f64 / q as f64;
            re += t.cos();
            im += t.sin();
        }
        re * re + im * im
    }

    #[test]
    fn examples() {
        assert_eq!(norm_squared(&row(2, &[0, 1])).unwrap(), NormValue::Integer(0));
        assert_eq!(norm_squared(&row(2, &[0, 0])).unwrap(), NormValue::Integer(4));
        assert_eq!(
            norm_squared(&row(10, &[0, 2, 4, 6, 8])).unwrap(),
            NormValue::Quadratic { a: 0, b: 0 }
        );
        assert_eq!(norm_squared(&row(4, &[0, 1, 2])).unwrap(), NormValue::Integer(1));
        assert!((float_norm(&[0, 1, 2], 4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sixth_roots_pairs() {
        // |1 + ω|² = 1 and |1 + ζ|² = 3 for ζ = exp(iπ/3), ω = ζ².
        assert_eq!(norm_squared(&row(6, &[0, 2])).unwrap(), NormValue::Integer(1));
        assert_eq!(norm_squared(&row(6, &[0, 1])).unwrap(), NormValue::Integer(3));
        assert_eq!(norm_squared(&row(6, &[0, 3])).unwrap(), NormValue::Integer(0));
    }

    #[test]
    fn rejects_other_moduli() {
        assert!(norm_squared(&row(5, &[0, 1])).is_err());
    }

    #[test]
    fn agrees_with_floating_point() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..10_000 {
            let q = [2u8, 3, 4, 6, 10][trial % 5];
            let n = rng.gen_range(1..=20);
            let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..q)).collect();
            let exact = norm_squared(&row(q as u32, &x)).unwrap().to_f64();
            assert!((exact - float_norm(&x, q)).abs() < 1e-6, "q={q} x={x:?}");
        }
    }
}
