//! Verification, constructions and the defect of Butson matrices.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{lcm, Cyclotomic};
use crate::error::{Error, Result};
use crate::matrix::{add_mod, sub_mod, LogMatrix};

/// Whether `M` is square with pairwise orthogonal rows, tested by exact
/// reduction modulo the `q`-th cyclotomic polynomial.
pub fn verify_butson(m: &LogMatrix) -> bool {
    if !m.is_square() || m.nrows() == 0 {
        return false;
    }
    let (n, q) = (m.ncols(), m.q());
    let cyc = Cyclotomic::new(q);
    let mut counts = vec![0i64; q as usize];
    for a in 0..n {
        for b in a + 1..n {
            counts.iter_mut().for_each(|c| *c = 0);
            for (&x, &y) in m.row(a).iter().zip(m.row(b)) {
                counts[sub_mod(x, y, q) as usize] += 1;
            }
            if cyc.reduce_counts(&counts).iter().any(|&c| c != 0) {
                return false;
            }
        }
    }
    true
}

fn require_butson(m: &LogMatrix) -> Result<()> {
    if verify_butson(m) {
        Ok(())
    } else {
        Err(Error::NotButson)
    }
}

/// `H ⊗ K` over `Z_lcm(q1,q2)`.
pub fn kronecker(h: &LogMatrix, k: &LogMatrix) -> Result<LogMatrix> {
    require_butson(h)?;
    require_butson(k)?;
    let l = lcm(h.q() as u32, k.q() as u32);
    if l > 255 {
        return Err(Error::UnsupportedModulus {
            q: l,
            reason: "lcm of the moduli exceeds 255",
        });
    }
    let (fh, fk) = (l / h.q() as u32, l / k.q() as u32);
    let (n1, n2) = (h.nrows(), k.nrows());
    let mut rows = vec![vec![0u8; n1 * n2]; n1 * n2];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let row = &mut rows[i1 * n2 + i2];
            for j1 in 0..n1 {
                for j2 in 0..n2 {
                    let e = h.get(i1, j1) as u32 * fh + k.get(i2, j2) as u32 * fk;
                    row[j1 * n2 + j2] = (e % l) as u8;
                }
            }
        }
    }
    LogMatrix::new(l, rows)
}

/// Replaces every entry by a 2×2 block of the given modulus.
fn blow_up(h: &LogMatrix, q: u32, block: impl Fn(u8) -> [[u8; 2]; 2]) -> Result<LogMatrix> {
    let n = h.nrows();
    let mut rows = vec![vec![0u8; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let b = block(h.get(i, j));
            for (a, brow) in b.iter().enumerate() {
                rows[2 * i + a][2 * j..2 * j + 2].copy_from_slice(brow);
            }
        }
    }
    LogMatrix::new(q, rows)
}

/// `A ⊗ [[1,1],[1,-1]] + B ⊗ [[-1,1],[1,1]]` for `H = A + iB ∈ BH(n,4)`,
/// a `BH(2n,2)`.
pub fn turyn_double(h: &LogMatrix) -> Result<LogMatrix> {
    if h.q() != 4 {
        return Err(Error::UnsupportedModulus {
            q: h.q() as u32,
            reason: "the doubling takes quaternary matrices",
        });
    }
    require_butson(h)?;
    blow_up(h, 2, |e| match e {
        0 => [[0, 0], [0, 1]],
        1 => [[1, 0], [0, 0]],
        2 => [[1, 1], [1, 0]],
        _ => [[0, 1], [1, 1]],
    })
}

/// `A ⊗ [[1,1],[1,-1]] + B ⊗ [[i,-1],[-1,i]]` for an unreal
/// `H = Aω + Bω² ∈ BH(n,6)`, a `BH(2n,4)`.
pub fn unreal6_to_quaternary(h: &LogMatrix) -> Result<LogMatrix> {
    if h.q() != 6 {
        return Err(Error::UnsupportedModulus {
            q: h.q() as u32,
            reason: "the construction takes sixth-root matrices",
        });
    }
    if h.as_slice().iter().any(|&e| e % 3 == 0) {
        return Err(Error::Precondition("matrix has a ±1 entry".into()));
    }
    require_butson(h)?;
    // log 2 = ω, 5 = -ω, 4 = ω², 1 = -ω²
    blow_up(h, 4, |e| match e {
        2 => [[0, 0], [0, 2]],
        5 => [[2, 2], [2, 0]],
        4 => [[1, 2], [2, 1]],
        _ => [[3, 0], [0, 3]],
    })
}

/// A monomially equivalent copy of `H ∈ BH(n,6)` without `±1` entries, if
/// one exists. Only the row and column phases modulo 3 matter.
pub fn find_unreal_form(h: &LogMatrix) -> Result<Option<LogMatrix>> {
    if h.q() != 6 {
        return Err(Error::UnsupportedModulus {
            q: h.q() as u32,
            reason: "unreal forms are defined for sixth roots",
        });
    }
    let (r, n) = (h.nrows(), h.ncols());
    if r == 0 {
        return Ok(Some(h.clone()));
    }
    let mut a = vec![0u8; r];
    loop {
        let mut b = Vec::with_capacity(n);
        for j in 0..n {
            let ok = (0..3u8).find(|&bj| (0..r).all(|i| !(h.get(i, j) + a[i] + bj).is_multiple_of(3)));
            match ok {
                Some(bj) => b.push(bj),
                None => break,
            }
        }
        if b.len() == n {
            let rows = (0..r)
                .map(|i| (0..n).map(|j| (h.get(i, j) + a[i] + b[j]) % 6).collect())
                .collect();
            return LogMatrix::new(6, rows).map(Some);
        }
        // next a with a[0] = 0
        let mut i = 1;
        while i < r {
            a[i] += 1;
            if a[i] < 3 {
                break;
            }
            a[i] = 0;
            i += 1;
        }
        if i >= r {
            return Ok(None);
        }
    }
}

/// Gaussian-integer 2×2 matrices, for the block identity behind
/// [`unreal6_to_quaternary`].
type Gauss2 = [[(i64, i64); 2]; 2];

fn gmul(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn mat_mul_adj(x: &Gauss2, y: &Gauss2) -> Gauss2 {
    let mut out = [[(0, 0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for k in 0..2 {
                let c = y[j][k];
                let p = gmul(x[i][k], (c.0, -c.1));
                cell.0 += p.0;
                cell.1 += p.1;
            }
        }
    }
    out
}

/// `XX* = YY* = -(XY* + YX*) = 2I` for `X = [[1,1],[1,-1]]`,
/// `Y = [[i,-1],[-1,i]]`.
pub fn quaternary_block_identity() -> bool {
    let x: Gauss2 = [[(1, 0), (1, 0)], [(1, 0), (-1, 0)]];
    let y: Gauss2 = [[(0, 1), (-1, 0)], [(-1, 0), (0, 1)]];
    let two_i: Gauss2 = [[(2, 0), (0, 0)], [(0, 0), (2, 0)]];
    let xy = mat_mul_adj(&x, &y);
    let yx = mat_mul_adj(&y, &x);
    let mut sum = [[(0, 0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            sum[i][j] = (-(xy[i][j].0 + yx[i][j].0), -(xy[i][j].1 + yx[i][j].1));
        }
    }
    mat_mul_adj(&x, &x) == two_i && mat_mul_adj(&y, &y) == two_i && sum == two_i
}

/// Result of [`defect`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectReport {
    pub id: String,
    pub defect: usize,
    pub rank: usize,
    pub variables: usize,
}

/// Integer coordinates of `ζ_q^e` in `{1, i}` (`q = 2, 4`) or `{1, ω}`
/// (`q = 3, 6`).
fn root_coordinates(q: u8, e: u8) -> Result<(i64, i64)> {
    Ok(match (q, e) {
        (2, 0) | (4, 0) | (3, 0) | (6, 0) => (1, 0),
        (2, 1) | (4, 2) | (6, 3) => (-1, 0),
        (4, 1) => (0, 1),
        (4, 3) => (0, -1),
        (3, 1) | (6, 2) => (0, 1),
        (3, 2) | (6, 4) => (-1, -1),
        (6, 1) => (1, 1),
        (6, 5) => (0, -1),
        _ => {
            return Err(Error::UnsupportedModulus {
                q: q as u32,
                reason: "defect needs q in {2,3,4,6}",
            })
        }
    })
}

/// The real linear system whose kernel dimension is the defect: unknowns
/// `θ_jl`, `1 ≤ j,l < n` (row-major), one complex equation
/// `Σ_l H_jl·conj(H_kl)·(θ_jl - θ_kl) = 0` per row pair, split into its two
/// integer coordinates.
pub fn defect_system(h: &LogMatrix) -> Result<Vec<Vec<i64>>> {
    let (n, q) = (h.nrows(), h.q());
    root_coordinates(q, 0)?;
    require_butson(h)?;
    let vars = (n - 1) * (n - 1);
    let var = |j: usize, l: usize| (j - 1) * (n - 1) + (l - 1);
    let mut rows = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let mut re = vec![0i64; vars];
            let mut im = vec![0i64; vars];
            for l in 1..n {
                let (c0, c1) = root_coordinates(q, sub_mod(h.get(j, l), h.get(k, l), q))?;
                if j > 0 {
                    re[var(j, l)] += c0;
                    im[var(j, l)] += c1;
                }
                re[var(k, l)] -= c0;
                im[var(k, l)] -= c1;
            }
            for eq in [re, im] {
                if eq.iter().any(|&c| c != 0) {
                    rows.push(eq);
                }
            }
        }
    }
    Ok(rows)
}

/// Exact rank by fraction-free (Bareiss) elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..width {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            for c in col + 1..width {
                let v = &a[i][c] * &a[rank][col] - &a[i][col] * &a[rank][c];
                a[i][c] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

pub fn defect(h: &LogMatrix) -> Result<DefectReport> {
    let rows = defect_system(h)?;
    let n = h.nrows();
    let variables = (n - 1) * (n - 1);
    let rank = integer_rank(&rows);
    Ok(DefectReport {
        id: String::new(),
        defect: variables - rank,
        rank,
        variables,
    })
}

/// Whether the defect vanishes, which makes `H` isolated.
pub fn is_isolated(h: &LogMatrix) -> Result<bool> {
    Ok(defect(h)?.defect == 0)
}

/// Entrywise sum of two log matrices of equal shape and modulus.
pub fn add(a: &LogMatrix, b: &LogMatrix) -> Result<LogMatrix> {
    if a.q() != b.q() {
        return Err(Error::ModulusMismatch {
            left: a.q(),
            right: b.q(),
        });
    }
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows() * a.ncols(),
            found: b.nrows() * b.ncols(),
        });
    }
    let q = a.q();
    let rows = (0..a.nrows())
        .map(|i| {
            a.row(i)
                .iter()
                .zip(b.row(i))
                .map(|(&x, &y)| add_mod(x, y, q))
                .collect()
        })
        .collect();
    LogMatrix::new(q as u32, rows)
}
