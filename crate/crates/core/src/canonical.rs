//! Canonical forms under monomial equivalence.
//!
//! A matrix `R` is canonical when its row-major vectorization is the least
//! among all `XRY*`. Every orbit minimum is dephased with sorted columns, so it
//! is one of the matrices `R^(σ,i)` obtained by reordering rows with `σ`,
//! making column `i` the first column, dephasing and sorting columns. The
//! [`Explorer`] walks the `(σ,i)` space one row at a time: the leading `k`
//! rows of `R^(σ,i)` depend only on `σ(1..k)` and `i`, so a prefix that
//! already compares greater than the target cuts off every completion.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::{add_mod, lex_compare, sub_mod, LogMatrix};

/// Row-major flattening of a matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vectorization {
    values: Vec<u8>,
    n: usize,
    q: u8,
}

impl Vectorization {
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn lex_compare(&self, other: &Vectorization) -> Result<Ordering> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch {
                left: self.q,
                right: other.q,
            });
        }
        lex_compare(&self.values, &other.values)
    }
}

pub fn vectorize(r: &LogMatrix) -> Vectorization {
    Vectorization {
        values: r.as_slice().to_vec(),
        n: r.ncols(),
        q: r.q(),
    }
}

/// A pair of monomial matrices acting by
/// `out[k][j] = M[row_perm[k]][col_perm[j]] + row_phase[k] + col_phase[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    pub row_perm: Vec<usize>,
    pub row_phase: Vec<u8>,
    pub col_perm: Vec<usize>,
    pub col_phase: Vec<u8>,
}

impl MonomialMap {
    pub fn identity(rows: usize, cols: usize) -> Self {
        MonomialMap {
            row_perm: (0..rows).collect(),
            row_phase: vec![0; rows],
            col_perm: (0..cols).collect(),
            col_phase: vec![0; cols],
        }
    }

    pub fn apply(&self, m: &LogMatrix) -> Result<LogMatrix> {
        if self.row_perm.len() != m.nrows() || self.col_perm.len() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows() * m.ncols(),
                found: self.row_perm.len() * self.col_perm.len(),
            });
        }
        let q = m.q();
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for (k, &i) in self.row_perm.iter().enumerate() {
            for (j, &l) in self.col_perm.iter().enumerate() {
                let e = add_mod(m.get(i, l), add_mod(self.row_phase[k], self.col_phase[j], q), q);
                data.push(e);
            }
        }
        Ok(LogMatrix::from_flat(q, m.nrows(), m.ncols(), data))
    }

    pub fn inverse(&self, q: u8) -> MonomialMap {
        let invert = |perm: &[usize], phase: &[u8]| {
            let mut p = vec![0; perm.len()];
            let mut ph = vec![0; perm.len()];
            for (k, &i) in perm.iter().enumerate() {
                p[i] = k;
                ph[i] = sub_mod(0, phase[k], q);
            }
            (p, ph)
        };
        let (row_perm, row_phase) = invert(&self.row_perm, &self.row_phase);
        let (col_perm, col_phase) = invert(&self.col_perm, &self.col_phase);
        MonomialMap {
            row_perm,
            row_phase,
            col_perm,
            col_phase,
        }
    }
}

/// `R^(σ,i)`: rows reordered by `sigma` (new row `k` is old row `sigma[k]`),
/// columns `0` and `i` swapped, dephased, then columns stably sorted as
/// top-to-bottom strings.
pub fn transform(r: &LogMatrix, sigma: &[usize], i: usize) -> Result<LogMatrix> {
    let n = r.ncols();
    if i >= n {
        return Err(Error::Precondition(format!("column {i} out of range")));
    }
    check_permutation(sigma, r.nrows())?;
    let mut cols: Vec<usize> = (0..n).collect();
    cols.swap(0, i);
    let d = r.permuted(sigma, &cols).dephase();
    let t = d.transpose();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| t.row(a).cmp(t.row(b)));
    let ident: Vec<usize> = (0..d.nrows()).collect();
    Ok(d.permuted(&ident, &order))
}

fn check_permutation(sigma: &[usize], r: usize) -> Result<()> {
    let mut seen = vec![false; r];
    if sigma.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: sigma.len(),
        });
    }
    for &s in sigma {
        if s >= r || seen[s] {
            return Err(Error::Precondition("sigma is not a permutation".into()));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Whether `v(R)` is minimal in its monomial orbit. `R` must be dephased.
pub fn is_canonical(r: &LogMatrix) -> Result<bool> {
    if !r.is_dephased() {
        return Err(Error::NotDephased);
    }
    Ok(is_canonical_unchecked(r))
}

/// [`is_canonical`] without the dephasing check; a matrix that is not
/// dephased is reported as not canonical.
pub(crate) fn is_canonical_unchecked(r: &LogMatrix) -> bool {
    if !r.is_dephased() {
        return false;
    }
    let mut ex = Explorer::new(r, Mode::Test);
    ex.run();
    !ex.found_smaller
}

/// The least matrix in the monomial orbit of `m`.
pub fn canonical_form(m: &LogMatrix) -> LogMatrix {
    canonical_form_with_map(m).0
}

/// The canonical form together with a map taking `m` to it.
pub fn canonical_form_with_map(m: &LogMatrix) -> (LogMatrix, MonomialMap) {
    let mut ex = Explorer::new(m, Mode::Minimize);
    ex.run();
    let (sigma, i, order) = ex.witness.clone().expect("some transform always completes");
    let q = m.q();
    let row_phase: Vec<u8> = sigma.iter().map(|&s| sub_mod(0, m.get(s, i), q)).collect();
    let a = sigma[0];
    let col_phase: Vec<u8> = order
        .iter()
        .map(|&j| sub_mod(m.get(a, i), m.get(a, j), q))
        .collect();
    let map = MonomialMap {
        row_perm: sigma,
        row_phase,
        col_perm: order,
        col_phase,
    };
    let form = LogMatrix::from_flat(q, m.nrows(), m.ncols(), ex.target);
    (form, map)
}

/// Number of pairs `(σ,i)` with `R^(σ,i) = R`.
pub fn transform_stabilizer(r: &LogMatrix) -> u64 {
    if !r.is_dephased() {
        return 0;
    }
    let mut ex = Explorer::new(r, Mode::Count);
    ex.run();
    ex.count
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Stop as soon as some transform is smaller than the matrix.
    Test,
    /// Track the least transform.
    Minimize,
    /// Count transforms equal to the matrix.
    Count,
}

struct Explorer<'a> {
    m: &'a LogMatrix,
    q: u8,
    r: usize,
    n: usize,
    mode: Mode,
    /// The matrix compared against: the input itself, or the best so far.
    target: Vec<u8>,
    /// Rows of `target` that are meaningful (only below `r` in minimize mode).
    valid: usize,
    found_smaller: bool,
    count: u64,
    witness: Option<(Vec<usize>, usize, Vec<usize>)>,
    witness_stale: bool,
    sigma: Vec<usize>,
    used: Vec<bool>,
    col: usize,
    /// `M[σ(0)][j] - M[σ(0)][col]`.
    base: Vec<u8>,
    /// Column order and cell ends used while computing row `L`.
    orders: Vec<Vec<usize>>,
    ends: Vec<Vec<usize>>,
    y: Vec<u8>,
    counts: Vec<usize>,
    row: Vec<u8>,
}

impl<'a> Explorer<'a> {
    fn new(m: &'a LogMatrix, mode: Mode) -> Self {
        let (r, n, q) = (m.nrows(), m.ncols(), m.q());
        let (target, valid) = match mode {
            Mode::Minimize => {
                let mut t = vec![0u8; r * n];
                if r == 0 {
                    t.clear();
                }
                (t, r.min(1))
            }
            _ => (m.as_slice().to_vec(), r),
        };
        Explorer {
            m,
            q,
            r,
            n,
            mode,
            target,
            valid,
            found_smaller: false,
            count: 0,
            witness: None,
            witness_stale: true,
            sigma: Vec::with_capacity(r),
            used: vec![false; r],
            col: 0,
            base: vec![0; n],
            orders: vec![Vec::with_capacity(n); r + 1],
            ends: vec![Vec::with_capacity(n); r + 1],
            y: vec![0; n],
            counts: vec![0; q as usize],
            row: vec![0; n],
        }
    }

    fn stop(&self) -> bool {
        self.found_smaller && self.mode == Mode::Test
    }

    fn run(&mut self) {
        let (r, n, q) = (self.r, self.n, self.q);
        if r == 0 {
            return;
        }
        if r == 1 {
            for i in 0..n {
                self.sigma = vec![0];
                self.col = i;
                self.orders[1] = (0..n).collect();
                self.leaf();
            }
            return;
        }
        // Level 1 depends on the ordered pair (a, c) and on the value
        // v = d[i] of d = M[c] - M[a] only: the row is Sort(d - v).
        let target1 = self.target_freq(1);
        let mut ties: Vec<(usize, usize, u8)> = Vec::new();
        let mut d = vec![0u8; n];
        let mut freq = vec![0usize; q as usize];
        for a in 0..r {
            for c in 0..r {
                if a == c {
                    continue;
                }
                freq.iter_mut().for_each(|f| *f = 0);
                for j in 0..n {
                    d[j] = sub_mod(self.m.get(c, j), self.m.get(a, j), q);
                    freq[d[j] as usize] += 1;
                }
                for v in 0..q {
                    if freq[v as usize] == 0 {
                        continue;
                    }
                    match compare_rotated(&freq, v, target1.as_deref()) {
                        Ordering::Greater => {}
                        Ordering::Equal => ties.push((a, c, v)),
                        Ordering::Less => match self.mode {
                            Mode::Test => {
                                self.found_smaller = true;
                                return;
                            }
                            Mode::Count => {}
                            Mode::Minimize => ties.push((a, c, v)),
                        },
                    }
                }
            }
        }
        for (a, c, v) in ties {
            // in minimize mode the target may have improved since the tie
            // was recorded
            if self.mode == Mode::Minimize {
                for (j, dj) in d.iter_mut().enumerate() {
                    *dj = sub_mod(sub_mod(self.m.get(c, j), self.m.get(a, j), q), v, q);
                }
                let mut f = vec![0usize; q as usize];
                d.iter().for_each(|&e| f[e as usize] += 1);
                let cmp = compare_rotated(&f, 0, self.target_freq(1).as_deref());
                if cmp == Ordering::Greater {
                    continue;
                }
            }
            for i in 0..n {
                let di = sub_mod(self.m.get(c, i), self.m.get(a, i), q);
                if di != v {
                    continue;
                }
                self.start(a, i);
                self.try_row(1, c);
                self.finish_start(a);
                if self.stop() {
                    return;
                }
            }
        }
    }

    fn target_freq(&self, level: usize) -> Option<Vec<usize>> {
        if level >= self.valid {
            return None;
        }
        let mut f = vec![0usize; self.q as usize];
        for &e in &self.target[level * self.n..(level + 1) * self.n] {
            f[e as usize] += 1;
        }
        Some(f)
    }

    fn start(&mut self, a: usize, i: usize) {
        let (n, q) = (self.n, self.q);
        self.col = i;
        self.sigma.clear();
        self.sigma.push(a);
        self.used[a] = true;
        let pivot = self.m.get(a, i);
        for j in 0..n {
            self.base[j] = sub_mod(self.m.get(a, j), pivot, q);
        }
        self.orders[1].clear();
        self.orders[1].extend(0..n);
        self.ends[1].clear();
        self.ends[1].push(n);
    }

    fn finish_start(&mut self, a: usize) {
        self.used[a] = false;
        self.sigma.clear();
    }

    fn descend(&mut self, level: usize) {
        if level == self.r {
            self.leaf();
            return;
        }
        for c in 0..self.r {
            if self.used[c] {
                continue;
            }
            self.try_row(level, c);
            if self.stop() {
                return;
            }
        }
    }

    /// Places source row `c` at transformed row `level`.
    fn try_row(&mut self, level: usize, c: usize) {
        let (n, q) = (self.n, self.q);
        let pivot = self.m.get(c, self.col);
        for j in 0..n {
            self.y[j] = sub_mod(sub_mod(self.m.get(c, j), pivot, q), self.base[j], q);
        }
        let cmp = if level < self.valid {
            self.compare_with_target(level)
        } else {
            Ordering::Less
        };
        match (cmp, self.mode) {
            (Ordering::Greater, _) => return,
            (Ordering::Less, Mode::Test) => {
                self.found_smaller = true;
                return;
            }
            (Ordering::Less, Mode::Count) => return,
            _ => {}
        }
        self.refine(level);
        if cmp == Ordering::Less {
            // new best prefix in minimize mode
            let start = level * self.n;
            self.target[start..start + n].copy_from_slice(&self.row);
            self.valid = level + 1;
            self.witness_stale = true;
        }
        self.used[c] = true;
        self.sigma.push(c);
        self.descend(level + 1);
        self.sigma.pop();
        self.used[c] = false;
    }

    /// Compares the sorted-within-cells row `y` against target row `level`.
    fn compare_with_target(&mut self, level: usize) -> Ordering {
        let target = &self.target[level * self.n..(level + 1) * self.n];
        let order = &self.orders[level];
        let mut start = 0;
        for &end in &self.ends[level] {
            if end - start == 1 {
                let v = self.y[order[start]];
                if v != target[start] {
                    return v.cmp(&target[start]);
                }
            } else {
                self.counts.iter_mut().for_each(|c| *c = 0);
                for &j in &order[start..end] {
                    self.counts[self.y[j] as usize] += 1;
                }
                let mut pos = start;
                for v in 0..self.q {
                    for _ in 0..self.counts[v as usize] {
                        if v != target[pos] {
                            return v.cmp(&target[pos]);
                        }
                        pos += 1;
                    }
                }
            }
            start = end;
        }
        Ordering::Equal
    }

    /// Stable refinement of the partition at `level` by `y`; fills `row` and
    /// the partition at `level + 1`.
    fn refine(&mut self, level: usize) {
        let (cur, next) = self.orders.split_at_mut(level + 1);
        let order = &cur[level];
        let next_order = &mut next[0];
        let (ecur, enext) = self.ends.split_at_mut(level + 1);
        let next_ends = &mut enext[0];
        next_order.clear();
        next_ends.clear();
        let mut start = 0;
        for &end in &ecur[level] {
            if end - start == 1 {
                let j = order[start];
                next_order.push(j);
                self.row[start] = self.y[j];
                next_ends.push(end);
            } else {
                self.counts.iter_mut().for_each(|c| *c = 0);
                for &j in &order[start..end] {
                    self.counts[self.y[j] as usize] += 1;
                }
                let mut pos = start;
                for v in 0..self.q {
                    let c = self.counts[v as usize];
                    if c == 0 {
                        continue;
                    }
                    for &j in &order[start..end] {
                        if self.y[j] == v {
                            next_order.push(j);
                        }
                    }
                    self.row[pos..pos + c].fill(v);
                    pos += c;
                    next_ends.push(pos);
                }
            }
            start = end;
        }
    }

    fn leaf(&mut self) {
        match self.mode {
            Mode::Count => self.count += 1,
            Mode::Minimize => {
                if self.witness_stale || self.witness.is_none() {
                    let order = self.orders[self.r].clone();
                    let order = if order.len() == self.n {
                        order
                    } else {
                        (0..self.n).collect()
                    };
                    self.witness = Some((self.sigma.clone(), self.col, order));
                    self.witness_stale = false;
                }
            }
            Mode::Test => {}
        }
    }
}

/// Compares `Sort(x - v)` (given by the counts of `x`) with the sorted row
/// whose counts are `target`; an absent target compares greater.
fn compare_rotated(freq: &[usize], v: u8, target: Option<&[usize]>) -> Ordering {
    let Some(target) = target else {
        return Ordering::Less;
    };
    let q = freq.len();
    for w in 0..q {
        let f = freq[(w + v as usize) % q];
        if f != target[w] {
            // more copies of the smaller residue sorts first
            return if f > target[w] {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
    }
    Ordering::Equal
}
