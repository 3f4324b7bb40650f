//! Candidate next rows of a partial matrix.
//!
//! Three generators produce the rows `x` with `x[0] = 0`, `Sort(x) ∈ O(n,q)`
//! and `E(r - x) = 0` for every row `r` of the partial matrix:
//!
//! * [`extensions_naive`] walks the distinct rearrangements of every member of
//!   `O(n,q)` and filters them;
//! * [`extensions_hashed`] splits `x = [c, d]`, tabulates the suffixes `d` by a
//!   hash of the partial norms `‖E(b_i - d)‖²` and probes the table with the
//!   matching prefix norms;
//! * [`Extender`] builds `x` coordinate by coordinate and keeps, for each row,
//!   the set of members of `O(n,q)` whose residue counts still dominate the
//!   partial difference. It additionally honours [`RowConstraints`], which the
//!   search uses to skip rows that cannot yield canonical children.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::{sub_mod, LogMatrix, LogRow};
use crate::norm::{has_exact_norm, norm_from_frequencies, NormValue};
use crate::vanishing::VanishingSet;

/// Default modulus of the bucket hash.
pub const DEFAULT_P_BIG: u64 = 1_000_000_007;
/// Weight of `B²` in the `q = 10` scalar `A² + P·B²`.
pub const QUADRATIC_PRIME: u64 = 1009;
/// Default memory cap for extension tables (2 GiB).
pub const DEFAULT_MEMORY_CAP: u64 = 2 << 30;

fn rows_with_zero(r: &LogMatrix) -> Vec<Vec<u8>> {
    let mut rows: Vec<Vec<u8>> = r.to_rows();
    if !rows.iter().any(|row| row.iter().all(|&e| e == 0)) {
        rows.insert(0, vec![0; r.ncols()]);
    }
    rows
}

fn check_shape(r: &LogMatrix, set: &VanishingSet) -> Result<()> {
    if r.ncols() != set.n() {
        return Err(Error::DimensionMismatch {
            expected: set.n(),
            found: r.ncols(),
        });
    }
    if r.q() != set.q() {
        return Err(Error::ModulusMismatch {
            left: r.q(),
            right: set.q(),
        });
    }
    Ok(())
}

fn orthogonal_to_all(x: &[u8], rows: &[Vec<u8>], set: &VanishingSet) -> bool {
    let q = set.q();
    let mut d = vec![0u8; x.len()];
    rows.iter().all(|row| {
        for ((dj, &a), &b) in d.iter_mut().zip(row).zip(x) {
            *dj = sub_mod(a, b, q);
        }
        set.vanishes(&d)
    })
}

/// Rearrangement-based extension; yields rows in lexicographic order within
/// each member of `O(n,q)`.
pub fn extensions_naive<'a>(
    r: &'a LogMatrix,
    set: &'a VanishingSet,
) -> Result<impl Iterator<Item = LogRow> + 'a> {
    check_shape(r, set)?;
    let rows = rows_with_zero(r);
    let q = set.q();
    Ok(set
        .members()
        .iter()
        .flat_map(|m| ZeroLedPermutations::new(m))
        .filter(move |x| orthogonal_to_all(x, &rows, set))
        .map(move |x| LogRow::from_raw(q, x)))
}

/// Distinct rearrangements of a sorted multiset that keep a `0` in front.
struct ZeroLedPermutations {
    cur: Option<Vec<u8>>,
}

impl ZeroLedPermutations {
    fn new(sorted: &[u8]) -> Self {
        let cur = (sorted.first() == Some(&0)).then(|| sorted.to_vec());
        ZeroLedPermutations { cur }
    }
}

impl Iterator for ZeroLedPermutations {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        let out = self.cur.take()?;
        let mut next = out.clone();
        if next_permutation(&mut next[1..]) {
            self.cur = Some(next);
        }
        Some(out)
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// The per-row scalar fed into the bucket hash.
fn norm_scalar(v: &NormValue) -> u64 {
    match *v {
        NormValue::Integer(s) => s,
        NormValue::Quadratic { a, b } => {
            (a * a) as u64 + QUADRATIC_PRIME * (b * b) as u64
        }
    }
}

/// `Σ s_i·p_i mod p_big`, `s_i` the integer norm or `A_i² + P·B_i²`.
pub fn hash_key(partial_norms: &[NormValue], primes: &[u64], p_big: u64) -> Result<u64> {
    if primes.len() < partial_norms.len() {
        return Err(Error::DimensionMismatch {
            expected: partial_norms.len(),
            found: primes.len(),
        });
    }
    if p_big == 0 {
        return Err(Error::Precondition("p_big must be positive".into()));
    }
    let mut acc: u128 = 0;
    for (v, &p) in partial_norms.iter().zip(primes) {
        acc = (acc + norm_scalar(v) as u128 % p_big as u128 * p as u128) % p_big as u128;
    }
    Ok(acc as u64)
}

/// The first `count` odd primes.
pub fn odd_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = 3u64;
    while out.len() < count {
        if (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            out.push(p);
        }
        p += 2;
    }
    out
}

/// Constraints a produced row must meet in addition to orthogonality.
#[derive(Clone, Debug, Default)]
pub struct RowConstraints {
    /// `x[j] >= x[j-1]` wherever `nondecreasing[j]` holds.
    pub nondecreasing: Vec<bool>,
    /// Rows must be strictly greater than this one.
    pub above: Option<Vec<u8>>,
    /// Admissible values of `x[1]`, indexed by residue.
    pub second: Option<Vec<bool>>,
    /// Members of `O(n,q)` allowed as sorted normalized differences between
    /// the new row and each existing row (the generator honours this; the
    /// hash join ignores it).
    pub differences: Option<Vec<bool>>,
}

impl RowConstraints {
    /// Constraints under which `R + x` can be canonical with its second
    /// column a prefix of a member of `O(n,q)`: columns of `R` that are
    /// equal stay sorted, rows increase.
    pub fn canonical_child(r: &LogMatrix, set: &VanishingSet) -> Self {
        let n = r.ncols();
        let mut nondecreasing = vec![false; n];
        for (j, flag) in nondecreasing.iter_mut().enumerate().skip(1) {
            *flag = r.rows().all(|row| row[j] == row[j - 1]);
        }
        let above = (r.nrows() > 0).then(|| r.row(r.nrows() - 1).to_vec());
        let second = (n > 1).then(|| {
            let mut col: Vec<u8> = r.column(1);
            col.push(0);
            (0..set.q())
                .map(|v| {
                    *col.last_mut().unwrap() = v;
                    set.has_prefix(&col)
                })
                .collect()
        });
        RowConstraints {
            nondecreasing,
            above,
            second,
            differences: None,
        }
    }

    fn admits(&self, x: &[u8]) -> bool {
        let monotone = x
            .windows(2)
            .enumerate()
            .all(|(k, w)| !self.nondecreasing.get(k + 1).copied().unwrap_or(false) || w[0] <= w[1]);
        monotone
            && self.above.as_ref().is_none_or(|a| x > a.as_slice())
            && match (&self.second, x.get(1)) {
                (Some(s), Some(&v)) => s[v as usize],
                _ => true,
            }
    }

    fn monotone_at(&self, j: usize) -> bool {
        self.nondecreasing.get(j).copied().unwrap_or(false)
    }
}

/// Tunables for [`build_table`].
#[derive(Clone, Debug)]
pub struct HashConfig {
    pub p_big: u64,
    /// Row weights; defaults to the first odd primes.
    pub primes: Option<Vec<u64>>,
    pub memory_cap: u64,
}

impl Default for HashConfig {
    fn default() -> Self {
        HashConfig {
            p_big: DEFAULT_P_BIG,
            primes: None,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

/// Suffixes `d ∈ Z_q^m` bucketed by the hash of `‖E(b_i - d)‖²`.
#[derive(Clone, Debug)]
pub struct ExtensionTable {
    m: usize,
    n: usize,
    q: u8,
    primes: Vec<u64>,
    p_big: u64,
    /// Row data the table was built for; the implicit zero row comes first
    /// when the matrix has none.
    rows: Vec<Vec<u8>>,
    /// Suffixes stored contiguously, grouped by key.
    suffixes: Vec<u8>,
    buckets: HashMap<u64, (usize, usize)>,
}

impl ExtensionTable {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn p_big(&self) -> u64 {
        self.p_big
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn len(&self) -> usize {
        self.suffixes.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }

    /// Suffixes stored under `key`.
    pub fn bucket(&self, key: u64) -> impl Iterator<Item = &[u8]> + '_ {
        let (s, e) = self.buckets.get(&key).copied().unwrap_or((0, 0));
        self.suffixes[s * self.m..e * self.m].chunks_exact(self.m)
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.buckets.keys().copied()
    }
}

/// Estimated table footprint in bytes.
pub fn table_bytes(q: u8, m: usize) -> u64 {
    (q as f64).powi(m as i32).min(u64::MAX as f64 / 64.0) as u64 * (m as u64 + 16)
}

/// Builds the suffix table of `r` (rows used as given, without adding an
/// implicit zero row).
pub fn build_table(r: &LogMatrix, m: usize, cfg: &HashConfig) -> Result<ExtensionTable> {
    build_table_rows(r.to_rows(), r.ncols(), r.q(), m, cfg, &RowConstraints::default())
}

fn build_table_rows(
    rows: Vec<Vec<u8>>,
    n: usize,
    q: u8,
    m: usize,
    cfg: &HashConfig,
    constraints: &RowConstraints,
) -> Result<ExtensionTable> {
    if !has_exact_norm(q) {
        return Err(Error::UnsupportedModulus {
            q: q as u32,
            reason: "hashed extension needs q in {2,3,4,6,10}",
        });
    }
    if m == 0 || m >= n {
        return Err(Error::Precondition(format!("suffix length {m} must lie in 1..{n}")));
    }
    let needed = table_bytes(q, m);
    if needed > cfg.memory_cap {
        return Err(Error::MemoryBudget {
            needed,
            cap: cfg.memory_cap,
        });
    }
    let primes = match &cfg.primes {
        Some(p) if p.len() >= rows.len() => p.clone(),
        Some(p) => {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: p.len(),
            })
        }
        None => odd_primes(rows.len()),
    };
    let off = n - m;
    let mut entries: Vec<(u64, Vec<u8>)> = Vec::new();
    let mut d = vec![0u8; m];
    let mut norms = Vec::with_capacity(rows.len());
    let mut freq = vec![0i64; q as usize];
    enumerate_monotone(m, q, |j| constraints.monotone_at(off + j) && j > 0, &mut d, &mut |d| {
        norms.clear();
        for row in &rows {
            freq.iter_mut().for_each(|f| *f = 0);
            for (k, &e) in d.iter().enumerate() {
                freq[sub_mod(row[off + k], e, q) as usize] += 1;
            }
            norms.push(norm_from_frequencies(&freq, q).expect("supported modulus"));
        }
        let key = hash_key(&norms, &primes, cfg.p_big).expect("enough primes");
        entries.push((key, d.to_vec()));
    });
    entries.sort_by_key(|e| e.0);
    let mut suffixes = Vec::with_capacity(entries.len() * m);
    let mut buckets = HashMap::new();
    let mut k = 0;
    while k < entries.len() {
        let key = entries[k].0;
        let start = k;
        while k < entries.len() && entries[k].0 == key {
            suffixes.extend_from_slice(&entries[k].1);
            k += 1;
        }
        buckets.insert(key, (start, k));
    }
    Ok(ExtensionTable {
        m,
        n,
        q,
        primes,
        p_big: cfg.p_big,
        rows,
        suffixes,
        buckets,
    })
}

/// Calls `f` on every `x ∈ Z_q^len` in lexicographic order, skipping those
/// with `x[j] < x[j-1]` where `mono(j)`.
fn enumerate_monotone(
    len: usize,
    q: u8,
    mono: impl Fn(usize) -> bool,
    x: &mut [u8],
    f: &mut impl FnMut(&[u8]),
) {
    fn rec(
        j: usize,
        len: usize,
        q: u8,
        mono: &dyn Fn(usize) -> bool,
        x: &mut [u8],
        f: &mut dyn FnMut(&[u8]),
    ) {
        if j == len {
            f(x);
            return;
        }
        let lo = if j > 0 && mono(j) { x[j - 1] } else { 0 };
        for v in lo..q {
            x[j] = v;
            rec(j + 1, len, q, mono, x, f);
        }
    }
    rec(0, len, q, &mono, x, f);
}

/// Hash-join extension of `r` probing `table` (built from `r`).
pub fn extensions_hashed(
    r: &LogMatrix,
    table: &ExtensionTable,
    set: &VanishingSet,
) -> Result<Vec<LogRow>> {
    check_shape(r, set)?;
    if table.n != r.ncols() || table.q != r.q() || table.rows != r.to_rows() {
        return Err(Error::Precondition("table was built for another matrix".into()));
    }
    let rows = rows_with_zero(r);
    let q = r.q();
    Ok(probe(table, &rows, set, &RowConstraints::default())
        .into_iter()
        .map(|x| LogRow::from_raw(q, x))
        .collect())
}

/// Hashed extension with the search constraints pushed into both halves.
pub(crate) fn extensions_hashed_constrained(
    r: &LogMatrix,
    m: usize,
    set: &VanishingSet,
    cfg: &HashConfig,
    constraints: &RowConstraints,
) -> Result<Vec<Vec<u8>>> {
    let rows = rows_with_zero(r);
    let table = build_table_rows(rows.clone(), r.ncols(), r.q(), m, cfg, constraints)?;
    Ok(probe(&table, &rows, set, constraints))
}

fn probe(
    table: &ExtensionTable,
    rows: &[Vec<u8>],
    set: &VanishingSet,
    constraints: &RowConstraints,
) -> Vec<Vec<u8>> {
    let (n, m, q) = (table.n, table.m, table.q);
    let off = n - m;
    let mut out = Vec::new();
    let c = vec![0u8; off];
    let mut norms = Vec::with_capacity(table.rows.len());
    let mut freq = vec![0i64; q as usize];
    let mut x = vec![0u8; n];
    // c[0] = 0 is pinned; the remaining prefix honours monotonicity
    let mut visit = |c: &[u8]| {
        if let (Some(s), Some(&v)) = (&constraints.second, c.get(1)) {
            if !s[v as usize] {
                return;
            }
        }
        if let Some(a) = &constraints.above {
            if c < &a[..off] {
                return;
            }
        }
        norms.clear();
        for row in &table.rows {
            freq.iter_mut().for_each(|f| *f = 0);
            for (k, &e) in c.iter().enumerate() {
                freq[sub_mod(row[k], e, q) as usize] += 1;
            }
            norms.push(norm_from_frequencies(&freq, q).expect("supported modulus"));
        }
        let key = hash_key(&norms, &table.primes, table.p_big).expect("enough primes");
        x[..off].copy_from_slice(c);
        for d in table.bucket(key) {
            x[off..].copy_from_slice(d);
            if constraints.admits(&x) && orthogonal_to_all(&x, rows, set) {
                out.push(x.clone());
            }
        }
    };
    if off == 1 {
        visit(&c);
    } else {
        enumerate_monotone(
            off - 1,
            q,
            |j| constraints.monotone_at(j + 1) && j > 0,
            &mut c[1..].to_vec(),
            &mut |rest| {
                let mut full = Vec::with_capacity(off);
                full.push(0);
                full.extend_from_slice(rest);
                visit(&full);
            },
        );
    }
    out
}

/// Coordinate-wise generator with per-row domination pruning.
#[derive(Clone, Debug)]
pub struct Extender<'a> {
    set: &'a VanishingSet,
    words: usize,
    /// `masks[v][c]`: members having at least `c` copies of residue `v`.
    masks: Vec<Vec<Vec<u64>>>,
    /// Least `Sort(±m - v)` over the residues `v` of `∓m`, per member `m`.
    min_rotations: Vec<Vec<u8>>,
}

impl<'a> Extender<'a> {
    pub fn new(set: &'a VanishingSet) -> Self {
        let (n, q) = (set.n(), set.q() as usize);
        let freqs = set.frequency_vectors();
        let words = freqs.len().div_ceil(64).max(1);
        let mut masks = vec![vec![vec![0u64; words]; n + 2]; q];
        for (k, f) in freqs.iter().enumerate() {
            for v in 0..q {
                for mask in &mut masks[v][..=f[v] as usize] {
                    mask[k / 64] |= 1 << (k % 64);
                }
            }
        }
        let q8 = set.q();
        let min_rotations = set
            .members()
            .iter()
            .map(|m| {
                let neg: Vec<u8> = m.iter().map(|&e| sub_mod(0, e, q8)).collect();
                let mut best: Option<Vec<u8>> = None;
                for base in [m, &neg] {
                    for &v in base {
                        let mut r: Vec<u8> = base.iter().map(|&e| sub_mod(e, v, q8)).collect();
                        r.sort_unstable();
                        if best.as_ref().is_none_or(|b| r < *b) {
                            best = Some(r);
                        }
                    }
                }
                best.unwrap_or_default()
            })
            .collect();
        Extender {
            set,
            words,
            masks,
            min_rotations,
        }
    }

    /// Members whose every rotation, in either direction, is at least
    /// `second_row`: in a canonical matrix no pair of rows differs by a
    /// rotation of anything smaller than its second row.
    pub fn differences_not_below(&self, second_row: &[u8]) -> Vec<bool> {
        self.min_rotations
            .iter()
            .map(|r| r.as_slice() >= second_row)
            .collect()
    }

    /// [`RowConstraints::canonical_child`] plus the difference restriction
    /// implied by the second row.
    pub fn canonical_constraints(&self, r: &LogMatrix) -> RowConstraints {
        let mut c = RowConstraints::canonical_child(r, self.set);
        if r.nrows() >= 2 {
            c.differences = Some(self.differences_not_below(r.row(1)));
        }
        c
    }

    pub fn set(&self) -> &VanishingSet {
        self.set
    }

    /// All rows orthogonal to `r` (and to the zero row) meeting `constraints`,
    /// in lexicographic order.
    pub fn extensions(&self, r: &LogMatrix, constraints: &RowConstraints) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        self.for_each(r, constraints, |x| out.push(x.to_vec()));
        out
    }

    pub fn for_each(&self, r: &LogMatrix, constraints: &RowConstraints, mut f: impl FnMut(&[u8])) {
        let n = self.set.n();
        if self.set.is_empty() || r.ncols() != n {
            return;
        }
        let rows = rows_with_zero(r);
        let mut state = Walk {
            ext: self,
            rows: &rows,
            constraints,
            q: self.set.q(),
            n,
            x: vec![0; n],
            counts: vec![vec![0u8; self.set.q() as usize]; rows.len()],
            alive: vec![vec![0u64; self.words]; rows.len() * (n + 1)],
        };
        let mut start = self.masks[0][0].clone();
        if let Some(allowed) = &constraints.differences {
            for (k, &ok) in allowed.iter().enumerate() {
                if !ok {
                    start[k / 64] &= !(1 << (k % 64));
                }
            }
        }
        if start.iter().all(|&w| w == 0) {
            return;
        }
        for a in state.alive[..rows.len()].iter_mut() {
            a.copy_from_slice(&start);
        }
        state.step(0, true, &mut f);
    }
}

struct Walk<'e, 'a> {
    ext: &'e Extender<'a>,
    rows: &'e [Vec<u8>],
    constraints: &'e RowConstraints,
    q: u8,
    n: usize,
    x: Vec<u8>,
    counts: Vec<Vec<u8>>,
    /// Alive member sets, `rows.len()` per depth.
    alive: Vec<Vec<u64>>,
}

impl Walk<'_, '_> {
    fn step(&mut self, j: usize, tight: bool, f: &mut impl FnMut(&[u8])) {
        if j == self.n {
            if !tight || self.constraints.above.is_none() {
                f(&self.x);
            }
            return;
        }
        let above = self.constraints.above.as_deref();
        let mut lo = if j > 0 && self.constraints.monotone_at(j) {
            self.x[j - 1]
        } else {
            0
        };
        let hi = if j == 0 { 1 } else { self.q };
        if tight {
            if let Some(a) = above {
                lo = lo.max(a[j]);
            }
        }
        let r = self.rows.len();
        let words = self.ext.words;
        for v in lo..hi {
            if j == 1 {
                if let Some(s) = &self.constraints.second {
                    if !s[v as usize] {
                        continue;
                    }
                }
            }
            let mut ok = true;
            let (prev, next) = self.alive.split_at_mut((j + 1) * r);
            let prev = &prev[j * r..];
            let next = &mut next[..r];
            for i in 0..r {
                let row = &self.rows[i];
                let w = sub_mod(sub_mod(row[j], v, self.q), row[0], self.q) as usize;
                let c = self.counts[i][w] as usize + 1;
                let mask = &self.ext.masks[w][c.min(self.n + 1)];
                let mut any = 0u64;
                for k in 0..words {
                    let a = prev[i][k] & mask[k];
                    next[i][k] = a;
                    any |= a;
                }
                if any == 0 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for i in 0..r {
                let row = &self.rows[i];
                let w = sub_mod(sub_mod(row[j], v, self.q), row[0], self.q) as usize;
                self.counts[i][w] += 1;
            }
            self.x[j] = v;
            let still_tight = tight && above.is_some_and(|a| a[j] == v);
            self.step(j + 1, still_tight, f);
            for i in 0..r {
                let row = &self.rows[i];
                let w = sub_mod(sub_mod(row[j], v, self.q), row[0], self.q) as usize;
                self.counts[i][w] -= 1;
            }
        }
    }
}
