//! Rows and matrices over `Z_q` in logarithmic form.
//!
//! A residue `e` stands for the root of unity `exp(2πi·e/q)`. All arithmetic
//! here is modular arithmetic on the exponents; nothing in this module touches
//! floating point.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[inline]
pub(crate) fn add_mod(a: u8, b: u8, q: u8) -> u8 {
    ((a as u16 + b as u16) % q as u16) as u8
}

#[inline]
pub(crate) fn sub_mod(a: u8, b: u8, q: u8) -> u8 {
    ((a as u16 + q as u16 - b as u16) % q as u16) as u8
}

#[inline]
pub(crate) fn mul_mod(a: u8, b: u8, q: u8) -> u8 {
    ((a as u16 * b as u16) % q as u16) as u8
}

fn check_modulus(q: u32) -> Result<u8> {
    if !(2..=255).contains(&q) {
        return Err(Error::UnsupportedModulus {
            q,
            reason: "modulus must lie in 2..=255",
        });
    }
    Ok(q as u8)
}

fn check_entries(entries: &[u8], q: u8) -> Result<()> {
    match entries.iter().find(|&&e| e >= q) {
        Some(&e) => Err(Error::ResidueOutOfRange {
            value: e as u32,
            q: q as u32,
        }),
        None => Ok(()),
    }
}

/// Lexicographic comparison of two residue strings of equal length.
pub fn lex_compare(a: &[u8], b: &[u8]) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.cmp(b))
}

/// A vector in `Z_q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogRow {
    entries: Vec<u8>,
    q: u8,
}

impl LogRow {
    pub fn new(q: u32, entries: Vec<u8>) -> Result<Self> {
        let q = check_modulus(q)?;
        if entries.is_empty() {
            return Err(Error::Precondition("a row needs at least one entry".into()));
        }
        check_entries(&entries, q)?;
        Ok(LogRow { entries, q })
    }

    pub(crate) fn from_raw(q: u8, entries: Vec<u8>) -> Self {
        debug_assert!(entries.iter().all(|&e| e < q));
        LogRow { entries, q }
    }

    pub fn zeros(n: usize, q: u32) -> Result<Self> {
        LogRow::new(q, vec![0; n])
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u8> {
        self.entries
    }

    /// The lexicographically least rearrangement of the row.
    pub fn sorted(&self) -> LogRow {
        let mut entries = self.entries.clone();
        entries.sort_unstable();
        LogRow { entries, q: self.q }
    }

    pub fn lex_compare(&self, other: &LogRow) -> Result<Ordering> {
        self.check_compatible(other)?;
        lex_compare(&self.entries, &other.entries)
    }

    /// Entrywise difference `self - other` in `Z_q`.
    pub fn difference(&self, other: &LogRow) -> Result<LogRow> {
        self.check_compatible(other)?;
        let q = self.q;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| sub_mod(a, b, q))
            .collect();
        Ok(LogRow { entries, q })
    }

    /// Counts of each residue `0..q`.
    pub fn frequencies(&self) -> Vec<usize> {
        frequencies(&self.entries, self.q)
    }

    fn check_compatible(&self, other: &LogRow) -> Result<()> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch {
                left: self.q,
                right: other.q,
            });
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for LogRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_residues(f, &self.entries)
    }
}

pub(crate) fn frequencies(entries: &[u8], q: u8) -> Vec<usize> {
    let mut f = vec![0usize; q as usize];
    for &e in entries {
        f[e as usize] += 1;
    }
    f
}

/// `sort_row` as a free function.
pub fn sort_row(x: &LogRow) -> LogRow {
    x.sorted()
}

fn write_residues(f: &mut fmt::Formatter<'_>, entries: &[u8]) -> fmt::Result {
    for (k, e) in entries.iter().enumerate() {
        if k > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

/// An `r × n` matrix over `Z_q`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogMatrix {
    data: Vec<u8>,
    rows: usize,
    cols: usize,
    q: u8,
}

impl LogMatrix {
    pub fn new(q: u32, rows: Vec<Vec<u8>>) -> Result<Self> {
        let q = check_modulus(q)?;
        let cols = rows.first().map_or(0, Vec::len);
        if cols == 0 {
            return Err(Error::Precondition("a matrix needs at least one column".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            check_entries(row, q)?;
            data.extend_from_slice(row);
        }
        Ok(LogMatrix {
            data,
            rows: rows.len(),
            cols,
            q,
        })
    }

    pub fn from_rows(rows: &[LogRow]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::Precondition("no rows given".into()))?;
        for row in rows {
            if row.q() != first.q() {
                return Err(Error::ModulusMismatch {
                    left: first.q(),
                    right: row.q(),
                });
            }
        }
        LogMatrix::new(
            first.q() as u32,
            rows.iter().map(|r| r.entries().to_vec()).collect(),
        )
    }

    pub(crate) fn from_flat(q: u8, rows: usize, cols: usize, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&e| e < q));
        LogMatrix { data, rows, cols, q }
    }

    /// An `r × n` zero matrix.
    pub fn zeros(rows: usize, cols: usize, q: u32) -> Result<Self> {
        let q = check_modulus(q)?;
        Ok(LogMatrix::from_flat(q, rows, cols, vec![0; rows * cols]))
    }

    /// The Fourier matrix `F_n` in logarithmic form, over `Z_n`.
    pub fn fourier(n: usize) -> Result<Self> {
        let q = check_modulus(n as u32)?;
        let data = (0..n * n).map(|k| ((k / n) * (k % n) % n) as u8).collect();
        Ok(LogMatrix::from_flat(q, n, n, data))
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> LogRow {
        LogRow::from_raw(self.q, self.row(i).to_vec())
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.data.chunks_exact(self.cols)
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows().map(<[u8]>::to_vec).collect()
    }

    /// Appends a row; the row must have matching length and modulus.
    pub fn push_row(&mut self, row: &[u8]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        check_entries(row, self.q)?;
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub(crate) fn with_row(&self, row: &[u8]) -> LogMatrix {
        let mut data = Vec::with_capacity(self.data.len() + row.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(row);
        LogMatrix::from_flat(self.q, self.rows + 1, self.cols, data)
    }

    /// The leading `k × n` submatrix.
    pub fn leading_rows(&self, k: usize) -> LogMatrix {
        let k = k.min(self.rows);
        LogMatrix::from_flat(self.q, k, self.cols, self.data[..k * self.cols].to_vec())
    }

    pub fn transpose(&self) -> LogMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        LogMatrix::from_flat(self.q, self.cols, self.rows, data)
    }

    /// Subtracts the first entry of each row from that row, then the first
    /// entry of each column from that column.
    pub fn dephase(&self) -> LogMatrix {
        let (q, n) = (self.q, self.cols);
        let mut data = self.data.clone();
        for row in data.chunks_exact_mut(n) {
            let lead = row[0];
            for e in row.iter_mut() {
                *e = sub_mod(*e, lead, q);
            }
        }
        if self.rows > 0 {
            let top: Vec<u8> = data[..n].to_vec();
            for row in data.chunks_exact_mut(n) {
                for (e, &t) in row.iter_mut().zip(&top) {
                    *e = sub_mod(*e, t, q);
                }
            }
        }
        LogMatrix::from_flat(q, self.rows, n, data)
    }

    pub fn is_dephased(&self) -> bool {
        self.rows().all(|r| r[0] == 0) && (self.rows == 0 || self.row(0).iter().all(|&e| e == 0))
    }

    /// Applies `row_perm` (new row `k` is old row `row_perm[k]`) and
    /// `col_perm` likewise, then adds the given phases.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> LogMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for &i in row_perm {
            let row = self.row(i);
            data.extend(col_perm.iter().map(|&j| row[j]));
        }
        LogMatrix::from_flat(self.q, row_perm.len(), col_perm.len(), data)
    }

    /// Interprets the matrix over `Z_{c·q}` by scaling every exponent by `c`.
    pub fn embed(&self, factor: u32) -> Result<LogMatrix> {
        let q = check_modulus(self.q as u32 * factor)?;
        let data = self.data.iter().map(|&e| (e as u32 * factor) as u8).collect();
        Ok(LogMatrix::from_flat(q, self.rows, self.cols, data))
    }

    /// Applies the automorphism `e ↦ u·e` of `Z_q` entrywise.
    pub fn scaled(&self, unit: u8) -> LogMatrix {
        let q = self.q;
        let data = self.data.iter().map(|&e| mul_mod(e, unit, q)).collect();
        LogMatrix::from_flat(q, self.rows, self.cols, data)
    }
}

impl fmt::Display for LogMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write_residues(f, row)?;
        }
        Ok(())
    }
}

/// Returns `M` dephased; see [`LogMatrix::dephase`].
pub fn dephase(m: &LogMatrix) -> LogMatrix {
    m.dephase()
}
