//! On-disk catalogues of classified matrices: one matrix file per class plus
//! a tab-separated `index.tsv`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::format::{parse_matrix, write_matrix};
use crate::matrix::LogMatrix;

pub const INDEX_FILE: &str = "index.tsv";
const INDEX_HEADER: &str = "# n\tq\tclass\tfile\taut\ttype\tdefect";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub n: usize,
    pub q: u32,
    pub class: usize,
    pub file: String,
    pub aut: Option<u64>,
    pub matrix_type: Option<usize>,
    pub defect: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub matrices: Vec<LogMatrix>,
}

pub fn matrix_file_name(n: usize, q: u32, class: usize) -> String {
    format!("bh-{n}-{q}-{class:05}.txt")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

impl Catalog {
    /// Catalogue of `matrices` (classes numbered in the given order).
    pub fn new(
        matrices: Vec<LogMatrix>,
        aut: &[u64],
        types: &[usize],
        defects: &[usize],
    ) -> Self {
        let entries = matrices
            .iter()
            .enumerate()
            .map(|(i, m)| CatalogEntry {
                n: m.ncols(),
                q: m.q() as u32,
                class: i,
                file: matrix_file_name(m.ncols(), m.q() as u32, i),
                aut: aut.get(i).copied(),
                matrix_type: types.get(i).copied(),
                defect: defects.get(i).copied(),
            })
            .collect();
        Catalog { entries, matrices }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_text(&self) -> String {
        let mut out = format!("{INDEX_HEADER}\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                e.n,
                e.q,
                e.class,
                e.file,
                opt(&e.aut),
                opt(&e.matrix_type),
                opt(&e.defect)
            ));
        }
        out
    }

    /// Writes the matrix files and the index; other files are left alone.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (e, m) in self.entries.iter().zip(&self.matrices) {
            fs::write(dir.join(&e.file), write_matrix(m))?;
        }
        fs::write(dir.join(INDEX_FILE), self.index_text())?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let index_path = dir.join(INDEX_FILE);
        let text = fs::read_to_string(&index_path)
            .map_err(|e| Error::Catalog(format!("{}: {e}", index_path.display())))?;
        let mut entries = Vec::new();
        let mut matrices = Vec::new();
        for (k, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 7 {
                return Err(Error::parse(k + 1, 1, "index rows have 7 fields"));
            }
            let num = |i: usize| -> Result<usize> {
                f[i].parse()
                    .map_err(|_| Error::parse(k + 1, i + 1, format!("bad field `{}`", f[i])))
            };
            let optnum = |i: usize| -> Result<Option<u64>> {
                if f[i] == "-" {
                    Ok(None)
                } else {
                    f[i].parse()
                        .map(Some)
                        .map_err(|_| Error::parse(k + 1, i + 1, format!("bad field `{}`", f[i])))
                }
            };
            let entry = CatalogEntry {
                n: num(0)?,
                q: num(1)? as u32,
                class: num(2)?,
                file: f[3].to_string(),
                aut: optnum(4)?,
                matrix_type: optnum(5)?.map(|v| v as usize),
                defect: optnum(6)?.map(|v| v as usize),
            };
            if entry.class != entries.len() {
                return Err(Error::Catalog(format!(
                    "class indices must be dense from 0; found {} at position {}",
                    entry.class,
                    entries.len()
                )));
            }
            let path: PathBuf = dir.join(&entry.file);
            let body = fs::read_to_string(&path)
                .map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))?;
            let m = parse_matrix(&body)?;
            if m.ncols() != entry.n || m.q() as u32 != entry.q {
                return Err(Error::Catalog(format!(
                    "{} does not match its index row",
                    entry.file
                )));
            }
            entries.push(entry);
            matrices.push(m);
        }
        Ok(Catalog { entries, matrices })
    }
}
