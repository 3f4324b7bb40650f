//! Orderly generation of Butson matrices, one row at a time.
//!
//! Every node of the search tree is a canonical partial matrix. A node's
//! children are the canonical matrices obtained by appending one row that is
//! orthogonal to all rows so far, keeps the second column a prefix of a
//! member of `O(n,q)`, and passes the optional type and clique filters.
//!
//! The tree is cut at `seed_depth`; the subtrees below are independent work
//! units, run in parallel and optionally journalled so that an interrupted
//! run can resume.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use crate::canonical::is_canonical_unchecked;
use crate::clique::{compatibility_graph, has_clique};
use crate::equivalence::aut_group_size;
use crate::error::{Error, Result};
use crate::extend::{
    extensions_hashed_constrained, Extender, HashConfig, RowConstraints, DEFAULT_MEMORY_CAP,
};
use crate::matrix::{sub_mod, LogMatrix, LogRow};
use crate::norm::has_exact_norm;
use crate::vanishing::{exists_vanishing, VanishingSet};

/// Environment variable overriding the extension-table memory cap (bytes).
pub const MEMORY_CAP_ENV: &str = "BUTSON_MEMORY_CAP";

/// Order in which the tree is expanded below the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Breadth-first down to `seed_depth`, then depth-first per seed.
    #[default]
    DepthFirst,
    /// Level by level, keeping every level in memory.
    BreadthFirst,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub n: usize,
    pub q: u32,
    pub schedule: Schedule,
    /// Hash-join extension when `q` allows it; otherwise the pruned
    /// coordinate-wise generator.
    pub use_hash_extension: bool,
    /// Suffix length of the hash join; `None` means `n / 2`.
    pub suffix_len: Option<usize>,
    pub hash: HashConfig,
    /// Reject nodes with this many rows whose compatibility graph lacks a
    /// clique on the missing rows.
    pub clique_depth: Option<usize>,
    /// Keep only type-`k` matrices (`q = 4`).
    pub type_filter: Option<usize>,
    /// Depth of the work-unit roots, clamped to `1..=n`.
    pub seed_depth: usize,
    /// Worker threads; 0 picks the number of CPUs.
    pub jobs: usize,
    /// Stop expanding below this depth (tree statistics only).
    pub max_depth: Option<usize>,
    /// Journal of completed work units.
    pub journal: Option<PathBuf>,
    /// Run at most this many pending work units, then report
    /// [`Error::Incomplete`].
    pub stop_after: Option<usize>,
    pub compute_aut: bool,
}

impl SearchOptions {
    pub fn new(n: usize, q: u32) -> Self {
        let memory_cap = std::env::var(MEMORY_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MEMORY_CAP);
        SearchOptions {
            n,
            q,
            schedule: Schedule::DepthFirst,
            use_hash_extension: false,
            suffix_len: None,
            hash: HashConfig {
                memory_cap,
                ..HashConfig::default()
            },
            clique_depth: None,
            type_filter: None,
            seed_depth: 5,
            jobs: 0,
            max_depth: None,
            journal: None,
            stop_after: None,
            compute_aut: true,
        }
    }
}

/// Number of canonical nodes per depth, `counts[r - 1]` for `r` rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub counts: Vec<u64>,
}

impl SearchStats {
    fn zeros(depth: usize) -> Self {
        SearchStats {
            counts: vec![0; depth],
        }
    }

    pub fn at_depth(&self, r: usize) -> u64 {
        r.checked_sub(1)
            .and_then(|i| self.counts.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// Counts up to and including the first zero.
    pub fn until_exhausted(&self) -> &[u64] {
        match self.counts.iter().position(|&c| c == 0) {
            Some(i) => &self.counts[..=i],
            None => &self.counts,
        }
    }

    fn add(&mut self, other: &SearchStats) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationResult {
    /// Complete canonical matrices in increasing vectorization order.
    pub representatives: Vec<LogMatrix>,
    /// `|Aut|` of each representative (empty unless computed).
    pub aut_sizes: Vec<u64>,
    pub stats: SearchStats,
}

/// `min{m, n/2 - m}`, `m` the number of zeros of `r1 - r2` over `Z_4`.
pub fn pair_type(r1: &LogRow, r2: &LogRow) -> Result<usize> {
    if r1.q() != 4 || r2.q() != 4 {
        return Err(Error::UnsupportedModulus {
            q: r1.q().max(r2.q()) as u32,
            reason: "types are defined for q = 4",
        });
    }
    if r1.len() != r2.len() {
        return Err(Error::DimensionMismatch {
            expected: r1.len(),
            found: r2.len(),
        });
    }
    Ok(pair_type_raw(r1.entries(), r2.entries()))
}

fn pair_type_raw(a: &[u8], b: &[u8]) -> usize {
    let zeros = a.iter().zip(b).filter(|(x, y)| x == y).count();
    zeros.min((a.len() / 2).saturating_sub(zeros))
}

/// Least pair type over all pairs of rows.
pub fn matrix_type(r: &LogMatrix) -> Result<usize> {
    if r.q() != 4 {
        return Err(Error::UnsupportedModulus {
            q: r.q() as u32,
            reason: "types are defined for q = 4",
        });
    }
    let mut best = usize::MAX;
    for a in 0..r.nrows() {
        for b in a + 1..r.nrows() {
            best = best.min(pair_type_raw(r.row(a), r.row(b)));
        }
    }
    if best == usize::MAX {
        return Err(Error::Precondition("type needs at least two rows".into()));
    }
    Ok(best)
}

struct Engine<'a> {
    opts: &'a SearchOptions,
    set: &'a VanishingSet,
    ext: Extender<'a>,
    n: usize,
    limit: usize,
    hashed: bool,
    /// Current suffix length; lowered when a table overflows the cap.
    suffix: AtomicUsize,
}

impl<'a> Engine<'a> {
    fn new(opts: &'a SearchOptions, set: &'a VanishingSet) -> Self {
        let n = opts.n;
        let hashed = opts.use_hash_extension && has_exact_norm(set.q()) && n >= 2;
        let suffix = opts.suffix_len.unwrap_or(n / 2).clamp(1, n.saturating_sub(1).max(1));
        Engine {
            opts,
            set,
            ext: Extender::new(set),
            n,
            limit: opts.max_depth.unwrap_or(n).min(n),
            hashed,
            suffix: AtomicUsize::new(suffix),
        }
    }

    fn candidates(&self, r: &LogMatrix, c: &RowConstraints) -> Vec<Vec<u8>> {
        if self.hashed {
            loop {
                let m = self.suffix.load(AtomicOrdering::Relaxed);
                if m == 0 {
                    break;
                }
                match extensions_hashed_constrained(r, m, self.set, &self.opts.hash, c) {
                    Ok(rows) => return rows,
                    Err(Error::MemoryBudget { .. }) => {
                        let _ = self.suffix.compare_exchange(
                            m,
                            m - 1,
                            AtomicOrdering::Relaxed,
                            AtomicOrdering::Relaxed,
                        );
                    }
                    Err(_) => break,
                }
            }
        }
        self.ext.extensions(r, c)
    }

    fn children(&self, r: &LogMatrix) -> Vec<LogMatrix> {
        let depth = r.nrows() + 1;
        let constraints = self.ext.canonical_constraints(r);
        let mut out = Vec::new();
        for x in self.candidates(r, &constraints) {
            if let Some(k) = self.opts.type_filter {
                if r.rows().any(|row| pair_type_raw(row, &x) < k) {
                    continue;
                }
                if depth == 2 && pair_type_raw(r.row(0), &x) != k {
                    continue;
                }
            }
            let child = r.with_row(&x);
            if !is_canonical_unchecked(&child) {
                continue;
            }
            if self.opts.clique_depth == Some(depth) && depth < self.n {
                let ok = compatibility_graph(&child, self.set)
                    .map(|g| has_clique(&g, self.n - depth))
                    .unwrap_or(true);
                if !ok {
                    continue;
                }
            }
            out.push(child);
        }
        out
    }

    /// Expands everything below `r`, counting descendants by depth.
    fn dfs(&self, r: &LogMatrix, stats: &mut SearchStats, out: &mut Vec<LogMatrix>) {
        if r.nrows() >= self.limit {
            return;
        }
        for child in self.children(r) {
            let d = child.nrows();
            stats.counts[d - 1] += 1;
            if d == self.n {
                out.push(child);
            } else {
                self.dfs(&child, stats, out);
            }
        }
    }
}

fn root(n: usize, q: u32) -> Result<LogMatrix> {
    LogMatrix::zeros(1, n, q)
}

/// All `BH(n,q)` up to monomial equivalence.
pub fn classify(opts: &SearchOptions) -> Result<ClassificationResult> {
    validate(opts)?;
    let (n, q) = (opts.n, opts.q);
    let limit = opts.max_depth.unwrap_or(n).min(n);
    let mut stats = SearchStats::zeros(limit);
    if limit == 0 {
        return Ok(ClassificationResult {
            representatives: Vec::new(),
            aut_sizes: Vec::new(),
            stats,
        });
    }
    stats.counts[0] = 1;
    let top = root(n, q)?;
    if n == 1 {
        return finish(opts, vec![top], stats);
    }
    if !exists_vanishing(n, q) {
        return finish(opts, Vec::new(), stats);
    }
    let set = VanishingSet::generate(n, q)?;
    let engine = Engine::new(opts, &set);
    let reps = match opts.schedule {
        Schedule::BreadthFirst => breadth_first(&engine, top, &mut stats)?,
        Schedule::DepthFirst => seeded(&engine, top, &mut stats)?,
    };
    finish(opts, reps, stats)
}

/// Per-depth node counts only.
pub fn count_tree(opts: &SearchOptions) -> Result<SearchStats> {
    let mut o = opts.clone();
    o.compute_aut = false;
    Ok(classify(&o)?.stats)
}

fn validate(opts: &SearchOptions) -> Result<()> {
    if opts.n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if !(2..=255).contains(&opts.q) {
        return Err(Error::UnsupportedModulus {
            q: opts.q,
            reason: "modulus must lie in 2..=255",
        });
    }
    if opts.type_filter.is_some() && opts.q != 4 {
        return Err(Error::UnsupportedModulus {
            q: opts.q,
            reason: "type filtering applies to q = 4",
        });
    }
    Ok(())
}

fn finish(
    opts: &SearchOptions,
    mut reps: Vec<LogMatrix>,
    stats: SearchStats,
) -> Result<ClassificationResult> {
    reps.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
    reps.dedup();
    let aut_sizes = if opts.compute_aut {
        let units: Vec<usize> = (0..reps.len()).collect();
        run_units(opts.jobs, units, |i| aut_group_size(&reps[i]))?
    } else {
        Vec::new()
    };
    Ok(ClassificationResult {
        representatives: reps,
        aut_sizes,
        stats,
    })
}

fn breadth_first(
    engine: &Engine<'_>,
    top: LogMatrix,
    stats: &mut SearchStats,
) -> Result<Vec<LogMatrix>> {
    let mut level = vec![top];
    for d in 2..=engine.limit {
        let idx: Vec<usize> = (0..level.len()).collect();
        let next: Vec<Vec<LogMatrix>> =
            run_units(engine.opts.jobs, idx, |i| Ok(engine.children(&level[i])))?;
        level = next.into_iter().flatten().collect();
        stats.counts[d - 1] = level.len() as u64;
        if level.is_empty() {
            break;
        }
    }
    Ok(if engine.limit == engine.n { level } else { Vec::new() })
}

fn seeded(
    engine: &Engine<'_>,
    top: LogMatrix,
    stats: &mut SearchStats,
) -> Result<Vec<LogMatrix>> {
    let opts = engine.opts;
    let seed_depth = opts.seed_depth.clamp(1, engine.limit);
    // breadth-first frontier down to the seed depth
    let mut reps = Vec::new();
    let mut level = vec![top];
    for d in 2..=seed_depth {
        level = level.iter().flat_map(|r| engine.children(r)).collect();
        stats.counts[d - 1] = level.len() as u64;
    }
    if seed_depth == engine.n {
        return Ok(level);
    }
    let journal = match &opts.journal {
        Some(path) => Some(Journal::open(path, opts, level.len())?),
        None => None,
    };
    let done = journal.as_ref().map(|j| j.done.clone()).unwrap_or_default();
    let mut pending: Vec<usize> = (0..level.len()).filter(|i| !done.contains(i)).collect();
    let total = level.len();
    let stopping = opts.stop_after.is_some_and(|s| s < pending.len());
    if let Some(s) = opts.stop_after {
        pending.truncate(s);
    }
    let depth = engine.limit;
    let results = run_units(opts.jobs, pending, |i| {
        let mut s = SearchStats::zeros(depth);
        let mut out = Vec::new();
        engine.dfs(&level[i], &mut s, &mut out);
        if let Some(j) = &journal {
            j.record(i, &s, &out)?;
        }
        Ok((s, out))
    })?;
    if stopping {
        let completed = done.len() + results.len();
        return Err(Error::Incomplete { completed, total });
    }
    for (s, out) in results {
        stats.add(&s);
        reps.extend(out);
    }
    if let Some(j) = &journal {
        for &i in &done {
            let (s, out) = j.load(i, engine.n, engine.set.q(), depth)?;
            stats.add(&s);
            reps.extend(out);
        }
    }
    Ok(reps)
}

#[cfg(feature = "parallel")]
fn run_units<T: Send>(
    jobs: usize,
    units: Vec<usize>,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    use rayon::prelude::*;
    if jobs == 1 || units.len() <= 1 {
        return units.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    pool.install(|| units.into_par_iter().map(&f).collect())
}

#[cfg(not(feature = "parallel"))]
fn run_units<T: Send>(
    _jobs: usize,
    units: Vec<usize>,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    units.into_iter().map(f).collect()
}

/// Completed work units: one index per line after a header describing the
/// run, and one staged result file per unit in `<journal>.d/`.
struct Journal {
    staging: PathBuf,
    file: Mutex<File>,
    done: BTreeSet<usize>,
}

impl Journal {
    fn header(opts: &SearchOptions, seeds: usize) -> String {
        format!(
            "# n={} q={} seed_depth={} seeds={} type={} clique={} max_depth={}",
            opts.n,
            opts.q,
            opts.seed_depth,
            seeds,
            opts.type_filter.map_or("-".into(), |k| k.to_string()),
            opts.clique_depth.map_or("-".into(), |k| k.to_string()),
            opts.max_depth.map_or("-".into(), |k| k.to_string()),
        )
    }

    fn open(path: &Path, opts: &SearchOptions, seeds: usize) -> Result<Self> {
        let header = Journal::header(opts, seeds);
        let mut done = BTreeSet::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (k, line) in reader.lines().enumerate() {
                let line = line?;
                if k == 0 {
                    if line != header {
                        return Err(Error::Precondition(format!(
                            "journal {} belongs to another run ({line})",
                            path.display()
                        )));
                    }
                    continue;
                }
                if line.trim().is_empty() {
                    continue;
                }
                let idx: usize = line.trim().parse().map_err(|_| {
                    Error::parse(k + 1, 1, format!("bad journal entry `{line}`"))
                })?;
                done.insert(idx);
            }
        } else {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(path, format!("{header}\n"))?;
        }
        let staging = staging_dir(path);
        fs::create_dir_all(&staging)?;
        let file = OpenOptions::new().append(true).open(path)?;
        Ok(Journal {
            staging,
            file: Mutex::new(file),
            done,
        })
    }

    fn unit_path(&self, i: usize) -> PathBuf {
        self.staging.join(format!("unit-{i:07}.txt"))
    }

    fn record(&self, i: usize, stats: &SearchStats, reps: &[LogMatrix]) -> Result<()> {
        let mut text = String::from("counts");
        for c in &stats.counts {
            text.push_str(&format!(" {c}"));
        }
        text.push('\n');
        for m in reps {
            for row in m.rows() {
                let line: Vec<String> = row.iter().map(u8::to_string).collect();
                text.push_str(&line.join(" "));
                text.push('\n');
            }
        }
        let path = self.unit_path(i);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        let mut f = self.file.lock().expect("journal lock");
        writeln!(f, "{i}")?;
        f.flush()?;
        Ok(())
    }

    fn load(&self, i: usize, n: usize, q: u8, depth: usize) -> Result<(SearchStats, Vec<LogMatrix>)> {
        let path = self.unit_path(i);
        let text = fs::read_to_string(&path)?;
        let mut lines = text.lines();
        let counts: Vec<u64> = lines
            .next()
            .and_then(|l| l.strip_prefix("counts"))
            .ok_or_else(|| Error::parse(1, 1, format!("{}: missing counts", path.display())))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse(1, 1, "bad count")))
            .collect::<Result<_>>()?;
        if counts.len() != depth {
            return Err(Error::parse(1, 1, format!("{}: wrong depth", path.display())));
        }
        let rows: Vec<Vec<u8>> = lines
            .enumerate()
            .map(|(k, l)| {
                l.split_whitespace()
                    .map(|t| t.parse().map_err(|_| Error::parse(k + 2, 1, "bad residue")))
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        let reps = rows
            .chunks(n)
            .map(|c| LogMatrix::new(q as u32, c.to_vec()))
            .collect::<Result<_>>()?;
        Ok((SearchStats { counts }, reps))
    }
}

/// Directory holding staged unit results next to a journal file.
pub fn staging_dir(journal: &Path) -> PathBuf {
    let mut s = journal.as_os_str().to_owned();
    s.push(".d");
    PathBuf::from(s)
}

/// Whether appending `x` to the dephased `r` keeps all pairs orthogonal.
pub fn extends(r: &LogMatrix, x: &[u8], set: &VanishingSet) -> bool {
    let q = r.q();
    r.rows().all(|row| {
        let d: Vec<u8> = row.iter().zip(x).map(|(&a, &b)| sub_mod(a, b, q)).collect();
        set.vanishes(&d)
    }) && set.vanishes(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(n: usize, q: u32) -> usize {
        let mut o = SearchOptions::new(n, q);
        o.jobs = 1;
        classify(&o).unwrap().representatives.len()
    }

    #[test]
    fn tiny_classifications() {
        assert_eq!(count(1, 5), 1);
        assert_eq!(count(2, 2), 1);
        assert_eq!(count(3, 2), 0);
        assert_eq!(count(4, 2), 1);
        assert_eq!(count(3, 3), 1);
        assert_eq!(count(4, 4), 2);
        assert_eq!(count(5, 5), 1);
        assert_eq!(count(6, 3), 1);
        assert_eq!(count(5, 6), 0);
    }

    #[test]
    fn bh22_representative() {
        let r = classify(&SearchOptions::new(2, 2)).unwrap();
        assert_eq!(
            r.representatives,
            vec![LogMatrix::new(2, vec![vec![0, 0], vec![0, 1]]).unwrap()]
        );
        assert_eq!(r.aut_sizes, vec![8]);
        assert_eq!(r.stats.counts, vec![1, 1]);
    }

    #[test]
    fn types() {
        let f4 = LogMatrix::fourier(4).unwrap();
        assert_eq!(pair_type(&f4.row_vec(0), &f4.row_vec(2)).unwrap(), 0);
        assert_eq!(pair_type(&f4.row_vec(0), &f4.row_vec(1)).unwrap(), 1);
        assert_eq!(matrix_type(&f4).unwrap(), 0);
        let f2 = LogMatrix::new(4, vec![vec![0, 0], vec![0, 2]]).unwrap();
        assert_eq!(matrix_type(&f2).unwrap(), 0);
        assert!(matrix_type(&LogMatrix::fourier(3).unwrap()).is_err());
    }

    #[test]
    fn schedules_agree() {
        let mut a = SearchOptions::new(6, 4);
        a.seed_depth = 2;
        let mut b = a.clone();
        b.schedule = Schedule::BreadthFirst;
        let ra = classify(&a).unwrap();
        let rb = classify(&b).unwrap();
        assert_eq!(ra.representatives, rb.representatives);
        assert_eq!(ra.stats, rb.stats);
    }

    #[test]
    fn exhausted_prefix() {
        let s = SearchStats {
            counts: vec![1, 3, 0, 0],
        };
        assert_eq!(s.until_exhausted(), &[1, 3, 0]);
        assert_eq!(s.at_depth(2), 3);
        assert_eq!(s.at_depth(0), 0);
    }
}
