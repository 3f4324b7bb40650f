use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use butson::analysis::{defect, find_unreal_form, kronecker, turyn_double, unreal6_to_quaternary, verify_butson};
use butson::canonical::canonical_form;
use butson::catalog::Catalog;
use butson::equivalence::{aut_group_size, are_equivalent, hadamard_classes, total_count};
use butson::format::{parse_matrix, write_matrix};
use butson::search::{classify, count_tree, matrix_type, staging_dir, Schedule, SearchOptions};
use butson::{Error, LogMatrix, VanishingSet};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "butson", version, about = "Classify and inspect Butson Hadamard matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Search {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u32,
    /// Keep only matrices of type K (q = 4).
    #[arg(long = "type", value_name = "K")]
    type_filter: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_name = "D")]
    seed_depth: Option<usize>,
    /// Generate rows by the pruned coordinate search (the default).
    #[arg(long, conflicts_with = "hash")]
    no_hash: bool,
    /// Generate rows by the suffix hash join.
    #[arg(long)]
    hash: bool,
    /// Suffix length of the hash join.
    #[arg(long, value_name = "M", requires = "hash")]
    suffix_len: Option<usize>,
    /// Depth from which the compatibility-graph clique test prunes.
    #[arg(long, value_name = "D")]
    clique_depth: Option<usize>,
    /// Expand the tree level by level.
    #[arg(long)]
    bfs: bool,
}

impl Search {
    fn options(&self) -> SearchOptions {
        let mut o = SearchOptions::new(self.n, self.q);
        o.type_filter = self.type_filter;
        o.jobs = self.jobs;
        if let Some(d) = self.seed_depth {
            o.seed_depth = d;
        }
        o.use_hash_extension = self.hash;
        o.suffix_len = self.suffix_len;
        o.clique_depth = self.clique_depth;
        if self.bfs {
            o.schedule = Schedule::BreadthFirst;
        }
        o
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify BH(n,q) up to monomial equivalence into a catalogue directory.
    Classify {
        #[command(flatten)]
        search: Search,
        /// Journal to resume from (default: DIR/.journal).
        #[arg(long, value_name = "JOURNAL")]
        resume: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Record the defect of every class (q in 2, 3, 4, 6).
        #[arg(long)]
        defect: bool,
    },
    /// Canonical nodes per depth of the search tree.
    Tree {
        #[command(flatten)]
        search: Search,
        #[arg(long, value_name = "R")]
        max_depth: Option<usize>,
    },
    /// The orthogonality set O(n,q), one member per line.
    Vanishing {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        count_only: bool,
    },
    /// Canonical form of a matrix file.
    Canonical { file: PathBuf },
    /// Check that a matrix file holds a Butson matrix.
    Verify { file: PathBuf },
    /// Order of the automorphism group.
    Aut { file: PathBuf },
    /// Monomial equivalence of two matrices.
    Equiv { first: PathBuf, second: PathBuf },
    /// Defect of a Butson matrix.
    Defect { file: PathBuf },
    /// Build a new matrix from known ones.
    Construct {
        #[command(subcommand)]
        kind: Construction,
    },
    /// Number of Hadamard classes in a catalogue.
    HadamardClasses {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Number of Butson matrices represented by a catalogue.
    TotalCount {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum Construction {
    /// Kronecker product.
    Kron { first: PathBuf, second: PathBuf },
    /// BH(2n,2) from BH(n,4).
    Turyn { file: PathBuf },
    /// BH(2n,4) from an unreal BH(n,6).
    Unreal6 { file: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Domain(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Engine(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<LogMatrix, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn read_butson(path: &Path) -> Result<LogMatrix, Failure> {
    let m = read(path)?;
    if !m.is_square() || !verify_butson(&m) {
        return Err(Failure::Domain(format!(
            "{}: not a Butson Hadamard matrix",
            path.display()
        )));
    }
    Ok(m)
}

fn joined(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn run_classify(search: &Search, resume: Option<PathBuf>, out: &Path, with_defect: bool) -> Outcome {
    let mut opts = search.options();
    let journal = resume.unwrap_or_else(|| out.join(".journal"));
    opts.journal = Some(journal.clone());
    let result = classify(&opts)?;
    let types: Vec<usize> = if opts.q == 4 {
        result
            .representatives
            .iter()
            .map(matrix_type)
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let defects: Vec<usize> = if with_defect {
        result
            .representatives
            .iter()
            .map(|m| defect(m).map(|r| r.defect))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let count = result.representatives.len();
    let catalog = Catalog::new(result.representatives, &result.aut_sizes, &types, &defects);
    catalog.write(out)?;
    if journal.exists() {
        fs::remove_file(&journal)?;
    }
    let staging = staging_dir(&journal);
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    println!("BH({},{}): {count} classes", opts.n, opts.q);
    for e in &catalog.entries {
        println!("{}\t|Aut| = {}", e.file, e.aut.unwrap_or(0));
    }
    Ok(())
}

fn run_tree(search: &Search, max_depth: Option<usize>) -> Outcome {
    let mut opts = search.options();
    opts.max_depth = max_depth;
    let stats = count_tree(&opts)?;
    println!("{}", joined(stats.until_exhausted()));
    let reached = stats.counts.len() == opts.n;
    if reached && stats.at_depth(opts.n) == 0 {
        println!("nonexistent");
    }
    Ok(())
}

fn catalog_aut(dir: &Path) -> Result<(Catalog, Vec<u64>), Failure> {
    let catalog = Catalog::read(dir)?;
    let aut = catalog
        .entries
        .iter()
        .zip(&catalog.matrices)
        .map(|(e, m)| e.aut.map_or_else(|| aut_group_size(m), Ok))
        .collect::<Result<_, _>>()?;
    Ok((catalog, aut))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Classify {
            search,
            resume,
            out,
            defect,
        } => run_classify(&search, resume, &out, defect),
        Command::Tree { search, max_depth } => run_tree(&search, max_depth),
        Command::Vanishing { n, q, count_only } => {
            let set = VanishingSet::generate(n, q)?;
            if count_only {
                println!("{}", set.len());
            } else {
                for m in set.members() {
                    let line: Vec<String> = m.iter().map(u8::to_string).collect();
                    println!("{}", line.join(" "));
                }
            }
            Ok(())
        }
        Command::Canonical { file } => {
            let m = read(&file)?;
            print!("{}", write_matrix(&canonical_form(&m)));
            Ok(())
        }
        Command::Verify { file } => {
            let m = read(&file)?;
            if m.is_square() && verify_butson(&m) {
                println!("BH({},{})", m.ncols(), m.q());
                Ok(())
            } else {
                Err(Failure::Domain("not a Butson Hadamard matrix".into()))
            }
        }
        Command::Aut { file } => {
            println!("{}", aut_group_size(&read_butson(&file)?)?);
            Ok(())
        }
        Command::Equiv { first, second } => {
            let (a, b) = (read_butson(&first)?, read_butson(&second)?);
            if are_equivalent(&a, &b)? {
                println!("equivalent");
                Ok(())
            } else {
                println!("inequivalent");
                Err(Failure::Domain("matrices are not monomially equivalent".into()))
            }
        }
        Command::Defect { file } => {
            let r = defect(&read_butson(&file)?)?;
            println!("{}", r.defect);
            Ok(())
        }
        Command::Construct { kind } => {
            let m = match kind {
                Construction::Kron { first, second } => {
                    kronecker(&read_butson(&first)?, &read_butson(&second)?)?
                }
                Construction::Turyn { file } => turyn_double(&read_butson(&file)?)?,
                Construction::Unreal6 { file } => {
                    let h = read_butson(&file)?;
                    let u = find_unreal_form(&h)?
                        .ok_or_else(|| Failure::Domain("matrix has no unreal form".into()))?;
                    unreal6_to_quaternary(&u)?
                }
            };
            print!("{}", write_matrix(&m));
            Ok(())
        }
        Command::HadamardClasses { dir } => {
            let catalog = Catalog::read(&dir)?;
            println!("{}", hadamard_classes(&catalog.matrices)?);
            Ok(())
        }
        Command::TotalCount { dir } => {
            let (catalog, aut) = catalog_aut(&dir)?;
            let Some(first) = catalog.entries.first() else {
                return Err(Failure::Domain("empty catalogue".into()));
            };
            println!("{}", total_count(&aut, first.n, first.q)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("butson: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Engine(e @ Error::Precondition(_))) => {
            eprintln!("butson: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("butson: {e}");
            ExitCode::from(1)
        }
    }
}
