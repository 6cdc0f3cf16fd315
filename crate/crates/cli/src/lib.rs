//! Command-line adapter over the `deltamod` library.
//!
//! Exit codes: 0 when the command succeeds or the property holds, 1 when a
//! property is violated, 2 on usage or input errors.

use std::fs;
use std::io::{self, Read, Write};

use clap::{Parser, Subcommand};
use deltamod::extensions;
use deltamod::families::{build_a, build_a_lee};
use deltamod::lines::{self, LineMultiset};
use deltamod::modularity;
use deltamod::partition::partitions;
use deltamod::search::{self, SearchConfig, SearchMode};
use deltamod::suite::{self, Scope};
use deltamod::{Error, IntMatrix, Partition};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "deltamod", version, about = "Exact tools for Δ-modular integer matrices")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads; falls back to DELTAMOD_THREADS, then all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a matrix is Δ-modular.
    Check {
        #[arg(long)]
        delta: u64,
        /// Matrix file (text or JSON), or `-` for stdin.
        file: String,
    },
    /// Print the exact modularity level.
    Delta { file: String },
    /// Build an extremal matrix.
    Construct {
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        partition: Option<Partition>,
        #[arg(long)]
        rank: usize,
        /// The Lee et al. matrix instead of `A(Δ, λ, r)`.
        #[arg(long)]
        lee: bool,
    },
    /// List the partitions of `n`.
    Partitions { n: u64 },
    /// Enumerate clique extensions by number of extra columns.
    Extensions {
        #[arg(long, default_value_t = 3)]
        delta: u64,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        arity: u8,
    },
    /// Line-length multiset through the designated element.
    Nu {
        #[arg(long)]
        delta: Option<u64>,
        #[arg(long)]
        partition: Option<Partition>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        from_matrix: Option<String>,
        #[arg(long, default_value_t = 0)]
        element: usize,
    },
    /// Recover `λ` from a line multiset.
    Recover {
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        nu: LineMultiset,
    },
    /// Certify pairwise distinct line multisets of the extremal family.
    Distinguish {
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        rank: usize,
    },
    /// Search for many non-parallel columns.
    Search {
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        rank: usize,
        /// identity, hnf or greedy.
        #[arg(long, default_value = "hnf")]
        mode: SearchMode,
        #[arg(long, default_value_t = 100_000_000)]
        node_limit: u64,
        /// Seconds.
        #[arg(long, default_value_t = 600)]
        time_limit: u64,
        #[arg(long)]
        seed: Option<String>,
    },
    /// Run the named reproducibility checks.
    VerifySuite {
        #[arg(long, default_value = "fast")]
        scope: Scope,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Output goes to stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var("DELTAMOD_THREADS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
    });
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buf));
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult = Result<i32, CliError>;

/// Text or JSON matrix from a path, or stdin for `-`.
pub fn read_matrix(path: &str) -> Result<IntMatrix, String> {
    let text = if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?
    };
    parse_matrix(&text).map_err(|e| e.to_string())
}

pub fn parse_matrix(text: &str) -> deltamod::Result<IntMatrix> {
    if text.trim_start().starts_with('{') {
        IntMatrix::from_json(text)
    } else {
        IntMatrix::parse_text(text)
    }
}

fn load(path: &str) -> Result<IntMatrix, CliError> {
    read_matrix(path).map_err(|m| CliError::Lib(Error::InvalidArgument(m)))
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) -> io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json"))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let json = cli.json;
    match &cli.command {
        Command::Check { delta, file } => {
            let m = load(file)?;
            let (ok, witness) = modularity::is_delta_modular(&m, *delta)?;
            let parallel = modularity::parallel_pairs(&m)?;
            if json {
                emit(
                    out,
                    &json!({
                        "delta": delta,
                        "modular": ok,
                        "witness": witness,
                        "parallelPairs": parallel,
                    }),
                )?;
            } else if ok {
                writeln!(out, "{delta}-modular: yes")?;
                if !parallel.is_empty() {
                    writeln!(out, "parallel column pairs: {parallel:?}")?;
                }
            } else {
                writeln!(out, "{delta}-modular: no")?;
                writeln!(out, "witness: {}", serde_json::to_string(&witness).expect("json"))?;
            }
            Ok(if ok { EXIT_OK } else { EXIT_VIOLATED })
        }
        Command::Delta { file } => {
            let m = load(file)?;
            let report = modularity::modularity_level(&m)?;
            if json {
                emit(out, &serde_json::to_value(&report).expect("json"))?;
            } else {
                writeln!(out, "{}", report.delta)?;
            }
            Ok(EXIT_OK)
        }
        Command::Construct {
            delta,
            partition,
            rank,
            lee,
        } => {
            let built = match (lee, partition) {
                (true, None) => build_a_lee(*delta, *rank)?,
                (false, Some(p)) => build_a(*delta, p, *rank)?,
                (true, Some(_)) => {
                    return Err(Error::InvalidArgument("--lee takes no --partition".into()).into())
                }
                (false, None) => return Err(Error::InvalidArgument("--partition or --lee is required".into()).into()),
            };
            if json {
                emit(out, &serde_json::to_value(&built).expect("json"))?;
            } else {
                write!(out, "{}", built.matrix.to_text())?;
            }
            Ok(EXIT_OK)
        }
        Command::Partitions { n } => {
            let ps = partitions(*n)?;
            if json {
                emit(out, &serde_json::to_value(&ps).expect("json"))?;
            } else {
                for p in ps {
                    writeln!(out, "{p}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Extensions { delta, arity } => extensions_cmd(*delta, *arity, json, out),
        Command::Nu {
            delta,
            partition,
            rank,
            from_matrix,
            element,
        } => {
            let nu = match (from_matrix, delta, partition, rank) {
                (Some(path), _, _, _) => {
                    let m = load(path)?;
                    lines::line_length_multiset(&m, *element)?
                }
                (None, Some(d), Some(p), Some(r)) => {
                    let built = build_a(*d, p, *r)?;
                    lines::line_length_multiset(&built.matrix, built.designated_element)?
                }
                (None, Some(d), None, Some(r)) => {
                    let built = build_a_lee(*d, *r)?;
                    lines::line_length_multiset(&built.matrix, built.designated_element)?
                }
                _ => {
                    return Err(Error::InvalidArgument("give --from-matrix, or --delta and --rank (with --partition for A(Δ,λ,r))".into())
                    .into())
                }
            };
            if json {
                emit(out, &json!({ "nu": nu.to_string(), "total": nu.total }))?;
            } else {
                writeln!(out, "{nu}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Recover { delta, rank, nu } => {
            let p = lines::recover_partition(nu, *delta, *rank)?;
            if json {
                emit(out, &json!({ "partition": p }))?;
            } else {
                writeln!(out, "{p}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Distinguish { delta, rank } => {
            let rep = lines::distinguishing_report(*delta, *rank)?;
            if json {
                emit(out, &serde_json::to_value(&rep).expect("json"))?;
            } else {
                for (name, nu) in rep.constructions.iter().zip(nus_in_order(&rep)) {
                    writeln!(out, "{name}: {nu}")?;
                }
                writeln!(
                    out,
                    "{} constructions, pairwise distinct: {}",
                    rep.constructions.len(),
                    rep.all_distinct
                )?;
            }
            let ok = rep.all_distinct && rep.lee_matches_formula && rep.lee_separated;
            Ok(if ok { EXIT_OK } else { EXIT_VIOLATED })
        }
        Command::Search {
            delta,
            rank,
            mode,
            node_limit,
            time_limit,
            seed,
        } => {
            let mut config = SearchConfig::new(*delta, *rank, *mode);
            config.node_limit = *node_limit;
            config.time_limit_seconds = *time_limit;
            config.seed = seed.as_deref().map(load).transpose()?;
            let cert = search::max_columns_search(&config)?;
            emit(out, &serde_json::to_value(&cert).expect("json"))?;
            Ok(EXIT_OK)
        }
        Command::VerifySuite { scope } => {
            let report = suite::verify_suite(*scope);
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                for c in &report.checks {
                    let status = match c.status {
                        suite::Status::Pass => "PASS",
                        suite::Status::Fail => "FAIL",
                    };
                    writeln!(out, "{status} {} ({} ms): {}", c.name, c.elapsed_ms, c.detail)?;
                }
            }
            Ok(if report.all_passed { EXIT_OK } else { EXIT_VIOLATED })
        }
    }
}

fn nus_in_order(rep: &lines::DistinguishingReport) -> Vec<String> {
    let n = rep.constructions.len();
    (0..n)
        .map(|i| {
            rep.certificates
                .iter()
                .find_map(|c| {
                    if c.left_id == rep.constructions[i] {
                        Some(c.left_nu.to_string())
                    } else if c.right_id == rep.constructions[i] {
                        Some(c.right_nu.to_string())
                    } else {
                        None
                    }
                })
                .unwrap_or_default()
        })
        .collect()
}

fn extensions_cmd(delta: u64, arity: u8, json: bool, out: &mut dyn Write) -> CliResult {
    match arity {
        1 => {
            let cols = extensions::enumerate_single_extensions(delta)?;
            if json {
                emit(out, &serde_json::to_value(&cols).expect("json"))?;
            } else {
                for c in cols {
                    writeln!(out, "{:?}", c.reduced)?;
                }
            }
        }
        2 => {
            let pairs = extensions::enumerate_pair_extensions(delta)?;
            if json {
                emit(out, &serde_json::to_value(&pairs).expect("json"))?;
            } else {
                for p in pairs {
                    writeln!(out, "{:?}", p.rows)?;
                }
            }
        }
        _ => {
            let t = extensions::refute_triple_extensions(delta)?;
            if json {
                emit(out, &serde_json::to_value(&t).expect("json"))?;
            } else {
                for r in &t.refuted {
                    writeln!(
                        out,
                        "{:?} rows {:?} cols {:?} |det| {}",
                        r.triple.rows,
                        r.witness.row_indices,
                        r.witness.col_indices,
                        r.witness.abs_det()
                    )?;
                }
                writeln!(
                    out,
                    "{} candidates, {} refuted, {} survivors",
                    t.candidates,
                    t.refuted.len(),
                    t.survivors.len()
                )?;
            }
            if !t.survivors.is_empty() {
                return Ok(EXIT_VIOLATED);
            }
        }
    }
    Ok(EXIT_OK)
}
