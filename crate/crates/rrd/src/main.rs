//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid input or configuration, 3 for
//! I/O failures.

use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rrd::experiments::{
    fit_points, histogram_for_reduced_size, linear_fit, paper_buckets, run_batch,
    validate_buckets, BatchConfig, FitResult, HistogramConfig, SizeMode, SizeRange,
    SizeSource,
};
use rrd::metric;
use rrd::oracle::{build_rrg, extremal_distances, verify_fordham};
use rrd::random::{sample_tree, Seed};
use rrd::report::{
    read_pair_records_csv, render_histogram_svg, write_bucket_rows_csv,
    write_histogram_csv, write_pair_records_csv, ReportError,
};
use rrd::transform::{reduce_pair, rotate, Direction, ReducedTreePair, TreePair};
use rrd::tree::{Address, Tree};

#[derive(Parser)]
#[command(
    name = "rrd",
    version,
    about = "Restricted rotation distance between rooted ordered binary trees"
)]
struct Cli {
    /// Worker threads for pair generation (default: all cores). Never
    /// affects results, only wall-clock time.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact restricted rotation distance between two trees.
    Dist {
        /// First tree, preorder encoding ('1' internal, '0' leaf).
        s: Option<String>,
        /// Second tree, same size as the first.
        t: Option<String>,
        /// Read the two encodings from a file, one per line.
        #[arg(long, conflicts_with_all = ["s", "t"])]
        file: Option<PathBuf>,
        /// Also print the per-node type pairs of the reduced pair.
        #[arg(long)]
        show_types: bool,
        /// Reject input pairs that still share a sibling leaf pair.
        #[arg(long)]
        strict: bool,
    },
    /// Remove common sibling leaf pairs from a pair of trees.
    Reduce {
        s: Option<String>,
        t: Option<String>,
        /// Read the two encodings from a file, one per line.
        #[arg(long, conflicts_with_all = ["s", "t"])]
        file: Option<PathBuf>,
    },
    /// Apply one rotation and print the resulting encoding.
    Rotate {
        /// Preorder encoding of the tree.
        encoding: String,
        /// Node address: "root", or a string of 0/1 child steps from the
        /// root (0 = left, 1 = right).
        address: String,
        /// Rotation direction.
        direction: DirectionArg,
    },
    /// Sample uniform random trees, one encoding per line.
    Sample {
        /// Number of internal nodes per tree.
        #[arg(long)]
        size: usize,
        /// How many trees to print.
        #[arg(long, alias = "counts", default_value_t = 1)]
        count: u64,
        /// Master seed; tree i comes from stream i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brute-force facts about the graph of trees of one size.
    Oracle {
        /// Tree size (internal nodes).
        #[arg(long)]
        size: usize,
        /// Check the weight-based distance against graph distance over
        /// every ordered pair (sizes 2..=7) and report mismatches.
        #[arg(long)]
        verify: bool,
        /// Scan all reduced pairs for the smallest and largest distance
        /// (sizes 3..=12) and print witnesses.
        #[arg(long)]
        extremal: bool,
    },
    /// Generate random pairs over size buckets; write per-pair and
    /// per-bucket CSVs.
    Experiment {
        /// table2 buckets by generated size; table3 buckets by reduced
        /// size.
        mode: TableMode,
        /// "paper" for the 30 published ranges, or "lo:hi,lo:hi,..."
        #[arg(long, default_value = "paper")]
        buckets: String,
        /// Pairs generated per bucket.
        #[arg(long, alias = "counts", default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for pairs.csv and buckets.csv.
        #[arg(long)]
        out: PathBuf,
        /// Also fit distance against size and print the line.
        #[arg(long)]
        fit: bool,
    },
    /// Distance histogram over pairs of one exact reduced size; writes
    /// hist.csv (and hist.svg with --svg).
    Hist {
        /// Reduced size to condition on.
        #[arg(long)]
        size: u32,
        /// Number of matching pairs to collect.
        #[arg(long, alias = "counts", default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Also render an SVG with the matching normal curve.
        #[arg(long)]
        svg: bool,
    },
    /// Fit distance against raw and reduced size from a saved pairs.csv.
    Fit {
        /// Per-pair CSV written by `experiment`.
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Left,
    Right,
}

impl From<DirectionArg> for Direction {
    fn from(arg: DirectionArg) -> Direction {
        match arg {
            DirectionArg::Left => Direction::Left,
            DirectionArg::Right => Direction::Right,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableMode {
    /// Bucket rows keyed by generated size.
    Table2,
    /// Bucket rows keyed by reduced size.
    Table3,
}

enum CliError {
    Validation(String),
    Io(String),
}

type CliResult<T> = Result<T, CliError>;

fn invalid(message: impl Display) -> CliError {
    CliError::Validation(message.to_string())
}

fn io_failure(message: impl Display) -> CliError {
    CliError::Io(message.to_string())
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes early (e.g. `rrd ... | head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // Ignore the error if a global pool already exists; thread count
        // only changes speed, never output.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Io(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}

fn parse_tree(text: &str) -> CliResult<Tree> {
    Tree::parse(text).map_err(invalid)
}

/// Two encodings from positionals or from a two-line file.
fn pair_inputs(
    s: Option<String>,
    t: Option<String>,
    file: Option<PathBuf>,
) -> CliResult<TreePair> {
    let (first, second) = match (s, t, file) {
        (Some(a), Some(b), None) => (a, b),
        (None, None, Some(path)) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| io_failure(format!("cannot read {}: {e}", path.display())))?;
            let mut lines = text
                .lines()
                .map(str::trim)
                .filter(|line| !line.is_empty());
            let a = lines
                .next()
                .ok_or_else(|| invalid("file must hold two encodings, one per line"))?
                .to_string();
            let b = lines
                .next()
                .ok_or_else(|| invalid("file must hold two encodings, one per line"))?
                .to_string();
            if lines.next().is_some() {
                return Err(invalid("file holds more than two encodings"));
            }
            (a, b)
        }
        _ => {
            return Err(invalid(
                "provide two encodings as arguments, or --file, but not both",
            ))
        }
    };
    TreePair::new(parse_tree(&first)?, parse_tree(&second)?).map_err(invalid)
}

fn parse_buckets(text: &str) -> CliResult<Vec<SizeRange>> {
    if text == "paper" {
        return Ok(paper_buckets());
    }
    let mut buckets = Vec::new();
    for part in text.split(',') {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| invalid(format!("bucket {part:?} is not of the form lo:hi")))?;
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|e| invalid(format!("bad bucket bound {lo:?}: {e}")))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|e| invalid(format!("bad bucket bound {hi:?}: {e}")))?;
        if lo == 0 {
            return Err(invalid("bucket bounds must be at least 1"));
        }
        buckets.push(SizeRange::new(lo, hi));
    }
    validate_buckets(&buckets).map_err(invalid)?;
    Ok(buckets)
}

fn print_fit(label: &str, fit: &FitResult) {
    println!(
        "{label} slope={:.6} intercept={:.6} max_rel_residual={:.6}",
        fit.slope, fit.intercept, fit.max_relative_residual
    );
}

fn write_file(
    path: &std::path::Path,
    write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> CliResult<()> {
    let mut buffer = Vec::new();
    write(&mut buffer)
        .and_then(|()| fs::write(path, &buffer))
        .map_err(|e| io_failure(format!("cannot write {}: {e}", path.display())))
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Dist {
            s,
            t,
            file,
            show_types,
            strict,
        } => {
            let pair = pair_inputs(s, t, file)?;
            if strict {
                ReducedTreePair::try_from(pair.clone()).map_err(invalid)?;
            }
            let result = metric::rrd(&pair);
            println!(
                "distance={} reduced_size={}",
                result.distance, result.reduced_size
            );
            if show_types {
                let pairs: Vec<String> = result
                    .type_pairs
                    .iter()
                    .map(|(a, b)| format!("{a}:{b}"))
                    .collect();
                println!("types={}", pairs.join(","));
            }
            Ok(())
        }
        Command::Reduce { s, t, file } => {
            let pair = pair_inputs(s, t, file)?;
            let reduced = reduce_pair(&pair);
            println!(
                "s={} t={} reduced_size={}",
                reduced.s(),
                reduced.t(),
                reduced.size()
            );
            Ok(())
        }
        Command::Rotate {
            encoding,
            address,
            direction,
        } => {
            let tree = parse_tree(&encoding)?;
            let address = if address == "root" || address.is_empty() {
                Address::root()
            } else {
                Address::parse(&address).map_err(invalid)?
            };
            let rotated = rotate(&tree, &address, direction.into()).map_err(invalid)?;
            println!("{rotated}");
            Ok(())
        }
        Command::Sample { size, count, seed } => {
            let seed = Seed::new(seed);
            for index in 0..count {
                println!("{}", sample_tree(size, seed.derive(index)));
            }
            Ok(())
        }
        Command::Oracle {
            size,
            verify,
            extremal,
        } => {
            if verify {
                let report = verify_fordham(size).map_err(invalid)?;
                println!(
                    "pairs={} mismatches={}",
                    report.pairs_checked,
                    report.mismatches.len()
                );
            }
            if extremal {
                let report = extremal_distances(size).map_err(invalid)?;
                println!("min={} max={}", report.min_distance, report.max_distance);
                println!(
                    "min_witness={},{} max_witness={},{}",
                    report.min_witness.0,
                    report.min_witness.1,
                    report.max_witness.0,
                    report.max_witness.1
                );
            }
            if !verify && !extremal {
                let graph = build_rrg(size).map_err(invalid)?;
                println!(
                    "vertices={} edges={}",
                    graph.vertex_count(),
                    graph.edge_count()
                );
            }
            Ok(())
        }
        Command::Experiment {
            mode,
            buckets,
            count,
            seed,
            out,
            fit,
        } => {
            let buckets = parse_buckets(&buckets)?;
            if count == 0 {
                return Err(invalid("--count must be at least 1"));
            }
            let config = BatchConfig {
                sizes: SizeSource::Ranges(buckets.clone()),
                count_per_size: count as usize,
                seed: Seed::new(seed),
            };
            let records = run_batch(&config);
            let size_mode = match mode {
                TableMode::Table2 => SizeMode::Raw,
                TableMode::Table3 => SizeMode::Reduced,
            };
            let rows = rrd::experiments::aggregate(&records, &buckets, size_mode)
                .map_err(invalid)?;
            fs::create_dir_all(&out)
                .map_err(|e| io_failure(format!("cannot create {}: {e}", out.display())))?;
            write_file(&out.join("pairs.csv"), |w| {
                write_pair_records_csv(w, &records)
            })?;
            write_file(&out.join("buckets.csv"), |w| {
                write_bucket_rows_csv(w, &rows)
            })?;
            println!("records={} buckets={}", records.len(), rows.len());
            if fit {
                let points = fit_points(&records, size_mode, 1, u32::MAX);
                let fitted = linear_fit(&points).map_err(invalid)?;
                print_fit("fit", &fitted);
            }
            Ok(())
        }
        Command::Hist {
            size,
            count,
            seed,
            out,
            svg,
        } => {
            if size == 0 {
                return Err(invalid("--size must be at least 1"));
            }
            if count == 0 {
                return Err(invalid("--count must be at least 1"));
            }
            let config = HistogramConfig::new(size, count, Seed::new(seed));
            let histogram = histogram_for_reduced_size(&config).map_err(invalid)?;
            fs::create_dir_all(&out)
                .map_err(|e| io_failure(format!("cannot create {}: {e}", out.display())))?;
            write_file(&out.join("hist.csv"), |w| {
                write_histogram_csv(w, &histogram)
            })?;
            if svg {
                let rendered = render_histogram_svg(&histogram);
                let path = out.join("hist.svg");
                fs::write(&path, rendered)
                    .map_err(|e| io_failure(format!("cannot write {}: {e}", path.display())))?;
            }
            println!(
                "n={} mean={:.4} sd={:.4} count={}",
                histogram.target_reduced_size,
                histogram.sample_mean,
                histogram.sample_sd,
                histogram.sample_count
            );
            Ok(())
        }
        Command::Fit { file } => {
            let handle = fs::File::open(&file)
                .map_err(|e| io_failure(format!("cannot read {}: {e}", file.display())))?;
            let records = read_pair_records_csv(handle).map_err(|e| match e {
                ReportError::Io(inner) => {
                    io_failure(format!("cannot read {}: {inner}", file.display()))
                }
                parse => invalid(parse),
            })?;
            for (label, mode) in [("fit_raw", SizeMode::Raw), ("fit_reduced", SizeMode::Reduced)]
            {
                let points = fit_points(&records, mode, 1, u32::MAX);
                let fitted = linear_fit(&points).map_err(invalid)?;
                print_fit(label, &fitted);
            }
            Ok(())
        }
    }
}
