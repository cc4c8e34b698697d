//! Command-line front end: `copeq test`, `copeq exceedance`, `copeq simulate`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::measures::{exceedance_sweep, write_exceedance_csv, DEFAULT_LEVELS};
use crate::permute::{run_test_samples, Decision, Method, PermutationPlan};
use crate::ranks::{pseudo_obs, Sample};
use crate::sim::{load_config, run_table, write_results};
use crate::stats::StatisticKind;

/// Exit status for an accepted null hypothesis (also used by other successful commands).
pub const EXIT_ACCEPT: i32 = 0;
/// Exit status for a rejected null hypothesis.
pub const EXIT_REJECT: i32 = 3;
/// Exit status for any error.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "copeq", version, about = "Permutation tests for equality of two copulas")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "COPEQ_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test whether two samples share the same copula.
    Test(TestArgs),
    /// Exceedance Kendall's tau of a bivariate sample.
    Exceedance(ExceedanceArgs),
    /// Run Monte Carlo experiments from a TOML file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Field delimiter.
    #[arg(long, default_value_t = ',')]
    delimiter: char,

    /// Whether the first row is a header: auto, yes or no.
    #[arg(long, default_value = "auto")]
    header: HeaderMode,

    /// 1-based columns to use, e.g. `1,3`.
    #[arg(long, value_delimiter = ',')]
    cols: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum HeaderMode {
    Auto,
    Yes,
    No,
}

#[derive(Debug, Args)]
struct TestArgs {
    file1: PathBuf,
    file2: PathBuf,

    /// Statistic: cvm, ks or lp:<p>:<grid>.
    #[arg(long, default_value = "cvm")]
    stat: StatisticKind,

    /// thm32, thm31, naive-w or naive-zhat.
    #[arg(long, default_value = "thm32")]
    method: Method,

    /// Number of random permutations.
    #[arg(long, default_value_t = 1000)]
    perms: usize,

    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Enumerate all permutations (small samples only).
    #[arg(long)]
    exhaustive: bool,

    /// Also write the JSON report to this file.
    #[arg(long)]
    output: Option<PathBuf>,

    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct ExceedanceArgs {
    file: PathBuf,

    /// Exceedance levels in (0, 1).
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,

    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,

    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    config: PathBuf,

    /// Results CSV; cells already present are skipped. Standard output if absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A numeric matrix read from a delimited text file.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub path: PathBuf,
    pub delimiter: u8,
    pub has_header: bool,
    pub sample: Sample,
}

fn parse_cell(text: &str, row: usize, column: usize) -> Result<f64> {
    let v: f64 = text.trim().parse().map_err(|_| Error::Parse {
        row,
        column,
        message: format!("`{}` is not a number", text.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            column,
            message: format!("`{}` is not finite", text.trim()),
        });
    }
    Ok(v)
}

/// Read a numeric CSV. `header = None` treats the first row as a header when
/// none of its cells is a number. Row numbers in errors are 1-based file lines.
pub fn read_data(path: &Path, delimiter: u8, header: Option<bool>, cols: Option<&[usize]>) -> Result<DataFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_path(path)?;
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(records.len() + 1, |p| p.line() as usize);
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        records.push((line, rec));
    }
    let has_header = match header {
        Some(h) => h,
        None => records
            .first()
            .is_some_and(|(_, r)| r.iter().all(|c| c.trim().parse::<f64>().is_err())),
    };
    let body = if has_header { &records[1.min(records.len())..] } else { &records[..] };
    let width = body.first().map_or(0, |(_, r)| r.len());
    let mut data = Vec::with_capacity(body.len() * width);
    for (line, rec) in body {
        if rec.len() != width {
            return Err(Error::Parse {
                row: *line,
                column: rec.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            data.push(parse_cell(cell, *line, j + 1)?);
        }
    }
    if body.len() < 2 {
        return Err(Error::Data(format!("{}: need at least 2 data rows, found {}", path.display(), body.len())));
    }
    let mut sample = Sample::new(data, body.len(), width).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    if let Some(cols) = cols {
        if let Some(&bad) = cols.iter().find(|&&c| c == 0 || c > width) {
            return Err(Error::Input(format!("column {bad} outside 1..={width}")));
        }
        let zero_based: Vec<usize> = cols.iter().map(|c| c - 1).collect();
        sample = sample.select_columns(&zero_based)?;
    }
    Ok(DataFile {
        path: path.to_path_buf(),
        delimiter,
        has_header,
        sample,
    })
}

impl InputArgs {
    fn read(&self, path: &Path) -> Result<DataFile> {
        if !self.delimiter.is_ascii() {
            return Err(Error::Input(format!("delimiter `{}` must be a single ASCII character", self.delimiter)));
        }
        let header = match self.header {
            HeaderMode::Auto => None,
            HeaderMode::Yes => Some(true),
            HeaderMode::No => Some(false),
        };
        read_data(path, self.delimiter as u8, header, self.cols.as_deref())
    }
}

fn cmd_test(args: &TestArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32> {
    let x1 = args.input.read(&args.file1)?.sample;
    let x2 = args.input.read(&args.file2)?.sample;
    if x1.d() != x2.d() {
        return Err(Error::DimensionMismatch {
            expected: x1.d(),
            found: x2.d(),
        });
    }
    let plan = if args.exhaustive {
        PermutationPlan::exhaustive(args.seed)
    } else {
        PermutationPlan::monte_carlo(args.perms, args.seed)
    };
    let report = run_test_samples(&x1, &x2, args.stat, args.method, &plan, args.alpha)?;
    let json = report.to_json()?;
    writeln!(out, "{json}")?;
    if let Some(path) = &args.output {
        std::fs::write(path, format!("{json}\n"))?;
    }
    writeln!(err, "{report}")?;
    if report.tie_warning {
        writeln!(err, "warning: ties in the input; pseudo-observations use maximal ranks")?;
    }
    Ok(match report.decision {
        Decision::Reject => EXIT_REJECT,
        Decision::Accept | Decision::Randomized => EXIT_ACCEPT,
    })
}

fn cmd_exceedance(args: &ExceedanceArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let data = args.input.read(&args.file)?;
    let p = pseudo_obs(&data.sample)?;
    let levels = args.levels.clone().unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    let rows = exceedance_sweep(&p, &levels)?;
    match &args.output {
        Some(path) => write_exceedance_csv(&rows, std::fs::File::create(path)?)?,
        None => write_exceedance_csv(&rows, out)?,
    }
    Ok(EXIT_ACCEPT)
}

fn cmd_simulate(args: &SimulateArgs, workers: usize, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32> {
    let cells = load_config(&args.config)?;
    let outcome = run_table(&cells, workers, args.output.as_deref())?;
    if args.output.is_none() {
        write_results(&outcome.results, &mut *out)?;
    }
    for i in &outcome.skipped {
        writeln!(err, "cell {i}: already in the results file, skipped")?;
    }
    for (i, e) in &outcome.failures {
        writeln!(err, "cell {i} failed: {e}")?;
    }
    Ok(if outcome.failures.is_empty() { EXIT_ACCEPT } else { EXIT_ERROR })
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Run the command line with explicit streams; returns the exit status.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_ACCEPT };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let workers = cli.workers.unwrap_or_else(default_workers).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_ERROR;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Test(a) => cmd_test(a, out, err),
        Command::Exceedance(a) => cmd_exceedance(a, out),
        Command::Simulate(a) => cmd_simulate(a, workers, out, err),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

/// Entry point used by the `copeq` binary.
pub fn main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
