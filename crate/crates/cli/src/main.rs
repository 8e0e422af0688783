use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qssa_core::exec::{init_threads_from_env, Execution};
use qssa_core::linalg::{DensityMatrix, HilbertDims};
use qssa_core::random::{
    random_cq_state, random_density, random_kraus, random_povm, random_pure_vector, Seed,
};
use qssa_core::suite::{
    parse_dims, parse_suites, render_csv, render_ndjson, run, SuiteConfig, Summary,
};
use qssa_core::wehrl::{wehrl_min_scan, BlochGrid, HusimiField, SpinJ};
use qssa_core::Error;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qssa",
    version,
    about = "Seeded numerical checks of entropy inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Density,
    Kraus,
    Povm,
    Cq,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Suite name, comma-separated list, or `all`.
    #[arg(long)]
    suite: String,
    /// Factor dimensions, e.g. `2,2,2`.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance replacing the per-report default.
    #[arg(long)]
    tol: Option<f64>,
    /// Dimension for the counterexample suite.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Single-spin size for the wehrl suite.
    #[arg(long = "two-j", default_value_t = 2)]
    two_j: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run check suites and write one report per instance.
    Check(CheckArgs),
    /// Generate a random object as JSON.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Factor dimensions; Kraus and POVM use their product.
        #[arg(long)]
        dims: Option<String>,
        /// Number of Kraus operators or POVM elements.
        #[arg(long, default_value_t = 2)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the Wehrl entropy of random pure spin states.
    Wehrl {
        #[arg(long = "two-j")]
        two_j: u32,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the Husimi function of the lowest-entropy state.
        #[arg(long = "emit-husimi")]
        emit_husimi: bool,
    },
}

enum Failure {
    Usage(String),
    Io(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownSuite(_) | Error::InvalidDims(_) | Error::InvalidArgument(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

fn io_failure(path: Option<&Path>, e: io::Error) -> Failure {
    match path {
        Some(p) => Failure::Io(format!("{}: {e}", p.display())),
        None => Failure::Io(e.to_string()),
    }
}

fn write_output(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| io_failure(Some(p), e)),
        None => io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(|e| io_failure(None, e)),
    }
}

fn dims_or(spec: Option<&str>, default: &[usize]) -> Result<HilbertDims, Failure> {
    Ok(match spec {
        Some(s) => parse_dims(s)?,
        None => HilbertDims::new(default.to_vec())?,
    })
}

fn cmd_check(args: CheckArgs) -> Result<bool, Failure> {
    let cfg = SuiteConfig {
        suites: parse_suites(&args.suite)?,
        dims: args.dims.as_deref().map(parse_dims).transpose()?,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        d: args.d,
        two_j: args.two_j,
        exec: Execution::available(),
    };
    let records = run(&cfg)?;
    let body = match args.format {
        Format::Json => render_ndjson(&records),
        Format::Csv => render_csv(&records),
    };
    write_output(args.out.as_deref(), &body)?;
    let summary = Summary::of(&records);
    eprintln!("{summary}");
    Ok(summary.all_passed())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("generated objects serialize");
    s.push('\n');
    s
}

fn cmd_gen(
    kind: Kind,
    dims: Option<&str>,
    count: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let seed = Seed(seed);
    let body = match kind {
        Kind::Density => {
            let d = dims_or(dims, &[2, 2])?;
            to_json(&random_density(&d, d.total(), seed)?)
        }
        Kind::Kraus => {
            let d = dims_or(dims, &[2])?;
            to_json(&random_kraus(d.total(), count, seed)?)
        }
        Kind::Povm => {
            let d = dims_or(dims, &[2])?;
            to_json(&random_povm(d.total(), count, seed)?)
        }
        Kind::Cq => {
            let d = dims_or(dims, &[2, 2, 2])?;
            to_json(&random_cq_state(&d, seed)?)
        }
    };
    write_output(out, &body)
}

fn husimi_path(out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => {
            let mut s = p.as_os_str().to_owned();
            s.push(".husimi.csv");
            PathBuf::from(s)
        }
        None => PathBuf::from("husimi.csv"),
    }
}

fn cmd_wehrl(
    two_j: u32,
    trials: usize,
    seed: u64,
    out: Option<&Path>,
    emit_husimi: bool,
) -> Result<(), Failure> {
    let spin = SpinJ(two_j);
    let scan = wehrl_min_scan(spin, trials, Seed(seed), Execution::available())?;
    let mut csv = Vec::new();
    scan.write_csv(&mut csv).map_err(|e| io_failure(None, e))?;
    write_output(out, &String::from_utf8(csv).expect("CSV is UTF-8"))?;
    if out.is_some() {
        println!("{}", scan.summary());
    } else {
        eprintln!("{}", scan.summary());
    }
    if emit_husimi {
        let row = &scan.rows[scan.argmin_trial];
        let rho = DensityMatrix::pure(
            &random_pure_vector(spin.dim(), Seed(row.seed)),
            HilbertDims::single(spin.dim())?,
        )?;
        let grid = BlochGrid::converged(spin);
        let field = HusimiField::compute(&rho, &[&grid])?;
        let path = husimi_path(out);
        let file = fs::File::create(&path).map_err(|e| io_failure(Some(&path), e))?;
        field
            .write_csv(io::BufWriter::new(file))
            .map_err(|e| io_failure(Some(&path), e))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    init_threads_from_env();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Gen {
            kind,
            dims,
            count,
            seed,
            out,
        } => cmd_gen(kind, dims.as_deref(), count, seed, out.as_deref()).map(|()| true),
        Command::Wehrl {
            two_j,
            trials,
            seed,
            out,
            emit_husimi,
        } => cmd_wehrl(two_j, trials, seed, out.as_deref(), emit_husimi).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!(
                "usage: qssa check --suite <name|all> [--dims a,b,c] [--trials N] [--seed S]"
            );
            eprintln!("suites: ssa, stronger-ssa, sandwich, concavity, gibbs, cpt, improved-subadd, mutual-info, cq-chain, cqq, convexity, holevo, wehrl, counterexample, all");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}
