//! Command-line driver behind the `wrinkle` binary.
//!
//! Exit codes: 0 success, 1 invalid input or I/O failure, 2 solver
//! nonconvergence (the result bundle, including the residual history, is
//! still written).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::benchmarks::{build_case, BenchOptions, Benchmark};
use crate::case::Case;
use crate::constitutive::Model;
use crate::io::{collect_report, format_report, write_bundle};
use crate::run::{run_case, RunOutcome};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "WRINKLE_OUT";
/// Output root when neither `--out` nor [`OUT_ENV`] is given.
pub const DEFAULT_OUT: &str = "results";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NONCONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wrinkle", version, about = "Membrane wrinkling finite element runs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a JSON case and write its result bundle.
    Run {
        case: PathBuf,
        /// Output directory root (default: $WRINKLE_OUT or ./results).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and run a built-in benchmark.
    Bench(BenchArgs),
    /// Check a JSON case without running it.
    Validate { case: PathBuf },
    /// Tabulate reference checks of every result bundle below a directory.
    Report { results: PathBuf },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// bending, shear, corner, airbag or blanket.
    #[arg(required_unless_present = "all")]
    pub name: Option<String>,
    /// Run every benchmark with its defaults.
    #[arg(long, conflicts_with = "name")]
    pub all: bool,
    /// svk, stress, strain or mixed.
    #[arg(long)]
    pub model: Option<Model>,
    /// Elements per side, or refinement factor for bending and shear.
    #[arg(long)]
    pub mesh: Option<usize>,
    /// Load ratios: 2M/PH for bending, T1/T2 for corner.
    #[arg(long, value_delimiter = ',')]
    pub ratio: Vec<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Steps per load stage.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Airbag stabiliser scale.
    #[arg(long)]
    pub stabilizer_scale: Option<f64>,
    /// Blanket weight per unit area.
    #[arg(long)]
    pub weight: Option<f64>,
    /// Do not retry with larger η after a failed solve.
    #[arg(long)]
    pub no_fallback: bool,
    /// Print the case JSON instead of running it.
    #[arg(long)]
    pub print_case: bool,
    /// Output directory root (default: $WRINKLE_OUT or ./results).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Output root: `--out`, then the environment, then `./results`.
pub fn output_root(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Parse `args` (including the program name), execute, and return the exit
/// code. Messages go to stdout, diagnostics to stderr.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run { case, out } => match Case::from_file(&case) {
            Ok(c) => execute(&c, &output_root(out.as_deref()).join(&c.name)),
            Err(e) => fail(&e),
        },
        Command::Validate { case } => match Case::from_file(&case).and_then(|c| c.resolve().map(|_| c)) {
            Ok(c) => {
                println!("{}: valid case '{}' ({} stages, {} probes)", case.display(), c.name, c.stages.len(), c.probes.len());
                EXIT_OK
            }
            Err(e) => fail(&e),
        },
        Command::Report { results } => match collect_report(&results) {
            Ok(rows) => {
                print!("{}", format_report(&rows));
                EXIT_OK
            }
            Err(e) => fail(&e),
        },
        Command::Bench(args) => bench(&args),
    }
}

fn fail(e: &dyn std::error::Error) -> i32 {
    eprintln!("error: {e}");
    let mut source = e.source();
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
    EXIT_INVALID
}

fn bench(args: &BenchArgs) -> i32 {
    let benches: Vec<Benchmark> = if args.all {
        Benchmark::ALL.to_vec()
    } else {
        match args.name.as_deref().unwrap_or_default().parse() {
            Ok(b) => vec![b],
            Err(e) => return fail(&e),
        }
    };
    let opts = BenchOptions {
        model: args.model,
        mesh: args.mesh,
        ratios: (!args.ratio.is_empty()).then(|| args.ratio.clone()),
        eta: args.eta,
        steps: args.steps,
        stabilizer_scale: args.stabilizer_scale,
        weight: args.weight,
        eta_fallback: args.no_fallback.then(Vec::new),
    };
    let root = output_root(args.out.as_deref());
    let mut code = EXIT_OK;
    for b in benches {
        let case = match build_case(b, &opts) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        if args.print_case {
            println!("{}", case.to_json());
            continue;
        }
        let dir = root.join(format!("{}-{}", case.name, case.model));
        code = code.max(execute(&case, &dir));
    }
    code
}

fn execute(case: &Case, dir: &Path) -> i32 {
    let outcome = match run_case(case) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let bundle = match write_bundle(&outcome, dir) {
        Ok(b) => b,
        Err(e) => return fail(&e),
    };
    print!("{}", summary(&outcome));
    println!("results written to {}", bundle.dir.display());
    if outcome.converged() {
        EXIT_OK
    } else {
        EXIT_NONCONVERGED
    }
}

/// Human-readable run summary: probe values at the end of every stage and
/// the reference checks.
pub fn summary(outcome: &RunOutcome) -> String {
    let case = &outcome.case;
    let mut s = String::new();
    let _ = writeln!(s, "case '{}' model {} eta {:e} ({:.2} s)", case.name, case.model, outcome.eta, outcome.elapsed.as_secs_f64());
    for (eta, err) in &outcome.failed_attempts {
        let _ = writeln!(s, "  eta {eta:e} failed: {err}");
    }
    if let Some(e) = outcome.error() {
        let _ = writeln!(s, "  solver stopped: {e}");
    }
    for stage in &case.stages {
        let _ = writeln!(s, "  [{}]", stage.name);
        for p in &case.probes {
            if let Some(v) = outcome.value_at(p.name(), Some(&stage.name)) {
                let _ = writeln!(s, "    {:<30} {v:.6e}", p.name());
            }
        }
    }
    for c in outcome.reference_checks() {
        let measured = c.measured.map_or_else(|| "-".into(), |m| format!("{m:.5e}"));
        let _ = writeln!(
            s,
            "  {} {} @ {}: expected {:.5e}, measured {measured} (tol {:.1}%)",
            if c.pass { "PASS" } else { "FAIL" },
            c.probe,
            c.stage,
            c.expected,
            100.0 * c.rel_tol
        );
    }
    s
}
