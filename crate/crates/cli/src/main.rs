//! `grandnorm`: norms, closure diagnostics, predual bounds and invariant
//! suites on discretized quasi-metric measure spaces.

mod commands;
mod inputs;
mod random;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "grandnorm",
    version,
    about = "Variable-exponent Lebesgue, Morrey and grand norms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one norm of a function on a space.
    Norm {
        #[arg(value_enum)]
        kind: NormKind,
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        grand: GrandArgs,
        /// Shift used by `embedding` (default: middle of the grid).
        #[arg(long)]
        c: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closure and regularity diagnostics.
    Diag {
        #[command(subcommand)]
        kind: DiagKind,
    },
    /// Block-space bounds, pairings and block splitting.
    Predual {
        #[arg(value_enum)]
        kind: PredualKind,
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        predual: PredualArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suites on seeded random instances.
    Verify {
        /// Suite name, or `all`.
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        /// List the suites and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write a generated space, with optional value sections, as a text file.
    Generate {
        /// Space generator, e.g. `graded:8`.
        #[arg(long)]
        space: String,
        #[arg(long)]
        exponent: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        function: Option<String>,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum DiagKind {
    /// Tail and small-shift diagnostics along a refinement family.
    Density(DensityArgs),
    /// Log-Hoelder, Diening and doubling constants of a space and exponent.
    Regularity {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum NormKind {
    Lebesgue,
    Morrey,
    Grand,
    Equivalent,
    Embedding,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PredualKind {
    #[value(name = "scriptL", alias = "script-l")]
    ScriptL,
    Hnorm,
    Pair,
    Split,
}

/// Space and value inputs. Each is a file or a generator spec.
#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Space file or generator (`dyadic:K`, `graded:K`, `snowflake:K,alpha`, `halfline:K,L`).
    #[arg(long)]
    space: String,
    /// Exponent file or generator (`const:v`, `affine:a,b`, `jump:x0,v1,v2`, `power:alpha`).
    #[arg(long, default_value = "const:2")]
    exponent: String,
    /// Morrey exponent file or generator.
    #[arg(long, default_value = "const:0")]
    lambda: String,
    /// Function file or generator.
    #[arg(long, default_value = "const:1")]
    function: String,
    /// Absolute tolerance on the log-norm.
    #[arg(long, default_value_t = grandnorm_core::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug, Clone)]
struct GrandArgs {
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Number of shifts in the grand-norm grid.
    #[arg(long, default_value_t = grandnorm_core::GrandParams::DEFAULT_COUNT)]
    grid: usize,
    /// Relative distance of the extreme shifts from the ends of `(0, p_- - 1)`.
    #[arg(long, default_value_t = grandnorm_core::GrandParams::DEFAULT_OFFSET)]
    offset: f64,
}

#[derive(Args, Debug, Clone)]
struct PredualArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    theta: f64,
    /// Largest shift (default: half of `p_- - 1`).
    #[arg(long)]
    a: Option<f64>,
    /// Shift grid: `dyadic:L` or a comma-separated list.
    #[arg(long, default_value = "dyadic:20")]
    grid: String,
    /// Shift of the block built by `pair` and `split` (default: `a / 3`).
    #[arg(long)]
    kappa: Option<f64>,
    /// Block generator for `pair` (default: the function itself).
    #[arg(long)]
    block: Option<String>,
    /// Exhaustion levels `j0..j1`: balls of radius `2^j` around the first point.
    #[arg(long)]
    exhaustion: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct DensityArgs {
    /// Refinement family: `dyadic` (cells graded toward 0), `graded` (same), `uniform`.
    #[arg(long, default_value = "dyadic")]
    family: String,
    /// Refinement levels `k0..k1`.
    #[arg(long, default_value = "6..12")]
    levels: String,
    /// Function generator evaluated on every level.
    #[arg(long, default_value = "power:0.5")]
    witness: String,
    #[arg(long, default_value = "const:2")]
    exponent: String,
    #[arg(long, default_value = "const:0")]
    lambda: String,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = grandnorm_core::GrandParams::DEFAULT_COUNT)]
    grid: usize,
    #[arg(long, default_value_t = grandnorm_core::GrandParams::DEFAULT_OFFSET)]
    offset: f64,
    /// Relative change between the finest levels accepted as converged.
    #[arg(long, default_value_t = 0.05)]
    trend_tol: f64,
    /// Skip the log-Hoelder and doubling report.
    #[arg(long)]
    no_regularity_check: bool,
    #[arg(long, default_value_t = grandnorm_core::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file, or `json` / `csv` to pick the format on stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<report::Format>,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("GRANDNORM_THREADS") {
        let threads: usize = value.parse().map_err(|_| {
            anyhow::anyhow!("GRANDNORM_THREADS must be a positive integer, got {value:?}")
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Norm {
            kind,
            inputs,
            grand,
            c,
            output,
        } => {
            let sink = report::Sink::new(&output.out, output.format)?;
            sink.write(&commands::norm(kind, &inputs, &grand, c)?)?;
        }
        Command::Diag {
            kind: DiagKind::Density(args),
        } => {
            let sink = report::Sink::new(&args.output.out, args.output.format)?;
            sink.write(&commands::density(&args)?)?;
        }
        Command::Diag {
            kind: DiagKind::Regularity { inputs, output },
        } => {
            let sink = report::Sink::new(&output.out, output.format)?;
            sink.write(&commands::regularity(&inputs)?)?;
        }
        Command::Predual {
            kind,
            inputs,
            predual,
            output,
        } => {
            let sink = report::Sink::new(&output.out, output.format)?;
            sink.write(&commands::predual(kind, &inputs, &predual)?)?;
        }
        Command::Verify {
            suite,
            seed,
            instances,
            list,
            output,
        } => {
            let sink = report::Sink::new(&output.out, output.format)?;
            if list {
                sink.write(&verify::listing())?;
                return Ok(true);
            }
            let ledger = verify::run(&suite, seed, instances)?;
            for line in &ledger.suites {
                eprintln!(
                    "{} {:<22} {} instances, {} violations",
                    if line.passed { "PASS" } else { "FAIL" },
                    line.name,
                    line.instances,
                    line.violations
                );
            }
            let passed = ledger.passed;
            sink.write(&ledger)?;
            return Ok(passed);
        }
        Command::Generate {
            space,
            exponent,
            lambda,
            function,
            out,
        } => {
            let text = commands::generate(
                &space,
                exponent.as_deref(),
                lambda.as_deref(),
                function.as_deref(),
            )?;
            match out {
                Some(path) => std::fs::write(&path, text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
