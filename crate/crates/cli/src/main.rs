mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leeyang::verify::SuiteName;
use leeyang::Precision;

use commands::{Format, Outcome};
use config::{parse_precision, Failure, Source, TimeGrid};

#[derive(Parser)]
#[command(name = "leeyang", version, about = "Lee-Yang zeros of ferromagnetic Ising models on finite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Principal zeros at a single coupling shift.
    Zeros {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Zero trajectories along a time grid, by ODE and by re-extraction.
    Trace {
        #[command(flatten)]
        source: SourceArgs,
        /// START:STOP:POINTS:SPACING with SPACING linear or log.
        #[arg(long = "t-grid", default_value = "0.01:10:50:log")]
        t_grid: String,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run verification suites; exits 1 when any check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: SuiteName,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: usize,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Graph summary and magnetization weights.
    Report {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct SourceArgs {
    /// Graph JSON file, or an inline JSON document.
    #[arg(long)]
    graph: Option<String>,
    /// g5, cw:<n> or random:<seed>.
    #[arg(long)]
    scenario: Option<String>,
    /// Inverse temperature of the g5 scenario (default: ln(1+√2)/2).
    #[arg(long)]
    beta: Option<f64>,
    /// Vertex count of random:<seed> scenarios.
    #[arg(long, default_value_t = 6)]
    n: usize,
}

impl SourceArgs {
    fn resolve(&self) -> Result<Source, Failure> {
        Source::resolve(self.graph.as_deref(), self.scenario.as_deref(), self.beta, self.n)
    }
}

#[derive(Args)]
struct NumericArgs {
    /// Working precision in bits: 53 or 256.
    #[arg(long, env = "LEEYANG_PRECISION", default_value_t = 53)]
    precision: u32,
    #[arg(long, default_value_t = leeyang::trigpoly::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write every output file into this directory instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn run(cli: Cli) -> Result<(Outcome, OutputArgs, Format), Failure> {
    Ok(match cli.command {
        Command::Zeros {
            source,
            t,
            numeric,
            output,
        } => {
            let p = parse_precision(numeric.precision)?;
            (commands::zeros(&source.resolve()?, t, p, numeric.tol)?, output, Format::Csv)
        }
        Command::Trace {
            source,
            t_grid,
            numeric,
            output,
        } => {
            let p = parse_precision(numeric.precision)?;
            let grid = TimeGrid::parse(&t_grid)?;
            (commands::trace(&source.resolve()?, &grid, p, numeric.tol)?, output, Format::Csv)
        }
        Command::Verify {
            suite,
            seed,
            n_max,
            numeric,
            output,
        } => {
            let p: Precision = parse_precision(numeric.precision)?;
            (commands::verify(suite, seed, n_max, p, numeric.tol)?, output, Format::Json)
        }
        Command::Report { source, t, output } => (commands::report(&source.resolve()?, t)?, output, Format::Json),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(outcome, output, default_format)| {
        match &output.out {
            Some(dir) => {
                outcome.write_to(dir)?;
                if let Some(f) = output.format {
                    print!("{}", outcome.pick(f));
                }
            }
            None => print!("{}", outcome.pick(output.format.unwrap_or(default_format))),
        }
        Ok(outcome)
    });
    let _ = std::io::stdout().flush();
    match result {
        Ok(outcome) => {
            for d in &outcome.diagnostics {
                eprintln!("{d}");
            }
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
