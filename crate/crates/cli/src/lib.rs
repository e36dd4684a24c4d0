//! Batch front-end for the interferometer weak-value simulator; the
//! `cheshire` binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 1 error (including usage errors), 2 when any
//! result row is flagged (`diverged` or `no_events`).

mod grid;
mod output;

pub use output::{PROGRAM_SCHEMA, REPORT_SCHEMA, ROWS_SCHEMA};

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cheshire_core::dsl::{self, ParseError};
use cheshire_core::scenarios::{
    run_delayed_choice, run_grin_snarl, run_original_cheshire, sweep, Estimator, ExperimentConfig,
    Scenario, SweepTable,
};
use cheshire_core::weak::DEFAULT_COUPLING;
use cheshire_core::Method;

use grid::GridSpec;

/// Trials per sampled weak value when `--shots` is omitted.
const DEFAULT_SHOTS: u64 = dsl::DEFAULT_SHOTS;
const OUTPUT_DIR_VAR: &str = "CHESHIRE_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "cheshire",
    version,
    about = "Weak values in a Mach-Zehnder interferometer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one preset scenario
    Run(RunArgs),
    /// Tabulate delayed-choice weak values over a (theta, phi) grid
    Sweep(SweepArgs),
    /// Parse and run a .mzi program
    Exec(ExecArgs),
    /// Print the JSON schema of an output format
    Schema {
        #[arg(value_enum)]
        kind: SchemaKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Original,
    GrinSnarl,
    Delayed,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Meter,
    Sample,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
    Gnuplot,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaKind {
    /// `run delayed` and `sweep --format json`
    Rows,
    /// `run original` and `run grin-snarl`
    Report,
    /// `exec`
    Program,
}

fn angle(s: &str) -> Result<f64, String> {
    dsl::parse_angle(s)
}

#[derive(Args)]
struct EstimatorArgs {
    #[arg(long, value_enum, default_value = "analytic")]
    method: MethodArg,
    /// Meter coupling in (0, 0.1]; meter and sample methods [default: 1e-3]
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    g: Option<f64>,
    /// Trials per weak value; sample method only [default: 100000]
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EstimatorArgs {
    fn method(&self) -> Method {
        match self.method {
            MethodArg::Analytic => Method::Analytic,
            MethodArg::Meter => Method::MeterExact,
            MethodArg::Sample => Method::MeterSampled,
        }
    }

    fn estimator(&self) -> anyhow::Result<Estimator> {
        let g = self.g.unwrap_or(DEFAULT_COUPLING);
        let est = match self.method {
            MethodArg::Analytic => {
                if self.g.is_some() {
                    bail!("--g only applies to --method meter or sample");
                }
                Estimator::Analytic
            }
            MethodArg::Meter => Estimator::Meter { g },
            MethodArg::Sample => Estimator::Sampled {
                g,
                shots: self.shots.unwrap_or(DEFAULT_SHOTS),
                seed: self.seed,
            },
        };
        if self.shots.is_some() && !matches!(est, Estimator::Sampled { .. }) {
            bail!("--shots only applies to --method sample");
        }
        est.validate()?;
        Ok(est)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(value_enum)]
    scenario: ScenarioArg,
    /// Tuner angle (radians, `pi` expressions allowed); delayed only
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Net relative phase of the right arm; delayed only
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid `start:stop:count`, endpoints included
    #[arg(long, allow_hyphen_values = true)]
    theta: GridSpec,
    #[arg(long, allow_hyphen_values = true)]
    phi: GridSpec,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: SweepFormat,
    /// Output file, `-` for standard output [default: sweep.<ext> in $CHESHIRE_OUTPUT_DIR or .]
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExecArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_FLAGGED: u8 = 2;

fn flagged_exit(flagged: usize) -> u8 {
    if flagged > 0 {
        EXIT_FLAGGED
    } else {
        EXIT_OK
    }
}

fn cmd_run(args: RunArgs, out: &mut dyn Write) -> anyhow::Result<u8> {
    let estimator = args.estimator.estimator()?;
    let scenario = match args.scenario {
        ScenarioArg::Original => Scenario::OriginalCheshire,
        ScenarioArg::GrinSnarl => Scenario::GrinSnarl,
        ScenarioArg::Delayed => Scenario::DelayedChoice,
    };
    if scenario != Scenario::DelayedChoice {
        if args.theta.is_some() || args.phi.is_some() {
            bail!("--theta and --phi only apply to the delayed scenario");
        }
        let report = match scenario {
            Scenario::OriginalCheshire => run_original_cheshire(&estimator)?,
            _ => run_grin_snarl(&estimator)?,
        };
        let text = match args.format {
            Format::Json => report.to_json(),
            Format::Csv => report.to_csv(),
        };
        out.write_all(text.as_bytes())?;
        return Ok(EXIT_OK);
    }
    let (shots, seed, g) = match estimator {
        Estimator::Analytic => (0, 0, DEFAULT_COUPLING),
        Estimator::Meter { g } => (0, 0, g),
        Estimator::Sampled { g, shots, seed } => (shots, seed, g),
    };
    let cfg = ExperimentConfig {
        scenario,
        theta: args.theta.unwrap_or(0.0),
        phi: args.phi.unwrap_or(0.0),
        method: args.estimator.method(),
        g,
        shots,
        seed,
    };
    let table = SweepTable::new(vec![run_delayed_choice(&cfg)?]);
    let text = match args.format {
        Format::Json => table.to_json(),
        Format::Csv => table.to_csv(),
    };
    out.write_all(text.as_bytes())?;
    Ok(flagged_exit(table.flagged()))
}

fn default_output(format: SweepFormat) -> PathBuf {
    let ext = match format {
        SweepFormat::Csv => "csv",
        SweepFormat::Json => "json",
        SweepFormat::Gnuplot => "dat",
    };
    let dir = std::env::var_os(OUTPUT_DIR_VAR)
        .filter(|d| !d.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("sweep.{ext}"))
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<u8> {
    let estimator = args.estimator.estimator()?;
    let table = sweep(&args.theta.points(), &args.phi.points(), &estimator)?;
    let body = match args.format {
        SweepFormat::Csv => table.to_csv(),
        SweepFormat::Json => table.to_json(),
        SweepFormat::Gnuplot => output::gnuplot(&table),
    };
    let summary = output::summary(&table);
    match args.output {
        Some(p) if p.as_os_str() == "-" => {
            out.write_all(body.as_bytes())?;
            writeln!(err, "{summary}")?;
        }
        other => {
            let path = other.unwrap_or_else(|| default_output(args.format));
            fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
            writeln!(out, "wrote {}", path.display())?;
            writeln!(out, "{summary}")?;
        }
    }
    Ok(flagged_exit(table.flagged()))
}

fn describe_parse_error(path: &Path, err: &ParseError) -> String {
    match err.position() {
        Some((line, column)) => format!("{}:{line}:{column}: {}", path.display(), err.detail()),
        None => format!("{}: {err}", path.display()),
    }
}

fn cmd_exec(args: ExecArgs, out: &mut dyn Write) -> anyhow::Result<u8> {
    let source = fs::read_to_string(&args.file)
        .with_context(|| format!("cannot read {}", args.file.display()))?;
    let program = match dsl::parse(&source) {
        Ok(p) => p,
        Err(e) => bail!(describe_parse_error(&args.file, &e)),
    };
    let records = dsl::compile_and_run(&program)
        .map_err(|e| anyhow::anyhow!("{}:{}: {}", args.file.display(), e.line, e.source))?;
    let text = match args.format {
        Format::Json => records.to_json(),
        Format::Csv => records.to_csv(),
    };
    out.write_all(text.as_bytes())?;
    Ok(flagged_exit(records.flagged()))
}

/// Run the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_ERROR
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Exec(a) => cmd_exec(a, out),
        Command::Schema { kind } => out
            .write_all(output::schema(kind).as_bytes())
            .map(|_| EXIT_OK)
            .map_err(Into::into),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e:#}");
        EXIT_ERROR
    })
}
