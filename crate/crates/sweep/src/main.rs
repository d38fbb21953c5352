use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use su11mzi_sweep::{load_plan, run_oracle_check, run_qfi_sweep, run_ratio_sweep, run_sensitivity_curve, write_svg};
use su11mzi_sweep::{ConfigError, Plan, PlotSpec, SweepError, Table};

const EXIT_VALIDATION: u8 = 1;
const EXIT_TOLERANCE: u8 = 2;

#[derive(Parser)]
#[command(name = "su11mzi")]
#[command(about = "Fisher information and phase sensitivity sweeps for SU(1,1)-fed Mach-Zehnder interferometers")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON sweep configuration; the built-in default when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    /// Add truncated-Fock oracle columns.
    #[arg(long)]
    oracle: bool,
    /// Fock cutoff for every state in oracle computations.
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Also render the table as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Logarithmic ordinate for the SVG.
    #[arg(long)]
    log_y: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fisher informations and bounds versus |α|².
    QfiSweep(SweepArgs),
    /// Phase sensitivity per scheme versus θ.
    SensitivityCurve(SweepArgs),
    /// Sensitivity ratio of two states versus θ.
    RatioSweep(SweepArgs),
    /// Compare closed forms with the truncated-Fock oracle; writes a JSON report.
    OracleCheck(Common),
    /// Render a CSV as SVG.
    Plot {
        /// Input CSV.
        #[arg(long)]
        csv: PathBuf,
        /// Output SVG.
        #[arg(long)]
        out: PathBuf,
        /// Abscissa column; the first column when omitted.
        #[arg(long)]
        x: Option<String>,
        /// Comma-separated columns to plot; all others when omitted.
        #[arg(long, value_delimiter = ',')]
        columns: Option<Vec<String>>,
        #[arg(long)]
        log_y: bool,
        #[arg(long)]
        title: Option<String>,
    },
}

enum Failure {
    Validation(anyhow::Error),
    Tolerance,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self::Validation(e)
    }
}

fn plan_of(c: &Common) -> Result<Plan, ConfigError> {
    load_plan(c.config.as_deref(), c.oracle, c.cutoff)
}

fn write_table(table: &Table, path: &Path) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    table.write_csv(BufWriter::new(file))?;
    Ok(())
}

fn sweep(args: &SweepArgs, run: fn(&Plan) -> Result<Table, SweepError>, title: &str) -> Result<(), Failure> {
    let plan = plan_of(&args.common).map_err(anyhow::Error::from)?;
    let table = run(&plan).map_err(anyhow::Error::from)?;
    write_table(&table, &args.common.out)?;
    if let Some(svg) = &args.svg {
        let spec = PlotSpec {
            log_y: args.log_y,
            title: Some(title.to_string()),
            ..Default::default()
        };
        write_svg(&table, &spec, svg).map_err(anyhow::Error::from)?;
    }
    eprintln!("wrote {} rows to {}", table.len(), args.common.out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::QfiSweep(a) => sweep(&a, run_qfi_sweep, "Fisher information versus transmittance"),
        Command::SensitivityCurve(a) => sweep(&a, run_sensitivity_curve, "Phase sensitivity versus phase shift"),
        Command::RatioSweep(a) => sweep(&a, run_ratio_sweep, "Sensitivity ratio versus phase shift"),
        Command::OracleCheck(c) => {
            let mut plan = plan_of(&c).map_err(anyhow::Error::from)?;
            plan.oracle = true;
            let report = run_oracle_check(&plan).map_err(anyhow::Error::from)?;
            std::fs::write(&c.out, report.to_json()).with_context(|| format!("cannot write {}", c.out.display()))?;
            print!("{}", report.to_text());
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Tolerance)
            }
        }
        Command::Plot {
            csv,
            out,
            x,
            columns,
            log_y,
            title,
        } => {
            let file = File::open(&csv).with_context(|| format!("cannot open {}", csv.display()))?;
            let table = Table::read_csv(file).map_err(anyhow::Error::from)?;
            let spec = PlotSpec {
                x,
                columns,
                log_y,
                title,
            };
            write_svg(&table, &spec, &out).map_err(anyhow::Error::from)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Tolerance) => {
            eprintln!("error: oracle deviation exceeds tolerance");
            ExitCode::from(EXIT_TOLERANCE)
        }
    }
}
