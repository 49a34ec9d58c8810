use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oscillator_complex::cli::{
    self, ConfigFile, GaugeChoice, Overrides, Report, RunConfig, CONFIG_ENV,
};
use oscillator_complex::Result;

#[derive(Parser)]
#[command(
    name = "oscillator-complex",
    version,
    about = "Truncated oscillator module and Kuiper complex checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Module structure and compact-operator checks.
    VerifyModule(Flags),
    /// Oscillator representation and equivariance checks.
    VerifyEquivariance(Flags),
    /// Coupled complex, cohomology ranks, symbol and gauge transport.
    Cohomology(Flags),
    /// Harmonic spaces of the Hodge Laplacian.
    Hodge(Flags),
    /// All suites; writes the JSON report to --out or stdout.
    ReportAll(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    /// Fock truncation N.
    #[arg(long)]
    n: Option<usize>,
    /// Grid points per torus axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// identity or random.
    #[arg(long)]
    gauge: Option<GaugeChoice>,
    /// Path of the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Threshold override NAME=VALUE; `*` matches every check.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// TOML configuration file (default from the environment variable).
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
}

impl Flags {
    fn resolve(self) -> Result<RunConfig> {
        let file = self.config.as_deref().map(ConfigFile::load).transpose()?;
        let tolerances = self
            .tol
            .iter()
            .map(|t| cli::parse_tolerance(t))
            .collect::<Result<Vec<_>>>()?;
        let flags = Overrides {
            n: self.n,
            grid: self.grid,
            seed: self.seed,
            gauge: self.gauge,
            out: self.out,
            tolerances,
        };
        RunConfig::resolve(file, flags)
    }
}

fn execute(command: Command) -> Result<i32> {
    let (flags, all) = match &command {
        Command::VerifyModule(f)
        | Command::VerifyEquivariance(f)
        | Command::Cohomology(f)
        | Command::Hodge(f) => (f.clone(), false),
        Command::ReportAll(f) => (f.clone(), true),
    };
    let cfg = flags.resolve()?;
    let report: Report = match command {
        Command::VerifyModule(_) => cli::cmd_verify_module(&cfg)?,
        Command::VerifyEquivariance(_) => cli::cmd_verify_equivariance(&cfg)?,
        Command::Cohomology(_) => {
            let (ranks, expected) = cli::rank_tuple(&cfg)?;
            println!("ranks    {ranks:?}");
            println!("expected {expected:?}");
            cli::cmd_cohomology(&cfg)?
        }
        Command::Hodge(_) => cli::cmd_hodge(&cfg)?,
        Command::ReportAll(_) => cli::cmd_report_all(&cfg)?,
    };
    match (&cfg.out, all) {
        (Some(path), _) => {
            cli::write_report(&report, path)?;
            print!("{}", report.summary());
        }
        (None, true) => print!("{}", report.to_json()),
        (None, false) => print!("{}", report.summary()),
    }
    Ok(cli::exit_code(&report))
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match execute(args.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::EXIT_USAGE as u8)
        }
    }
}
