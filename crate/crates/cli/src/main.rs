//! `rootpsi` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error
//! (unreadable or malformed input, degenerate data), 3 solver non-convergence
//! when `--strict` is given. Without `--strict` a non-converged solve writes its
//! best iterate, marked `"converged": false`, and exits 0.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

use commands::{
    ChisqArgs, ConstrainedArgs, DynamicsArgs, EstimateArgs, ExperimentArgs, MixtureArgs, PhaseArgs, SampleArgs,
    SpinEstimateArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(rootpsi::Error),
    NonConvergence(String),
}

impl From<rootpsi::Error> for CliError {
    fn from(e: rootpsi::Error) -> Self {
        match e {
            rootpsi::Error::Config(m) => CliError::Usage(m),
            other => CliError::Data(other),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Data(e) => write!(f, "{e}"),
            CliError::NonConvergence(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rootpsi", version, about = "Root estimation of quantum states from measurement samples")]
pub struct Cli {
    /// TOML file with one table of flag defaults per subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for outputs given as relative paths [default: $ROOTPSI_OUTPUT_DIR, else .].
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Exit with code 3 when a solver does not converge.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Run replicates on the calling thread only.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw coordinate/momentum samples or spin projection counts from a state.
    Sample(SampleArgs),
    /// Maximum-likelihood state from coordinate/momentum samples.
    Estimate(EstimateArgs),
    /// Maximum-likelihood state at a fixed mean energy.
    EstimateConstrained(ConstrainedArgs),
    /// Wave function on a grid by alternating projections.
    PhaseRetrieve(PhaseArgs),
    /// Maximum-likelihood spinor from projection counts.
    SpinEstimate(SpinEstimateArgs),
    /// Split a sample into mixture components.
    MixtureDivide(MixtureArgs),
    /// Chi-square fidelity statistic, or goodness of fit of an aggregate column.
    Chisq(ChisqArgs),
    /// Check the averaged equation of motion in a basis.
    DynamicsCheck(DynamicsArgs),
    /// Seeded replicate sweep from a TOML description.
    Experiment(ExperimentArgs),
}

impl Command {
    fn section(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Estimate(_) => "estimate",
            Command::EstimateConstrained(_) => "estimate-constrained",
            Command::PhaseRetrieve(_) => "phase-retrieve",
            Command::SpinEstimate(_) => "spin-estimate",
            Command::MixtureDivide(_) => "mixture-divide",
            Command::Chisq(_) => "chisq",
            Command::DynamicsCheck(_) => "dynamics-check",
            Command::Experiment(_) => "experiment",
        }
    }
}

/// Names accepted as config keys for `section`: its flags, minus globals.
fn known_keys(section: &str) -> Vec<String> {
    let cmd = Cli::command();
    let globals: Vec<String> = cmd.get_arguments().map(|a| a.get_id().to_string()).collect();
    cmd.find_subcommand(section)
        .map(|sub| {
            sub.get_arguments()
                .map(|a| a.get_id().to_string())
                .filter(|id| !globals.contains(id) && id != "help")
                .collect()
        })
        .unwrap_or_default()
}

fn run(cli: Cli) -> Result<(), CliError> {
    let section = cli.command.section();
    let file = match &cli.config {
        Some(path) => settings::load_section(path, section)?,
        None => None,
    };
    let known = known_keys(section);
    let ctx = commands::Context {
        output_dir: cli.output_dir.clone(),
        strict: cli.strict,
        sequential: cli.sequential,
    };
    use settings::merge;
    match &cli.command {
        Command::Sample(a) => commands::sample(&ctx, merge(a, file, &known)?),
        Command::Estimate(a) => commands::estimate(&ctx, merge(a, file, &known)?),
        Command::EstimateConstrained(a) => commands::estimate_constrained(&ctx, merge(a, file, &known)?),
        Command::PhaseRetrieve(a) => commands::phase_retrieve(&ctx, merge(a, file, &known)?),
        Command::SpinEstimate(a) => commands::spin_estimate(&ctx, merge(a, file, &known)?),
        Command::MixtureDivide(a) => commands::mixture_divide(&ctx, merge(a, file, &known)?),
        Command::Chisq(a) => commands::chisq(&ctx, merge(a, file, &known)?),
        Command::DynamicsCheck(a) => commands::dynamics_check(&ctx, merge(a, file, &known)?),
        Command::Experiment(a) => commands::experiment(&ctx, merge(a, file, &known)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rootpsi: {e}");
            ExitCode::from(e.code())
        }
    }
}
