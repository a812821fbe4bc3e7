//! Command-line runner: analytic scenarios, randomized verification
//! campaigns, and verification of protocol specs from JSON files.
//!
//! Exit status is 0 iff every evaluated verdict is satisfied (and, for
//! campaigns, no instance failed), 1 on violations, 2 on usage or I/O
//! errors. JSON reports are byte-identical for identical seeds.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qfeedback::campaign::{random_campaign, CampaignConfig, CampaignMode};
use qfeedback::error::{Error, Result};
use qfeedback::protocol::run;
use qfeedback::report::{
    analytic_ledger_report, emit_report, protocol_ledger_report, read_protocol_spec, Report,
};
use qfeedback::scenarios::{carnot_feedback_scenario, szilard_scenario};
use qfeedback::thermo::PhysicalConstants;

#[derive(Parser)]
#[command(
    name = "qfeedback",
    version,
    about = "Quantum feedback thermodynamics: scenario ledgers, randomized second-law verification campaigns, and protocol-spec verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Report format: json or text.
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// One-molecule Szilard engine: closed-form ledger and work-bound verdicts.
    Szilard {
        /// Bath (and system) temperature in energy units.
        #[arg(long, default_value_t = 1.0)]
        temp: f64,
        /// Measurement error probability in [0, 0.5].
        #[arg(long, default_value_t = 0.0)]
        error: f64,
        /// Boltzmann constant.
        #[arg(long, default_value_t = 1.0)]
        kb: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Two-bath cycle with an embedded feedback step: efficiency beyond Carnot.
    Carnot {
        #[arg(long)]
        t_hot: f64,
        #[arg(long)]
        t_cold: f64,
        /// Heat drawn from the hot bath per cycle.
        #[arg(long)]
        q_hot: f64,
        /// Boltzmann constant.
        #[arg(long, default_value_t = 1.0)]
        kb: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized verification campaign over seeded instances.
    Campaign {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// protocol | cyclic-feedback-free | cyclic-feedback | information
        #[arg(long, default_value = "protocol")]
        mode: String,
        /// System (or state) dimensions to draw from, comma-separated.
        #[arg(long, default_value = "2")]
        dims: String,
        /// Bath dimensions to draw from, comma-separated.
        #[arg(long, default_value = "4,5,6,7,8")]
        bath_dims: String,
        /// Outcome-count range, inclusive: `2..4` or a single value.
        #[arg(long, default_value = "2..3")]
        outcomes: String,
        /// Bath-count range, inclusive: `1..2` or a single value.
        #[arg(long, default_value = "1")]
        baths: String,
        /// Override every verdict tolerance (each check keeps its own
        /// pinned tolerance when unset).
        #[arg(long)]
        tolerance: Option<f64>,
        /// Record per-instance verdicts in the report.
        #[arg(long)]
        include_instances: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a JSON-serialized protocol spec and verify every applicable bound.
    VerifyFile {
        /// Path to the protocol-spec JSON file.
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad dimension `{s}`")))
        })
        .collect()
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("bad range `{text}` (want `lo..hi` or `n`)"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = lo.trim().parse::<usize>().map_err(|_| bad())?;
        let hi = hi.trim().parse::<usize>().map_err(|_| bad())?;
        Ok((lo, hi))
    } else {
        let n = text.trim().parse::<usize>().map_err(|_| bad())?;
        Ok((n, n))
    }
}

fn execute(cli: Cli) -> Result<Report> {
    match cli.command {
        Command::Szilard { temp, error, kb, output } => {
            let constants = PhysicalConstants::new(kb, 1.0)?;
            let ledger = szilard_scenario(temp, error, &constants)?;
            let report = Report::Analytic(analytic_ledger_report(&ledger));
            emit_report(&report, output.out.as_deref(), output.format.parse()?)?;
            Ok(report)
        }
        Command::Carnot { t_hot, t_cold, q_hot, kb, output } => {
            let constants = PhysicalConstants::new(kb, 1.0)?;
            let ledger = carnot_feedback_scenario(t_hot, t_cold, q_hot, &constants)?;
            let report = Report::Analytic(analytic_ledger_report(&ledger));
            emit_report(&report, output.out.as_deref(), output.format.parse()?)?;
            Ok(report)
        }
        Command::Campaign {
            seed,
            instances,
            mode,
            dims,
            bath_dims,
            outcomes,
            baths,
            tolerance,
            include_instances,
            output,
        } => {
            let config = CampaignConfig {
                seed,
                n_instances: instances,
                system_dims: parse_list(&dims)?,
                bath_dims: parse_list(&bath_dims)?,
                n_outcomes_range: parse_range(&outcomes)?,
                n_baths_range: parse_range(&baths)?,
                tolerance,
                mode: mode.parse::<CampaignMode>()?,
                include_instances,
            };
            let report = Report::Campaign(random_campaign(&config)?);
            emit_report(&report, output.out.as_deref(), output.format.parse()?)?;
            Ok(report)
        }
        Command::VerifyFile { spec, output } => {
            let spec = read_protocol_spec(&spec)?;
            let ledger = run(&spec)?;
            let report = Report::Protocol(Box::new(protocol_ledger_report(&ledger)));
            emit_report(&report, output.out.as_deref(), output.format.parse()?)?;
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(report) => {
            let violations = report.violations();
            if violations == 0 {
                ExitCode::SUCCESS
            } else {
                eprintln!("{violations} violation(s) detected");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
