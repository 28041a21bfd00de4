use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cheshire_cli::commands::{cmd_analyze, cmd_scan, cmd_table1, cmd_weak_values};
use cheshire_cli::config::RunConfig;
use cheshire_cli::error::CliError;
use cheshire_core::ScenarioLabel;

/// Spin-path interferometer simulator and analysis pipeline.
#[derive(Parser)]
#[command(name = "cheshire", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print and save the theoretical weak values and the product-rule gap.
    WeakValues {
        /// JSON config file (defaults used when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides config output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Postselection relative phase chi in radians.
        #[arg(long, default_value_t = 0.0)]
        post_chi: f64,
    },
    /// Simulate one scenario scan: scan_<label>.csv and fit_<label>.json.
    Scan {
        /// Scenario label: REF, ABS_I, ABS_II, MAG_I or MAG_II.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed override for stochastic mode.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full five-scenario pipeline and write table1.json.
    Table1 {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-analyze interferogram CSVs: fit and extract the probed weak value.
    Analyze {
        /// Scan CSV of the probe configuration.
        file: PathBuf,
        /// Scan CSV of the reference (empty interferometer).
        #[arg(long = "ref")]
        reference: PathBuf,
        /// What the supplied file measured: ABS_I, ABS_II, MAG_I or MAG_II.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_label(s: &str) -> Result<ScenarioLabel, CliError> {
    s.parse::<ScenarioLabel>()
        .map_err(CliError::UnknownScenario)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::WeakValues {
            config,
            out,
            post_chi,
        } => {
            let cfg = RunConfig::load(config.as_deref())?;
            let out_dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            cmd_weak_values(&cfg, &out_dir, post_chi)
        }
        Command::Scan {
            scenario,
            config,
            seed,
            out,
        } => {
            let label = parse_label(&scenario)?;
            let cfg = RunConfig::load(config.as_deref())?;
            let out_dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            cmd_scan(&cfg, &out_dir, label, seed)
        }
        Command::Table1 { config, seed, out } => {
            let cfg = RunConfig::load(config.as_deref())?;
            let out_dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            cmd_table1(&cfg, &out_dir, seed)
        }
        Command::Analyze {
            file,
            reference,
            scenario,
            config,
            out,
        } => {
            let label = parse_label(&scenario)?;
            let cfg = RunConfig::load(config.as_deref())?;
            let out_dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            cmd_analyze(&cfg, &out_dir, &file, &reference, label)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
