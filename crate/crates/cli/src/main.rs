use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mcsbm_cli::commands::{self, apply_overrides, Overrides};
use mcsbm_cli::config::{ClosedFormOpt, ConfigError, ExperimentConfig, SchemeOpt, VariantOpt};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Printed,
    Normalized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClosedFormArg {
    Printed,
    Corrected,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    PaperIid,
    Exact,
}

/// Channel-model experiment runner: analytic first-hitting-time density
/// curves, hitting probabilities, particle simulation, timing-channel
/// information rates, and a self-validation report.
#[derive(Parser)]
#[command(name = "mcsbm", version, about)]
struct Cli {
    /// TOML experiment configuration (built-in defaults when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files and reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master seed override for simulation-backed commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Density-normalization override for analytic curves.
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,

    /// Mobile closed-form override backing hitting curves.
    #[arg(long = "closed-form", global = true, value_enum)]
    closed_form: Option<ClosedFormArg>,

    /// Increment-scheme override for the particle simulation.
    #[arg(long, global = true, value_enum)]
    scheme: Option<SchemeArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First-hitting-time density curves (closed forms, quadrature oracle,
    /// optional empirical overlay); one CSV per parameter combination.
    Fhtd,
    /// Hitting probability as a function of time per (alpha, D_rx).
    Hitting,
    /// Density of the random TX-RX distance at the release instant.
    DistancePdf,
    /// Particle run: hit-time histogram, empirical CDF, and summary.
    Simulate,
    /// Timing-channel mutual information over the input distribution,
    /// with the maximizing point per parameter combination.
    Air,
    /// Run the oracle suite and write a pass/fail report.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut cfg = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    let overrides = Overrides {
        variant: cli.variant.map(|v| match v {
            VariantArg::Printed => VariantOpt::Printed,
            VariantArg::Normalized => VariantOpt::Normalized,
        }),
        closed_form: cli.closed_form.map(|v| match v {
            ClosedFormArg::Printed => ClosedFormOpt::Printed,
            ClosedFormArg::Corrected => ClosedFormOpt::Corrected,
        }),
        scheme: cli.scheme.map(|v| match v {
            SchemeArg::PaperIid => SchemeOpt::PaperIid,
            SchemeArg::Exact => SchemeOpt::Exact,
        }),
        seed: cli.seed,
    };
    apply_overrides(&mut cfg, &overrides);
    // overrides can re-introduce invalid combinations; re-check everything
    let cfg = match cfg.validated() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };

    let result = match cli.command {
        Command::Fhtd => commands::fhtd::run(&cfg, &cli.out),
        Command::Hitting => commands::hitting::run(&cfg, &cli.out),
        Command::DistancePdf => commands::distance_pdf::run(&cfg, &cli.out),
        Command::Simulate => commands::simulate::run(&cfg, &cli.out),
        Command::Air => commands::air::run(&cfg, &cli.out),
        Command::Validate => {
            return match commands::validate::run(&cfg, &cli.out) {
                Ok((_, true)) => ExitCode::SUCCESS,
                Ok((_, false)) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            };
        }
    };

    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            // configuration mistakes discovered mid-command still count as
            // config errors for the exit-code contract
            if e.downcast_ref::<ConfigError>().is_some() {
                eprintln!("{e:#}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}
