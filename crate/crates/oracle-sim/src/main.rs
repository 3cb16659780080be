//! Thin command-line front end over the library. All logic lives in the
//! `oracle_sim` modules; this file only parses arguments and routes I/O.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use oracle_sim::harness::{
    self, emit_csv, emit_csv_to_path, payoff_experiment, RunConfig, SweepAxis,
};
use oracle_sim::incentive;

#[derive(Parser)]
#[command(name = "oracle-sim", version, about = "Price-oracle protocol simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one simulation run and write per-task metrics as CSV.
    Run {
        /// JSON config file mirroring RunConfig field names; omitted
        /// fields take the documented defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the final (node_id, reputation) snapshot here.
        #[arg(long)]
        reputation_out: Option<PathBuf>,
        /// Write a line-delimited JSON event transcript here.
        #[arg(long)]
        transcript_out: Option<PathBuf>,
    },
    /// Sweep one axis over a value grid, both selection modes per point.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Axis to vary: u, lambda, m, or k.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Replicate seeds per grid cell.
        #[arg(long, default_value_t = 10)]
        seeds: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the equilibrium quote for one (K, u) point as JSON.
    Price {
        /// Quantity of traded goods K.
        #[arg(long)]
        k: f64,
        /// Normalized quality weight in [0,1].
        #[arg(long)]
        alpha: f64,
        /// Committee size used for the payoff evaluation.
        #[arg(long, default_value_t = 5)]
        n: u32,
    },
    /// Run the deviation experiment and print per-cell mean payoffs.
    Payoffs {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replicate runs per strategy cell.
        #[arg(long, default_value_t = 10)]
        trials: u32,
    },
}

fn load_config(path: Option<&PathBuf>) -> oracle_sim::Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn write_rows<T: harness::CsvRecord>(rows: &[T], out: Option<&PathBuf>) -> oracle_sim::Result<()> {
    match out {
        Some(path) => emit_csv_to_path(rows, path),
        None => emit_csv(rows, std::io::stdout().lock()),
    }
}

fn main() {
    env_logger::init();
    if let Err(err) = real_main() {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn real_main() -> oracle_sim::Result<()> {
    match Cli::parse().command {
        Command::Run { config, out, reputation_out, transcript_out } => {
            let mut config = load_config(config.as_ref())?;
            if transcript_out.is_some() {
                config.record_transcript = true;
            }
            let result = harness::run(&config)?;
            write_rows(&result.rows, out.as_ref())?;
            if let Some(path) = reputation_out {
                let file = std::fs::File::create(path)?;
                harness::emit_reputation_csv(
                    &result.final_reputation,
                    std::io::BufWriter::new(file),
                )?;
            }
            if let Some(path) = transcript_out {
                let file = std::fs::File::create(path)?;
                oracle_sim::protocol::write_transcript(
                    &result.transcript,
                    std::io::BufWriter::new(file),
                )?;
            }
        }
        Command::Sweep { config, axis, values, seeds, out } => {
            let config = load_config(config.as_ref())?;
            let rows = harness::sweep(&config, axis, &values, seeds)?;
            write_rows(&rows, out.as_ref())?;
        }
        Command::Price { k, alpha, n } => {
            let eq = incentive::equilibrium(alpha, k, n)?;
            let quote = serde_json::json!({
                "k": k,
                "u": alpha,
                "alpha_eff": incentive::alpha_effective(alpha, k)?,
                "fee": eq.fee,
                "deviation": eq.deviation,
                "leader_payoff": eq.payoffs.leader,
                "follower_payoff": eq.payoffs.follower,
            });
            println!("{}", serde_json::to_string_pretty(&quote)?);
        }
        Command::Payoffs { config, trials } => {
            let config = load_config(config.as_ref())?;
            let cells = payoff_experiment(&config, trials)?;
            println!("publisher,malicious,mean_leader,mean_follower,tasks_with_malicious");
            for cell in cells {
                let with = cell.per_task.iter().flatten().count();
                let malicious = match cell.malicious {
                    oracle_sim::agents::MaliciousStrategy::Rational => "rational",
                    oracle_sim::agents::MaliciousStrategy::Random { .. } => "random",
                    oracle_sim::agents::MaliciousStrategy::Fixed { .. } => "fixed",
                };
                let publisher = match cell.publisher {
                    oracle_sim::agents::PublisherStrategy::Recommended => "recommended",
                    oracle_sim::agents::PublisherStrategy::Random => "random",
                };
                println!(
                    "{publisher},{malicious},{},{},{with}",
                    harness::fmt_f64(cell.mean_leader),
                    harness::fmt_f64(cell.mean_follower),
                );
            }
        }
    }
    Ok(())
}
