//! One end-to-end simulation run at the default parameters
//! (50 nodes, 40% malicious, expected committee of 5, 200 tasks),
//! printing the per-task metrics CSV to stdout.
//!
//! Run with `cargo run --example single_run > metrics.csv`.

use oracle_sim::harness::{emit_csv, run, RunConfig};

fn main() {
    let config = RunConfig { seed: 42, ..RunConfig::default() };
    let result = run(&config).expect("default config is valid");
    emit_csv(&result.rows, std::io::stdout().lock()).expect("stdout is writable");

    let last = result.rows.last().expect("at least one task");
    eprintln!("tasks: {}", result.rows.len());
    eprintln!("final 10-task malicious average: {:.2}", last.malicious_selected_ma10);
    eprintln!(
        "mean reveal variance: {:.4}",
        result.mean_reveal_variance().unwrap_or(0.0)
    );
}
