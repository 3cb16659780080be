//! Robustness sweep over the malicious fraction, both selection modes,
//! with seed fan-out per grid cell.
//!
//! Run with `cargo run --release --example parameter_sweep`. The same
//! machinery handles the u, committee-size, and quantity axes; see
//! `oracle-sim sweep --help` for the CLI form.

use oracle_sim::harness::{emit_csv, sweep, RunConfig, SweepAxis};

fn main() {
    let config = RunConfig::default();
    let rows = sweep(&config, SweepAxis::Lambda, &[0.1, 0.2, 0.3, 0.4, 0.5], 10).unwrap();
    emit_csv(&rows, std::io::stdout().lock()).unwrap();

    eprintln!("\nreputation vs baseline mean reveal variance:");
    for pair in rows.chunks(2) {
        eprintln!(
            "  lambda {:.1}: {:.4} vs {:.4}",
            pair[0].value, pair[0].mean_reveal_variance, pair[1].mean_reveal_variance
        );
    }
}
