//! How often malicious nodes make it into the committee, with and
//! without reputation weighting.
//!
//! Prints the 10-task moving average of malicious committee members
//! every 20 tasks for one seed, then the per-seed means over 10 seeds.
//! Run with `cargo run --release --example malicious_selection`.

use oracle_sim::harness::{run, RunConfig, SelectionMode};

fn main() {
    let rep = run(&RunConfig { seed: 1, ..RunConfig::default() }).unwrap();
    let base = run(&RunConfig {
        seed: 1,
        selection_mode: SelectionMode::Baseline,
        ..RunConfig::default()
    })
    .unwrap();

    println!("{:>6} {:>12} {:>12}   (10-task moving average, seed 1)", "task", "reputation", "baseline");
    for (r, b) in rep.rows.iter().zip(&base.rows) {
        if r.task % 20 == 0 {
            println!(
                "{:>6} {:>12.2} {:>12.2}",
                r.task, r.malicious_selected_ma10, b.malicious_selected_ma10
            );
        }
    }

    println!("\nper-seed mean malicious selected per task:");
    for seed in 0..10 {
        let rep = run(&RunConfig { seed, ..RunConfig::default() }).unwrap();
        let base = run(&RunConfig {
            seed,
            selection_mode: SelectionMode::Baseline,
            ..RunConfig::default()
        })
        .unwrap();
        println!(
            "  seed {seed}: reputation {:.3}, baseline {:.3}",
            rep.mean_malicious_selected(),
            base.mean_malicious_selected()
        );
    }
}
