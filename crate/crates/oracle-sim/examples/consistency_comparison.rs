//! Data-consistency comparison: reputation-weighted selection vs the
//! uniform baseline, same seeds, same noise.
//!
//! Each seed runs the identical task sequence under both selection
//! modes; the printed ratio is the pooled mean per-task variance of
//! revealed prices. Run with `cargo run --release --example
//! consistency_comparison`.

use oracle_sim::harness::{compare_consistency, RunConfig};

fn main() {
    let seeds = 20;
    println!("{:>6} {:>12} {:>12} {:>8}", "seed", "reputation", "baseline", "ratio");
    let (mut rep_sum, mut base_sum) = (0.0, 0.0);
    for seed in 0..seeds {
        let (rep, base) =
            compare_consistency(&RunConfig { seed, ..RunConfig::default() }).unwrap();
        rep_sum += rep;
        base_sum += base;
        println!("{seed:>6} {rep:>12.4} {base:>12.4} {:>8.3}", rep / base);
    }
    println!(
        "\npooled variance ratio over {seeds} seeds: {:.3} (lower is better)",
        rep_sum / base_sum
    );
}
