//! Deviation experiment: what each side earns when it rejects the
//! recommendation.
//!
//! Four matched cells share the same seeds and environment noise, so
//! differences are attributable to strategy alone. Run with
//! `cargo run --release --example payoff_matrix`.

use oracle_sim::agents::{MaliciousStrategy, PublisherStrategy};
use oracle_sim::harness::{payoff_experiment, RunConfig};

fn label(p: PublisherStrategy, m: MaliciousStrategy) -> String {
    let p = match p {
        PublisherStrategy::Recommended => "recommended fee",
        PublisherStrategy::Random => "random fee",
    };
    let m = match m {
        MaliciousStrategy::Rational => "rational deviation",
        MaliciousStrategy::Random { .. } => "random deviation",
        MaliciousStrategy::Fixed { .. } => "fixed deviation",
    };
    format!("{p} / {m}")
}

fn main() {
    let config = RunConfig { tasks: 50, ..RunConfig::default() };
    let cells = payoff_experiment(&config, 10).unwrap();

    println!(
        "{:<40} {:>12} {:>12} {:>8}",
        "cell", "publisher U1", "executor U2", "tasks"
    );
    for cell in &cells {
        println!(
            "{:<40} {:>12.4} {:>12.4} {:>8}",
            label(cell.publisher, cell.malicious),
            cell.mean_leader,
            cell.mean_follower,
            cell.per_task.iter().flatten().count()
        );
    }
    println!("\npublishers earn the most at the recommended fee;");
    println!("malicious executors earn the most playing the rational best response");
}
