//! Reputation separation: after 200 tasks, honest and malicious nodes
//! should occupy disjoint reputation bands.
//!
//! Prints the mean honest/malicious reputation every 20 tasks, then the
//! final per-node snapshot sorted by reputation. Run with
//! `cargo run --release --example reputation_evolution`.

use oracle_sim::agents::Role;
use oracle_sim::harness::{run, RunConfig};

fn main() {
    let result = run(&RunConfig { seed: 3, ..RunConfig::default() }).unwrap();

    println!("{:>6} {:>14} {:>16}", "task", "honest mean C", "malicious mean C");
    for row in &result.rows {
        if row.task % 20 == 0 {
            println!(
                "{:>6} {:>14.4} {:>16.4}",
                row.task,
                row.reputation_honest_mean,
                row.reputation_malicious_mean.unwrap_or(f64::NAN)
            );
        }
    }

    let roles: std::collections::BTreeMap<_, _> = result.roles.iter().copied().collect();
    let mut snapshot = result.final_reputation.clone();
    snapshot.sort_by(|a, b| b.1.total_cmp(&a.1));

    println!("\nfinal ranking (top 10 and bottom 10):");
    for (node, c) in snapshot.iter().take(10).chain(snapshot.iter().rev().take(10).rev()) {
        println!("  node {:>3}  C = {c:>10.4e}  {:?}", node.0, roles[node]);
    }

    let min_honest = snapshot
        .iter()
        .filter(|(n, _)| roles[n] == Role::Honest)
        .map(|&(_, c)| c)
        .fold(f64::INFINITY, f64::min);
    let max_malicious = snapshot
        .iter()
        .filter(|(n, _)| roles[n] == Role::Malicious)
        .map(|&(_, c)| c)
        .fold(f64::NEG_INFINITY, f64::max);
    println!("\nmin honest C = {min_honest:.4e}, max malicious C = {max_malicious:.4e}");
    println!("separated: {}", min_honest > max_malicious);
}
