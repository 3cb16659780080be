//! Equilibrium fee quotes across the quality-weight range.
//!
//! For each (K, u) the recommender prints the service fee P*, the
//! rational executor's deviation at that fee, and both expected payoffs.
//! Run with `cargo run --example price_quote`.

use oracle_sim::incentive::{alpha_effective, equilibrium};

fn main() {
    println!("{:>6} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "K", "u", "alpha_eff", "fee", "deviation", "U1", "U2");
    for k in [1.0, 10.0, 100.0] {
        for u10 in 0..=10 {
            let u = f64::from(u10) / 10.0;
            let eq = equilibrium(u, k, 5).unwrap();
            println!(
                "{k:>6} {u:>5.1} {:>10.6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
                alpha_effective(u, k).unwrap(),
                eq.fee,
                eq.deviation,
                eq.payoffs.leader,
                eq.payoffs.follower,
            );
        }
        println!();
    }
    println!("paying the full quantity (u = 1) buys honesty: deviation hits 0");
    println!("paying nothing (u = 0) invites the maximal rational deviation of 1");
}
