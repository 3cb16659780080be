//! The anonymous selection lottery in isolation.
//!
//! Each node evaluates the VRF on the round randomness with its secret
//! key, so nobody can predict or bias who is selected; the proof lets
//! everyone verify a claimed selection afterwards. Run with
//! `cargo run --example anonymous_selection`.

use oracle_sim::crypto::{keygen, vrf_evaluate, vrf_verify};

fn main() {
    let round_randomness = b"block 8231 hash";
    let threshold = 0.3;

    let keys: Vec<_> = (0..10).map(keygen).collect();
    println!("threshold {threshold}: expected ~3 of 10 nodes selected\n");

    for (i, key) in keys.iter().enumerate() {
        let out = vrf_evaluate(round_randomness, key).unwrap();
        let selected = out.value <= threshold;
        println!(
            "node {i}: vrf value {:.4} -> {}",
            out.value,
            if selected { "SELECTED" } else { "not selected" }
        );
        if selected {
            // anyone can check the claim against the public key
            assert!(vrf_verify(out.value, &out.proof, round_randomness, &key.public_key()));
            // but the proof binds the claimed value
            let inflated = out.value + 0.1;
            assert!(!vrf_verify(inflated, &out.proof, round_randomness, &key.public_key()));
        }
    }

    println!("\nall selection claims verified; forged values rejected");
}
