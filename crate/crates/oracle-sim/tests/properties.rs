//! Property-based checks over the cryptographic bindings, threshold
//! normalization, and escrow arithmetic.

use proptest::prelude::*;

use oracle_sim::crypto::{commit, keygen, vrf_evaluate, vrf_verify};
use oracle_sim::incentive::follower_best_response;
use oracle_sim::reputation::{NodeId, ReputationTable};

proptest! {
    #[test]
    fn vrf_round_trip(seed_bytes in proptest::collection::vec(any::<u8>(), 1..64), key_seed: u64) {
        let key = keygen(key_seed);
        let out = vrf_evaluate(&seed_bytes, &key).unwrap();
        prop_assert!((0.0..=1.0).contains(&out.value));
        prop_assert!(vrf_verify(out.value, &out.proof, &seed_bytes, &key.public_key()));
    }

    #[test]
    fn vrf_tampered_proof_fails(key_seed: u64, byte in 0usize..64, bit in 0u8..8) {
        let key = keygen(key_seed);
        let out = vrf_evaluate(b"prop-seed", &key).unwrap();
        let mut bad = out.proof.clone();
        let idx = byte % bad.len();
        bad[idx] ^= 1 << bit;
        prop_assert!(!vrf_verify(out.value, &bad, b"prop-seed", &key.public_key()));
    }

    #[test]
    fn vrf_wrong_seed_fails(key_seed: u64, other in proptest::collection::vec(any::<u8>(), 1..32)) {
        let key = keygen(key_seed);
        let out = vrf_evaluate(b"the-real-seed", &key).unwrap();
        prop_assume!(other != b"the-real-seed");
        prop_assert!(!vrf_verify(out.value, &out.proof, &other, &key.public_key()));
    }

    #[test]
    fn commit_binds_price_and_key(
        price in -1e9f64..1e9,
        other_price in -1e9f64..1e9,
        seed_a: u64,
        seed_b: u64,
    ) {
        let pk_a = keygen(seed_a).public_key();
        let a = commit(price, &pk_a).unwrap();
        prop_assert_eq!(a, commit(price, &pk_a).unwrap());
        if price != other_price {
            prop_assert_ne!(a, commit(other_price, &pk_a).unwrap());
        }
        if seed_a != seed_b {
            prop_assert_ne!(a, commit(price, &keygen(seed_b).public_key()).unwrap());
        }
    }

    #[test]
    fn thresholds_normalized(
        scores in proptest::collection::vec(0.001f64..1.0, 2..40),
        committee in 1u32..10,
    ) {
        prop_assume!(committee as usize <= scores.len());
        let mut table = ReputationTable::new();
        let reveals: Vec<(NodeId, f64)> = scores
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let id = NodeId(i as u32);
                table.register(id);
                // place the price so the update score equals s exactly
                (id, -s.ln())
            })
            .collect();
        table.reputation_update(&reveals, 0.0).unwrap();
        let gammas: Vec<f64> = reveals
            .iter()
            .map(|(id, _)| table.optional_range(*id, committee).unwrap())
            .collect();
        for &g in &gammas {
            prop_assert!((0.0..=1.0).contains(&g));
        }
        // clamping can only shrink the total; without it the sum is exactly M
        let sum: f64 = gammas.iter().sum();
        prop_assert!(sum <= f64::from(committee) + 1e-9);
        if gammas.iter().all(|&g| g < 1.0) {
            prop_assert!((sum - f64::from(committee)).abs() < 1e-9);
        }
    }

    #[test]
    fn best_response_stays_in_unit_interval(k in 0.1f64..100.0, frac in 0.0f64..=1.0) {
        let fee = k * frac;
        let d = follower_best_response(k, fee);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn escrow_conserved_for_random_small_runs(seed: u64, tasks in 1u32..20) {
        let config = oracle_sim::RunConfig {
            seed,
            tasks,
            nodes: 10,
            committee: 3,
            ..oracle_sim::RunConfig::default()
        };
        let result = oracle_sim::harness::run(&config).unwrap();
        for row in &result.rows {
            let total = row.payout_honest + row.payout_malicious + row.refund;
            prop_assert!((total - row.fee).abs() < 1e-9);
        }
    }
}
