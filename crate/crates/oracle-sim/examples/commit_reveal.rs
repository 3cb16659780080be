//! A hand-driven walk through one task: open, select, commit, reveal,
//! filter, settle. Shows the freeloading defense (commitments bind the
//! submitter's public key) and prints the event transcript as
//! line-delimited JSON.
//!
//! Run with `cargo run --example commit_reveal`.

use oracle_sim::agents::{NodeIdentity, Role};
use oracle_sim::crypto::{commit, keygen};
use oracle_sim::protocol::{
    filter_and_aggregate, open_task, settle, try_select, Task, TranscriptEvent, write_transcript,
};
use oracle_sim::reputation::{NodeId, ReputationTable};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let nodes: Vec<NodeIdentity> = (0..4)
        .map(|i| NodeIdentity {
            id: NodeId(i),
            key: keygen(u64::from(i)),
            role: Role::Honest,
            stake: 0.0,
            attack_sign: 1.0,
        })
        .collect();

    // open: fee comes from the recommender at u = 0.5, K = 10
    let request = open_task(1, vec![0], 0.5, 10.0, b"genesis", None).unwrap();
    println!("task 1 opened, escrowed fee {:.4}\n", request.fee);
    let fee = request.fee;
    let mut task = Task::new(request);
    let mut events = vec![TranscriptEvent::Request {
        task: 1,
        fee,
        quantity: 10.0,
        randomness: oracle_sim::crypto::hex(&task.request.randomness),
        sources: vec![0],
    }];

    // commit: everyone selected here (threshold 1), prices near 100
    let prices = [100.1, 99.9, 100.0, 103.0];
    for (node, &price) in nodes.iter().zip(&prices) {
        let stub = try_select(node, &task.request, 1.0).unwrap();
        let pk = node.key.public_key();
        let digest = commit(price, &pk).unwrap();
        task.accept_commit(node.id, &pk, stub.credential(digest), 1.0).unwrap();
        events.push(TranscriptEvent::Commit {
            task: 1,
            node: node.id.0,
            vrf_value: stub.vrf.value,
            commit_digest: oracle_sim::crypto::hex(&digest),
            accepted: true,
        });
    }
    task.close_commits().unwrap();

    // a freeloader copying node 0's reveal fails: its digest binds its own key
    let copied = task.accept_reveal(nodes[1].id, prices[0], &nodes[0].key.public_key());
    println!("freeloading attempt: {}\n", copied.unwrap_err());

    for (node, &price) in nodes.iter().zip(&prices) {
        task.accept_reveal(node.id, price, &node.key.public_key()).unwrap();
        events.push(TranscriptEvent::Reveal { task: 1, node: node.id.0, price, accepted: true });
    }

    // filter + settle
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let outcome = filter_and_aggregate(&task, &mut rng);
    let mut table = ReputationTable::new();
    for node in &nodes {
        table.register(node.id);
    }
    let outcome = settle(&mut task, outcome, &mut table).unwrap();
    events.push(TranscriptEvent::Outcome {
        task: 1,
        aggregate: outcome.aggregate,
        refund: outcome.refund,
        payout_total: outcome.payouts.values().sum(),
        committee: 4,
        reveals: 4,
    });

    println!("aggregate price: {:?}", outcome.aggregate);
    println!("filtered out: {:?}", outcome.filtered_out);
    println!("payouts: {:?}", outcome.payouts);
    println!("refund to publisher: {:.4}", outcome.refund);
    println!("reputation after settlement:");
    for (node, c) in table.snapshot() {
        println!("  node {node}: {c:.4}");
    }

    println!("\ntranscript:");
    write_transcript(&events, std::io::stdout().lock()).unwrap();
}
