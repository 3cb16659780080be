//! Task lifecycle state machine emulating the on-chain contracts:
//! request intake, anonymous selection, commit-reveal, probabilistic
//! filtering, aggregation, reputation update, and escrow settlement.
//!
//! A task moves through strict phases: all commits are collected before
//! any reveal is accepted, filtering runs on the reveals, and settlement
//! pays survivors evenly from the escrowed fee. Round randomness is
//! per-task, chained by hashing the previous task's randomness with the
//! new task id.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::agents::NodeIdentity;
use crate::crypto::{self, VrfOutput};
use crate::error::{Error, Result};
use crate::incentive;
use crate::reputation::{NodeId, ReputationTable};

pub type Randomness = [u8; 32];

/// The request event E = (Q, D, P, K) plus this round's randomness R.
#[derive(Debug, Clone, Serialize)]
pub struct TaskRequest {
    pub id: u64,
    pub sources: Vec<u32>,
    pub fee: f64,
    pub quantity: f64,
    #[serde(serialize_with = "ser_hex")]
    pub randomness: Randomness,
}

fn ser_hex<S: serde::Serializer>(r: &Randomness, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crypto::hex(r))
}

/// Chains the round randomness: digest(prev || Q).
pub fn next_randomness(prev: &[u8], task_id: u64) -> Randomness {
    let mut h = Sha256::new();
    h.update(prev);
    h.update(task_id.to_be_bytes());
    h.finalize().into()
}

/// Opens a task. The fee comes from the recommendation unless the
/// publisher overrides it; the escrow is debited on open.
pub fn open_task(
    id: u64,
    sources: Vec<u32>,
    u: f64,
    quantity: f64,
    prior_randomness: &[u8],
    fee_override: Option<f64>,
) -> Result<TaskRequest> {
    if quantity <= 0.0 {
        return Err(Error::input("quantity must be positive"));
    }
    if sources.is_empty() {
        return Err(Error::input("a task needs at least one data source"));
    }
    let fee = match fee_override {
        Some(f) if f >= 0.0 => f,
        Some(f) => return Err(Error::input(format!("fee must be non-negative, got {f}"))),
        None => incentive::recommend_fee(u, quantity)?,
    };
    Ok(TaskRequest {
        id,
        sources,
        fee,
        quantity,
        randomness: next_randomness(prior_randomness, id),
    })
}

/// Local selection result a node carries into the commit phase.
#[derive(Debug, Clone)]
pub struct SelectionStub {
    pub node: NodeId,
    pub vrf: VrfOutput,
    pub threshold: f64,
}

/// Self-determined selection: the node evaluates the VRF on the round
/// randomness and is selected iff the value falls within its threshold.
/// The proof is only produced for selected nodes.
pub fn try_select(
    node: &NodeIdentity,
    task: &TaskRequest,
    threshold: f64,
) -> Option<SelectionStub> {
    let value = crypto::vrf_value(&task.randomness, &node.key).expect("randomness is non-empty");
    if value <= threshold {
        let vrf = crypto::vrf_evaluate(&task.randomness, &node.key)
            .expect("randomness is non-empty");
        Some(SelectionStub { node: node.id, vrf, threshold })
    } else {
        None
    }
}

/// Credential uploaded in the commit phase: (chi, R_i, xi).
#[derive(Debug, Clone)]
pub struct CommitCredential {
    pub vrf_value: f64,
    pub vrf_proof: Vec<u8>,
    pub commit_digest: [u8; 32],
}

impl SelectionStub {
    pub fn credential(&self, commit_digest: [u8; 32]) -> CommitCredential {
        CommitCredential {
            vrf_value: self.vrf.value,
            vrf_proof: self.vrf.proof.clone(),
            commit_digest,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Submission {
    pub node: NodeId,
    #[serde(serialize_with = "ser_hex")]
    pub commit_digest: [u8; 32],
    pub vrf_value: f64,
    #[serde(skip)]
    pub vrf_proof: Vec<u8>,
    pub revealed_price: Option<f64>,
    #[serde(skip)]
    pub revealed_pk: Option<Vec<u8>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Commit,
    Reveal,
    Settled,
}

#[derive(Debug, Clone)]
pub struct Task {
    pub request: TaskRequest,
    pub phase: Phase,
    submissions: BTreeMap<NodeId, Submission>,
}

impl Task {
    pub fn new(request: TaskRequest) -> Self {
        Task { request, phase: Phase::Commit, submissions: BTreeMap::new() }
    }

    /// Records a commit. The credential must verify under the node's
    /// registered public key and its VRF value must fall within the
    /// node's threshold; duplicates are rejected.
    pub fn accept_commit(
        &mut self,
        node: NodeId,
        public_key: &[u8],
        credential: CommitCredential,
        threshold: f64,
    ) -> Result<()> {
        if self.phase != Phase::Commit {
            return Err(Error::Phase("commit phase is closed"));
        }
        if self.submissions.contains_key(&node) {
            return Err(Error::DuplicateCommit(node));
        }
        let verified = crypto::vrf_verify(
            credential.vrf_value,
            &credential.vrf_proof,
            &self.request.randomness,
            public_key,
        );
        if !verified || credential.vrf_value > threshold {
            return Err(Error::NotSelected);
        }
        self.submissions.insert(
            node,
            Submission {
                node,
                commit_digest: credential.commit_digest,
                vrf_value: credential.vrf_value,
                vrf_proof: credential.vrf_proof,
                revealed_price: None,
                revealed_pk: None,
            },
        );
        Ok(())
    }

    pub fn close_commits(&mut self) -> Result<()> {
        if self.phase != Phase::Commit {
            return Err(Error::Phase("commit phase already closed"));
        }
        self.phase = Phase::Reveal;
        Ok(())
    }

    /// Accepts a reveal iff the (price, pk) pair hashes to the stored
    /// commit digest. A mismatch leaves the node a non-revealer.
    pub fn accept_reveal(&mut self, node: NodeId, price: f64, public_key: &[u8]) -> Result<()> {
        if self.phase != Phase::Reveal {
            return Err(Error::Phase("reveal phase is not open"));
        }
        let Some(sub) = self.submissions.get_mut(&node) else {
            return Err(Error::NoCommit(node));
        };
        if crypto::commit(price, public_key)? != sub.commit_digest {
            return Err(Error::DigestMismatch(node));
        }
        sub.revealed_price = Some(price);
        sub.revealed_pk = Some(public_key.to_vec());
        Ok(())
    }

    /// Nodes that committed (the self-selected committee).
    pub fn committee(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.submissions.keys().copied()
    }

    pub fn committee_size(&self) -> usize {
        self.submissions.len()
    }

    pub fn submission(&self, node: NodeId) -> Option<&Submission> {
        self.submissions.get(&node)
    }

    /// (node, price) pairs for all valid reveals.
    pub fn reveals(&self) -> Vec<(NodeId, f64)> {
        self.submissions
            .values()
            .filter_map(|s| s.revealed_price.map(|p| (s.node, p)))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundOutcome {
    pub selected: BTreeSet<NodeId>,
    pub filtered_out: BTreeSet<NodeId>,
    pub aggregate: Option<f64>,
    pub payouts: BTreeMap<NodeId, f64>,
    pub refund: f64,
    pub malicious_selected_count: u32,
    pub reveal_variance: f64,
    /// Pre-filter mean of the reveals (the reputation reference point).
    pub reveal_mean: Option<f64>,
}

pub fn sample_variance(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Some(values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Screens each reveal independently (survival probability `e^{-|X_i - mu|}`
/// with mu the pre-filter mean) and aggregates the survivors. With no
/// reveals, or none surviving, the task is voided and the full escrow
/// refunds at settlement.
pub fn filter_and_aggregate(task: &Task, rng: &mut impl Rng) -> RoundOutcome {
    let selected: BTreeSet<NodeId> = task.committee().collect();
    let reveals = task.reveals();

    let mut outcome = RoundOutcome {
        selected,
        filtered_out: BTreeSet::new(),
        aggregate: None,
        payouts: BTreeMap::new(),
        refund: 0.0,
        malicious_selected_count: 0,
        reveal_variance: 0.0,
        reveal_mean: None,
    };
    if reveals.is_empty() {
        return outcome;
    }

    let mean = reveals.iter().map(|r| r.1).sum::<f64>() / reveals.len() as f64;
    outcome.reveal_mean = Some(mean);
    let prices: Vec<f64> = reveals.iter().map(|r| r.1).collect();
    outcome.reveal_variance = sample_variance(&prices).unwrap_or(0.0);

    let mut survivors = Vec::new();
    for &(node, price) in &reveals {
        let keep = rng.gen::<f64>() < (-(price - mean).abs()).exp();
        if keep {
            survivors.push(price);
        } else {
            outcome.filtered_out.insert(node);
        }
    }
    if !survivors.is_empty() {
        outcome.aggregate = Some(survivors.iter().sum::<f64>() / survivors.len() as f64);
    }
    outcome
}

/// Settles escrow and reputation. Each of the n revealers is nominally
/// entitled to P/n; survivors are paid, everything else refunds to the
/// publisher. Voided tasks (no surviving reveal) refund in full with no
/// reputation update.
pub fn settle(
    task: &mut Task,
    mut outcome: RoundOutcome,
    table: &mut ReputationTable,
) -> Result<RoundOutcome> {
    if task.phase != Phase::Reveal {
        return Err(Error::Phase("settlement requires a closed reveal phase"));
    }
    let fee = task.request.fee;
    let reveals = task.reveals();

    if outcome.aggregate.is_none() {
        outcome.refund = fee;
        task.phase = Phase::Settled;
        return Ok(outcome);
    }

    let share = fee / reveals.len() as f64;
    let mut paid = 0.0;
    for &(node, _) in &reveals {
        if !outcome.filtered_out.contains(&node) {
            outcome.payouts.insert(node, share);
            paid += share;
        }
    }
    outcome.refund = fee - paid;

    let mean = outcome.reveal_mean.expect("aggregate implies reveals");
    table.reputation_update(&reveals, mean)?;

    task.phase = Phase::Settled;
    Ok(outcome)
}

/// One line per event in a line-delimited JSON transcript.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TranscriptEvent {
    Request {
        task: u64,
        fee: f64,
        quantity: f64,
        randomness: String,
        sources: Vec<u32>,
    },
    Commit {
        task: u64,
        node: u32,
        vrf_value: f64,
        commit_digest: String,
        accepted: bool,
    },
    Reveal {
        task: u64,
        node: u32,
        price: f64,
        accepted: bool,
    },
    Verdict {
        task: u64,
        node: u32,
        survived: bool,
    },
    Outcome {
        task: u64,
        aggregate: Option<f64>,
        refund: f64,
        payout_total: f64,
        committee: u32,
        reveals: u32,
    },
}

pub fn write_transcript<W: std::io::Write>(
    events: &[TranscriptEvent],
    mut writer: W,
) -> Result<()> {
    for event in events {
        serde_json::to_writer(&mut writer, event)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
