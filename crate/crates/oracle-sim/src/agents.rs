//! Behavior models: publishers, honest executors, rational-malicious
//! executors, and simulated price data sources.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::crypto::KeyPair;
use crate::error::{Error, Result};
use crate::incentive;
use crate::reputation::NodeId;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Honest,
    Malicious,
}

#[derive(Debug, Clone)]
pub struct NodeIdentity {
    pub id: NodeId,
    pub key: KeyPair,
    pub role: Role,
    /// Token stake, bookkeeping only.
    pub stake: f64,
    /// Direction a malicious node shifts its price (+1.0 or -1.0).
    pub attack_sign: f64,
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct SourceId(pub u32);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriceSource {
    pub id: SourceId,
    pub true_price: f64,
    pub noise_sigma: f64,
}

/// Draws one observation: true price plus zero-mean Gaussian noise.
pub fn sample_price(source: &PriceSource, rng: &mut impl Rng) -> f64 {
    let normal = Normal::new(0.0, source.noise_sigma.max(0.0))
        .expect("sigma is non-negative and finite");
    source.true_price + normal.sample(rng)
}

/// Honest executors report their fetched sample unchanged.
pub fn honest_action(sample: f64) -> f64 {
    sample
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MaliciousStrategy {
    /// Best-responds to the posted fee: delta* = (K-P)/K.
    Rational,
    /// Deviation drawn uniformly from [0, delta_max].
    Random { delta_max: f64 },
    /// Always deviates by the given amount.
    Fixed { delta: f64 },
}

/// Price a malicious executor commits: the fetched sample shifted by the
/// strategy's deviation in the node's attack direction. Rational nodes
/// know (P, K) from the public request event.
pub fn malicious_action(
    node: &NodeIdentity,
    sample: f64,
    quantity: f64,
    fee: f64,
    strategy: MaliciousStrategy,
    rng: &mut impl Rng,
) -> Result<f64> {
    if node.role != Role::Malicious {
        return Err(Error::input("malicious_action requires a malicious node"));
    }
    let deviation = match strategy {
        MaliciousStrategy::Rational => incentive::follower_best_response(quantity, fee),
        MaliciousStrategy::Random { delta_max } => {
            if delta_max < 0.0 {
                return Err(Error::input("delta_max must be non-negative"));
            }
            rng.gen_range(0.0..=delta_max)
        }
        MaliciousStrategy::Fixed { delta } => {
            if delta < 0.0 {
                return Err(Error::input("fixed delta must be non-negative"));
            }
            delta
        }
    };
    Ok(sample + node.attack_sign * deviation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PublisherStrategy {
    /// Accept the game-theoretic recommendation.
    Recommended,
    /// Draw the fee uniformly from [0, K].
    Random,
}

/// Fee the publisher escrows for a task.
pub fn publisher_action(
    u: f64,
    quantity: f64,
    strategy: PublisherStrategy,
    rng: &mut impl Rng,
) -> Result<f64> {
    match strategy {
        PublisherStrategy::Recommended => incentive::recommend_fee(u, quantity),
        PublisherStrategy::Random => {
            if quantity <= 0.0 {
                return Err(Error::input("quantity must be positive"));
            }
            Ok(rng.gen_range(0.0..=quantity))
        }
    }
}
