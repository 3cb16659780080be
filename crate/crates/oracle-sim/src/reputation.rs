//! Per-node reputation from submission quality and the selection
//! thresholds derived from it.
//!
//! Each settled task scores every revealer by `e^{-|X_i - mu|}` (Manhattan
//! distance to the task mean) and folds the score into the node's running
//! reputation with memory factor `gamma`:
//!
//! ```text
//! C_i <- C_i^gamma * e^{-|X_i - mu|}
//! ```
//!
//! A fresh node starts at C = 1, so its first update equals the raw score.
//! The selection threshold ("optional range") scales reputation so the
//! expected committee size is M: `Gamma_i = C_i * M / sum(C)`, clamped to
//! [0,1].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Memory factor for the reputation accumulator. 0 forgets history
/// entirely (full replacement each task); values near 1 remember longer.
pub const DEFAULT_MEMORY: f64 = 0.9;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct NodeId(pub u32);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReputationTable {
    entries: BTreeMap<NodeId, f64>,
    memory: f64,
}

impl Default for ReputationTable {
    fn default() -> Self {
        Self::new()
    }
}

impl ReputationTable {
    pub fn new() -> Self {
        Self::with_memory(DEFAULT_MEMORY)
    }

    pub fn with_memory(memory: f64) -> Self {
        ReputationTable {
            entries: BTreeMap::new(),
            memory,
        }
    }

    pub fn memory(&self) -> f64 {
        self.memory
    }

    /// Registers a node at the initial reputation of 1.0.
    pub fn register(&mut self, node: NodeId) {
        self.entries.insert(node, 1.0);
    }

    pub fn get(&self, node: NodeId) -> Option<f64> {
        self.entries.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.entries.iter().map(|(&id, &c)| (id, c))
    }

    /// Flat (node-id, reputation) records for run snapshots.
    pub fn snapshot(&self) -> Vec<(NodeId, f64)> {
        self.iter().collect()
    }

    /// Scores every revealer against the task mean `mean` and folds the
    /// score into its reputation. Nodes absent from `reveals` are
    /// untouched.
    pub fn reputation_update(&mut self, reveals: &[(NodeId, f64)], mean: f64) -> Result<()> {
        if reveals.is_empty() {
            return Err(Error::input("reputation update requires at least one reveal"));
        }
        for &(node, _) in reveals {
            if !self.entries.contains_key(&node) {
                return Err(Error::Unregistered(node));
            }
        }
        for &(node, price) in reveals {
            let score = (-(price - mean).abs()).exp();
            let c = self.entries.get_mut(&node).expect("checked above");
            *c = (c.powf(self.memory) * score).max(f64::MIN_POSITIVE);
        }
        Ok(())
    }

    /// Selection threshold Gamma_i = C_i * M / sum(C), clamped to [0,1].
    pub fn optional_range(&self, node: NodeId, expected_committee: u32) -> Result<f64> {
        if self.entries.is_empty() {
            return Err(Error::EmptyTable);
        }
        let c = self.get(node).ok_or(Error::Unregistered(node))?;
        let total: f64 = self.entries.values().sum();
        Ok((c * f64::from(expected_committee) / total).clamp(0.0, 1.0))
    }
}

/// Reputation-free comparator threshold: uniform M/N.
pub fn baseline_range(nodes: u32, expected_committee: u32) -> Result<f64> {
    if nodes == 0 || expected_committee == 0 || expected_committee > nodes {
        return Err(Error::input(format!(
            "baseline range requires 0 < M <= N, got M={expected_committee}, N={nodes}"
        )));
    }
    Ok(f64::from(expected_committee) / f64::from(nodes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_of(n: u32) -> ReputationTable {
        let mut t = ReputationTable::new();
        for i in 0..n {
            t.register(NodeId(i));
        }
        t
    }

    #[test]
    fn consistent_reveal_scores_one() {
        let mut t = table_of(1);
        t.reputation_update(&[(NodeId(0), 100.0)], 100.0).unwrap();
        assert_eq!(t.get(NodeId(0)), Some(1.0));
    }

    #[test]
    fn unit_distance_scores_inverse_e() {
        let mut t = table_of(1);
        t.reputation_update(&[(NodeId(0), 101.0)], 100.0).unwrap();
        assert!((t.get(NodeId(0)).unwrap() - (-1.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn three_reveal_example() {
        // reveals {100, 100, 103}: mu = 101, distances {1, 1, 2}
        let mut t = table_of(3);
        let reveals = [(NodeId(0), 100.0), (NodeId(1), 100.0), (NodeId(2), 103.0)];
        let mean = reveals.iter().map(|r| r.1).sum::<f64>() / 3.0;
        assert_eq!(mean, 101.0);
        t.reputation_update(&reveals, mean).unwrap();
        assert!((t.get(NodeId(0)).unwrap() - (-1.0_f64).exp()).abs() < 1e-12);
        assert!((t.get(NodeId(1)).unwrap() - (-1.0_f64).exp()).abs() < 1e-12);
        assert!((t.get(NodeId(2)).unwrap() - (-2.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn unregistered_revealer_is_an_error() {
        let mut t = table_of(1);
        let err = t.reputation_update(&[(NodeId(9), 100.0)], 100.0);
        assert!(matches!(err, Err(Error::Unregistered(NodeId(9)))));
        // and the error is atomic: nothing was updated
        assert_eq!(t.get(NodeId(0)), Some(1.0));
    }

    #[test]
    fn non_revealers_unchanged() {
        let mut t = table_of(2);
        t.reputation_update(&[(NodeId(0), 102.0)], 100.0).unwrap();
        assert_eq!(t.get(NodeId(1)), Some(1.0));
    }

    #[test]
    fn uniform_table_gives_m_over_n() {
        let t = table_of(50);
        for i in 0..50 {
            assert!((t.optional_range(NodeId(i), 5).unwrap() - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn skewed_table_example() {
        let mut t = table_of(2);
        t.reputation_update(&[(NodeId(1), 101.0)], 100.0).unwrap();
        // C = {1, e^-1}, M = 1
        let g0 = t.optional_range(NodeId(0), 1).unwrap();
        let g1 = t.optional_range(NodeId(1), 1).unwrap();
        let e1 = (-1.0_f64).exp();
        assert!((g0 - 1.0 / (1.0 + e1)).abs() < 1e-12);
        assert!((g1 - e1 / (1.0 + e1)).abs() < 1e-12);
        assert!((g0 - 0.7311).abs() < 1e-4);
        assert!((g1 - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn range_clamps_at_one() {
        let mut t = table_of(2);
        // drive node 1 very low so node 0's share exceeds 1
        for _ in 0..40 {
            t.reputation_update(&[(NodeId(1), 105.0)], 100.0).unwrap();
        }
        assert_eq!(t.optional_range(NodeId(0), 2).unwrap(), 1.0);
    }

    #[test]
    fn ranges_sum_to_m_without_clamp() {
        let mut t = table_of(10);
        t.reputation_update(
            &(0..10)
                .map(|i| (NodeId(i), 100.0 + f64::from(i) * 0.1))
                .collect::<Vec<_>>(),
            100.45,
        )
        .unwrap();
        let sum: f64 = (0..10)
            .map(|i| t.optional_range(NodeId(i), 3).unwrap())
            .sum();
        assert!((sum - 3.0).abs() < 1e-12);
    }

    #[test]
    fn errors_on_empty_or_unknown() {
        let t = ReputationTable::new();
        assert!(matches!(t.optional_range(NodeId(0), 1), Err(Error::EmptyTable)));
        let t = table_of(1);
        assert!(matches!(
            t.optional_range(NodeId(5), 1),
            Err(Error::Unregistered(_))
        ));
    }

    #[test]
    fn baseline_range_values() {
        assert!((baseline_range(50, 5).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(baseline_range(7, 7).unwrap(), 1.0);
        assert!((baseline_range(50, 15).unwrap() - 0.3).abs() < 1e-15);
        assert!(baseline_range(5, 6).is_err());
        assert!(baseline_range(0, 0).is_err());
    }

    #[test]
    fn reputation_stays_in_unit_interval() {
        let mut t = table_of(1);
        for i in 0..200 {
            let x = 100.0 + f64::from(i % 7);
            t.reputation_update(&[(NodeId(0), x)], 100.0).unwrap();
            let c = t.get(NodeId(0)).unwrap();
            assert!(c > 0.0 && c <= 1.0, "C = {c}");
        }
    }

    #[test]
    fn monotone_in_own_reputation() {
        let mut t = table_of(3);
        t.reputation_update(&[(NodeId(0), 100.5)], 100.0).unwrap();
        let before = t.optional_range(NodeId(0), 2).unwrap();
        // improve node 0, keep others fixed
        t.reputation_update(&[(NodeId(0), 100.0)], 100.0).unwrap();
        let after = t.optional_range(NodeId(0), 2).unwrap();
        assert!(after > before);
    }
}
