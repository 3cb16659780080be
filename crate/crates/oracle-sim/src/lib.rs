//! Deterministic simulator for a reputation-weighted blockchain price
//! oracle.
//!
//! Nodes self-select into per-task committees through a VRF lottery whose
//! thresholds scale with reputation, submit prices under a binding
//! commit-reveal scheme, and pass a probabilistic outlier screen before
//! aggregation. A Stackelberg pricing engine recommends the service fee
//! that makes honest reporting the rational strategy for both sides.
//!
//! Layers, bottom to top:
//!
//! - [`crypto`]: VRF abstraction and binding commitments.
//! - [`reputation`]: per-node reputation and selection thresholds.
//! - [`incentive`]: payoffs, best responses, fee recommendation.
//! - [`agents`]: publisher, honest, and malicious behavior models.
//! - [`protocol`]: the task lifecycle state machine and escrow.
//! - [`harness`]: seeded experiment runner, sweeps, CSV output.
//!
//! Every run is a pure function of its [`harness::RunConfig`] including
//! the seed; identical configs produce byte-identical CSV. See the
//! `examples/` directory for one runnable program per capability.

pub mod agents;
pub mod crypto;
pub mod error;
pub mod harness;
pub mod incentive;
pub mod protocol;
pub mod reputation;

pub use error::{Error, Result};
pub use harness::{RunConfig, SelectionMode};
pub use reputation::NodeId;
