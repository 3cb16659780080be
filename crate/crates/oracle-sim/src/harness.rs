//! Experiment runner: drives the protocol engine over many tasks,
//! compares reputation-weighted selection against the uniform baseline,
//! sweeps parameters with seed fan-out, and runs the payoff deviation
//! experiment. Everything is deterministic given the run seed; results
//! serialize to CSV with a fixed column order.
//!
//! Random streams are split by purpose so paired comparisons share their
//! environment noise (common random numbers): "env" drives price
//! sampling, "filter" drives the screening lottery, "strategy" drives
//! randomized agent choices. Each stream is a per-task ChaCha20 chain
//! keyed by hashing (seed, purpose, task index).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::agents::{
    honest_action, malicious_action, publisher_action, sample_price, MaliciousStrategy,
    NodeIdentity, PriceSource, PublisherStrategy, Role, SourceId,
};
use crate::crypto::{self, keygen, HASH_PRIMITIVE};
use crate::error::{Error, Result};
use crate::incentive::alpha_effective;
use crate::protocol::{
    filter_and_aggregate, open_task, sample_variance, settle, try_select, Randomness, Task,
    TranscriptEvent,
};
use crate::reputation::{baseline_range, NodeId, ReputationTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Thresholds from the reputation table (optional range).
    Reputation,
    /// Uniform thresholds M/N, no reputation influence on selection.
    Baseline,
}

impl std::fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SelectionMode::Reputation => write!(f, "reputation"),
            SelectionMode::Baseline => write!(f, "baseline"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackDirection {
    /// Each malicious node draws a fixed +/- direction once per run.
    PerNodeRandom,
    /// Every malicious node shifts upward.
    FixedPositive,
}

/// Full parameterization of one simulation run. JSON config files use
/// these exact field names; omitted fields take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Node count N.
    pub nodes: u32,
    /// Malicious fraction.
    pub lambda: f64,
    /// Expected committee size M.
    pub committee: u32,
    /// Quantity of traded goods K.
    pub quantity: f64,
    /// Normalized quality weight in [0,1].
    pub u: f64,
    pub tasks: u32,
    pub selection_mode: SelectionMode,
    pub publisher_strategy: PublisherStrategy,
    pub malicious_strategy: MaliciousStrategy,
    pub true_price: f64,
    pub noise_sigma: f64,
    pub attack_direction: AttackDirection,
    /// Collect a line-delimited JSON event transcript (off by default,
    /// it grows linearly with tasks * committee).
    pub record_transcript: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            nodes: 50,
            lambda: 0.4,
            committee: 5,
            quantity: 10.0,
            u: 0.5,
            tasks: 200,
            selection_mode: SelectionMode::Reputation,
            publisher_strategy: PublisherStrategy::Recommended,
            malicious_strategy: MaliciousStrategy::Rational,
            true_price: 100.0,
            noise_sigma: 0.1,
            attack_direction: AttackDirection::PerNodeRandom,
            record_transcript: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda must lie in [0,1], got {}", self.lambda)));
        }
        if self.committee == 0 || self.committee > self.nodes {
            return Err(Error::Config(format!(
                "need 0 < committee <= nodes, got committee={} nodes={}",
                self.committee, self.nodes
            )));
        }
        if self.tasks == 0 {
            return Err(Error::Config("tasks must be at least 1".into()));
        }
        if self.quantity <= 0.0 || !self.quantity.is_finite() {
            return Err(Error::Config(format!("quantity must be positive, got {}", self.quantity)));
        }
        if !(0.0..=1.0).contains(&self.u) {
            return Err(Error::Config(format!("u must lie in [0,1], got {}", self.u)));
        }
        if self.noise_sigma < 0.0 || !self.noise_sigma.is_finite() {
            return Err(Error::Config(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if !self.true_price.is_finite() {
            return Err(Error::Config("true_price must be finite".into()));
        }
        Ok(())
    }
}

/// One row per task. CSV columns, in order:
/// task, fee, committee_size, reveal_count, malicious_selected,
/// malicious_selected_ma10, reveal_variance, survivor_variance,
/// aggregate, payout_honest, payout_malicious, refund,
/// reputation_honest_mean, reputation_malicious_mean,
/// realized_leader, realized_follower.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub task: u64,
    pub fee: f64,
    pub committee_size: u32,
    pub reveal_count: u32,
    pub malicious_selected: u32,
    /// Trailing 10-task moving average of `malicious_selected`.
    pub malicious_selected_ma10: f64,
    pub reveal_variance: Option<f64>,
    pub survivor_variance: Option<f64>,
    pub aggregate: Option<f64>,
    pub payout_honest: f64,
    pub payout_malicious: f64,
    pub refund: f64,
    pub reputation_honest_mean: f64,
    pub reputation_malicious_mean: Option<f64>,
    /// Realized publisher payoff, averaged over this task's malicious
    /// reveals (absent when none were selected).
    pub realized_leader: Option<f64>,
    /// Realized malicious-executor payoff, same population.
    pub realized_follower: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub hash_primitive: &'static str,
    pub reputation_memory: f64,
    pub alpha_eff: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub rows: Vec<MetricsRow>,
    pub final_reputation: Vec<(NodeId, f64)>,
    pub roles: Vec<(NodeId, Role)>,
    pub metadata: RunMetadata,
    pub transcript: Vec<TranscriptEvent>,
}

impl RunResult {
    /// Mean per-task reveal variance over tasks that produced one.
    pub fn mean_reveal_variance(&self) -> Option<f64> {
        let vals: Vec<f64> = self.rows.iter().filter_map(|r| r.reveal_variance).collect();
        mean(&vals)
    }

    pub fn mean_malicious_selected(&self) -> f64 {
        let vals: Vec<f64> =
            self.rows.iter().map(|r| f64::from(r.malicious_selected)).collect();
        mean(&vals).unwrap_or(0.0)
    }
}

fn stream(seed: u64, purpose: &str, task: u64) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"oracle-sim/stream/v1");
    h.update(seed.to_be_bytes());
    h.update(purpose.as_bytes());
    h.update(task.to_be_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

fn genesis_randomness(seed: u64) -> Randomness {
    let mut h = Sha256::new();
    h.update(b"oracle-sim/genesis/v1");
    h.update(seed.to_be_bytes());
    h.finalize().into()
}

fn node_key_seed(run_seed: u64, index: u32) -> u64 {
    let mut h = Sha256::new();
    h.update(b"oracle-sim/node-key/v1");
    h.update(run_seed.to_be_bytes());
    h.update(index.to_be_bytes());
    let digest: [u8; 32] = h.finalize().into();
    u64::from_be_bytes(digest[..8].try_into().expect("8 bytes"))
}

fn build_nodes(config: &RunConfig) -> Vec<NodeIdentity> {
    let malicious = (config.lambda * f64::from(config.nodes)).round() as u32;
    let mut sign_rng = stream(config.seed, "attack-signs", 0);
    (0..config.nodes)
        .map(|i| {
            let role = if i < malicious { Role::Malicious } else { Role::Honest };
            let attack_sign = match (role, config.attack_direction) {
                (Role::Malicious, AttackDirection::PerNodeRandom) => {
                    if sign_rng.gen_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                }
                _ => 1.0,
            };
            NodeIdentity {
                id: NodeId(i),
                key: keygen(node_key_seed(config.seed, i)),
                role,
                stake: 0.0,
                attack_sign,
            }
        })
        .collect()
}

/// Executes `config.tasks` sequential tasks through the protocol engine.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    config.validate()?;
    let nodes = build_nodes(config);
    let mut table = ReputationTable::new();
    for node in &nodes {
        table.register(node.id);
    }
    let source = PriceSource {
        id: SourceId(0),
        true_price: config.true_price,
        noise_sigma: config.noise_sigma,
    };
    let alpha_eff = alpha_effective(config.u, config.quantity)?;
    let uniform_threshold = baseline_range(config.nodes, config.committee)?;

    let mut randomness = genesis_randomness(config.seed);
    let mut rows = Vec::with_capacity(config.tasks as usize);
    let mut transcript = Vec::new();

    for q in 1..=u64::from(config.tasks) {
        let mut env_rng = stream(config.seed, "env", q);
        let mut filter_rng = stream(config.seed, "filter", q);
        let mut strategy_rng = stream(config.seed, "strategy", q);

        let fee = publisher_action(
            config.u,
            config.quantity,
            config.publisher_strategy,
            &mut strategy_rng,
        )?;
        let request = open_task(q, vec![0], config.u, config.quantity, &randomness, Some(fee))?;
        randomness = request.randomness;
        if config.record_transcript {
            transcript.push(TranscriptEvent::Request {
                task: q,
                fee: request.fee,
                quantity: request.quantity,
                randomness: crypto::hex(&request.randomness),
                sources: request.sources.clone(),
            });
        }
        let mut task = Task::new(request);

        // selection + commit phase; (node, fetched sample, submitted price)
        let mut committed: Vec<(&NodeIdentity, f64, f64)> = Vec::new();
        for node in &nodes {
            let threshold = match config.selection_mode {
                SelectionMode::Reputation => table.optional_range(node.id, config.committee)?,
                SelectionMode::Baseline => uniform_threshold,
            };
            let Some(stub) = try_select(node, &task.request, threshold) else {
                continue;
            };
            let sample = sample_price(&source, &mut env_rng);
            let price = match node.role {
                Role::Honest => honest_action(sample),
                Role::Malicious => malicious_action(
                    node,
                    sample,
                    config.quantity,
                    fee,
                    config.malicious_strategy,
                    &mut strategy_rng,
                )?,
            };
            let pk = node.key.public_key();
            let digest = crypto::commit(price, &pk)?;
            task.accept_commit(node.id, &pk, stub.credential(digest), threshold)?;
            if config.record_transcript {
                transcript.push(TranscriptEvent::Commit {
                    task: q,
                    node: node.id.0,
                    vrf_value: stub.vrf.value,
                    commit_digest: crypto::hex(&digest),
                    accepted: true,
                });
            }
            committed.push((node, sample, price));
        }
        task.close_commits()?;

        for (node, _, price) in &committed {
            task.accept_reveal(node.id, *price, &node.key.public_key())?;
            if config.record_transcript {
                transcript.push(TranscriptEvent::Reveal {
                    task: q,
                    node: node.id.0,
                    price: *price,
                    accepted: true,
                });
            }
        }

        let outcome = filter_and_aggregate(&task, &mut filter_rng);
        if config.record_transcript {
            for (node, _) in task.reveals() {
                transcript.push(TranscriptEvent::Verdict {
                    task: q,
                    node: node.0,
                    survived: !outcome.filtered_out.contains(&node),
                });
            }
        }

        // realized payoffs, conditioned on this task's malicious reveals
        let reveal_count = task.reveals().len();
        let (mut realized_leader, mut realized_follower) = (None, None);
        if let Some(mu) = outcome.reveal_mean {
            let n = reveal_count as f64;
            let mut u1s = Vec::new();
            let mut u2s = Vec::new();
            for (node, sample, price) in &committed {
                if node.role != Role::Malicious {
                    continue;
                }
                let survive = (-(price - mu).abs()).exp();
                let deviation = (price - sample).abs();
                u2s.push(survive * (fee / n + config.quantity * deviation / n));
                u1s.push(alpha_eff * (-deviation).exp() - (1.0 - alpha_eff) * survive * fee);
            }
            realized_leader = mean(&u1s);
            realized_follower = mean(&u2s);
        }

        let survivor_prices: Vec<f64> = task
            .reveals()
            .iter()
            .filter(|(n, _)| !outcome.filtered_out.contains(n))
            .map(|r| r.1)
            .collect();
        let survivor_variance = sample_variance(&survivor_prices);
        let reveal_variance = if reveal_count >= 2 { Some(outcome.reveal_variance) } else { None };

        let malicious_selected =
            committed.iter().filter(|(n, _, _)| n.role == Role::Malicious).count() as u32;

        let outcome = settle(&mut task, outcome, &mut table)?;
        if config.record_transcript {
            transcript.push(TranscriptEvent::Outcome {
                task: q,
                aggregate: outcome.aggregate,
                refund: outcome.refund,
                payout_total: outcome.payouts.values().sum(),
                committee: task.committee_size() as u32,
                reveals: reveal_count as u32,
            });
        }

        let mut payout_by_role = BTreeMap::from([(Role::Honest, 0.0), (Role::Malicious, 0.0)]);
        for (node, amount) in &outcome.payouts {
            let role = nodes[node.0 as usize].role;
            *payout_by_role.get_mut(&role).expect("both roles present") += amount;
        }

        let honest_reps: Vec<f64> = nodes
            .iter()
            .filter(|n| n.role == Role::Honest)
            .map(|n| table.get(n.id).expect("registered"))
            .collect();
        let malicious_reps: Vec<f64> = nodes
            .iter()
            .filter(|n| n.role == Role::Malicious)
            .map(|n| table.get(n.id).expect("registered"))
            .collect();

        rows.push(MetricsRow {
            task: q,
            fee,
            committee_size: task.committee_size() as u32,
            reveal_count: reveal_count as u32,
            malicious_selected,
            malicious_selected_ma10: 0.0,
            reveal_variance,
            survivor_variance,
            aggregate: outcome.aggregate,
            payout_honest: payout_by_role[&Role::Honest],
            payout_malicious: payout_by_role[&Role::Malicious],
            refund: outcome.refund,
            reputation_honest_mean: mean(&honest_reps).unwrap_or(f64::NAN),
            reputation_malicious_mean: mean(&malicious_reps),
            realized_leader,
            realized_follower,
        });
    }

    // trailing 10-task moving average
    let counts: Vec<f64> = rows.iter().map(|r| f64::from(r.malicious_selected)).collect();
    for (i, row) in rows.iter_mut().enumerate() {
        let start = i.saturating_sub(9);
        let window = &counts[start..=i];
        row.malicious_selected_ma10 = window.iter().sum::<f64>() / window.len() as f64;
    }

    Ok(RunResult {
        rows,
        final_reputation: table.snapshot(),
        roles: nodes.iter().map(|n| (n.id, n.role)).collect(),
        metadata: RunMetadata {
            hash_primitive: HASH_PRIMITIVE,
            reputation_memory: table.memory(),
            alpha_eff,
        },
        transcript,
    })
}

/// Runs the same seed under both selection modes and returns the mean
/// per-task reveal variance for (reputation, baseline).
pub fn compare_consistency(config: &RunConfig) -> Result<(f64, f64)> {
    let rep = run(&RunConfig { selection_mode: SelectionMode::Reputation, ..config.clone() })?;
    let base = run(&RunConfig { selection_mode: SelectionMode::Baseline, ..config.clone() })?;
    Ok((
        rep.mean_reveal_variance().unwrap_or(0.0),
        base.mean_reveal_variance().unwrap_or(0.0),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    U,
    Lambda,
    Committee,
    K,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::U => "u",
            SweepAxis::Lambda => "lambda",
            SweepAxis::Committee => "committee",
            SweepAxis::K => "k",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "u" => Ok(SweepAxis::U),
            "lambda" => Ok(SweepAxis::Lambda),
            "m" | "committee" => Ok(SweepAxis::Committee),
            "k" | "quantity" => Ok(SweepAxis::K),
            other => Err(Error::Config(format!(
                "unknown sweep axis {other:?}; expected u, lambda, m, or k"
            ))),
        }
    }
}

/// One aggregated row per (axis value, selection mode). CSV columns:
/// axis, value, mode, seeds, u, alpha_eff, mean_reveal_variance,
/// mean_malicious_selected.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub axis: &'static str,
    pub value: f64,
    pub mode: SelectionMode,
    pub seeds: u32,
    pub u: f64,
    pub alpha_eff: f64,
    pub mean_reveal_variance: f64,
    pub mean_malicious_selected: f64,
}

fn derive_seed(master: u64, label: &str, index: u64, replicate: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"oracle-sim/seed-fanout/v1");
    h.update(master.to_be_bytes());
    h.update(label.as_bytes());
    h.update(index.to_be_bytes());
    h.update(replicate.to_be_bytes());
    let digest: [u8; 32] = h.finalize().into();
    u64::from_be_bytes(digest[..8].try_into().expect("8 bytes"))
}

fn apply_axis(config: &RunConfig, axis: SweepAxis, value: f64) -> Result<RunConfig> {
    let mut c = config.clone();
    match axis {
        SweepAxis::U => c.u = value,
        SweepAxis::Lambda => c.lambda = value,
        SweepAxis::Committee => {
            if value <= 0.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!(
                    "committee axis values must be positive integers, got {value}"
                )));
            }
            c.committee = value as u32;
        }
        SweepAxis::K => c.quantity = value,
    }
    c.validate()?;
    Ok(c)
}

/// Sweeps one axis over `values`, running `seeds_per_cell` replicates of
/// both selection modes at each grid point. Replicate seeds derive from
/// the master seed by hashing, so cells are independent but reproducible.
pub fn sweep(
    config: &RunConfig,
    axis: SweepAxis,
    values: &[f64],
    seeds_per_cell: u32,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one axis value".into()));
    }
    if seeds_per_cell == 0 {
        return Err(Error::Config("sweep needs at least one seed per cell".into()));
    }
    let mut out = Vec::new();
    for (i, &value) in values.iter().enumerate() {
        let cell = apply_axis(config, axis, value)?;
        for mode in [SelectionMode::Reputation, SelectionMode::Baseline] {
            let mut variances = Vec::new();
            let mut selected = Vec::new();
            for r in 0..u64::from(seeds_per_cell) {
                let result = run(&RunConfig {
                    seed: derive_seed(config.seed, axis.name(), i as u64, r),
                    selection_mode: mode,
                    ..cell.clone()
                })?;
                if let Some(v) = result.mean_reveal_variance() {
                    variances.push(v);
                }
                selected.push(result.mean_malicious_selected());
            }
            out.push(SweepRow {
                axis: axis.name(),
                value,
                mode,
                seeds: seeds_per_cell,
                u: cell.u,
                alpha_eff: alpha_effective(cell.u, cell.quantity)?,
                mean_reveal_variance: mean(&variances).unwrap_or(0.0),
                mean_malicious_selected: mean(&selected).unwrap_or(0.0),
            });
        }
    }
    Ok(out)
}

/// One strategy cell of the payoff experiment.
#[derive(Debug, Clone)]
pub struct PayoffCell {
    pub publisher: PublisherStrategy,
    pub malicious: MaliciousStrategy,
    /// Per-task realized (U1, U2), in replicate-major task order. `None`
    /// where the task drew no malicious committee member; indices align
    /// across cells for paired comparisons.
    pub per_task: Vec<Option<(f64, f64)>>,
    pub mean_leader: f64,
    pub mean_follower: f64,
}

/// Fig.-5-style deviation test: matched batches under
/// {recommended, random fee} x {rational, random deviation}. All four
/// cells share replicate seeds, so environment noise and the screening
/// lottery are common random numbers.
pub fn payoff_experiment(config: &RunConfig, trials: u32) -> Result<Vec<PayoffCell>> {
    if trials == 0 {
        return Err(Error::Config("payoff experiment needs at least one trial".into()));
    }
    let cells = [
        (PublisherStrategy::Recommended, MaliciousStrategy::Rational),
        (PublisherStrategy::Recommended, MaliciousStrategy::Random { delta_max: 1.0 }),
        (PublisherStrategy::Random, MaliciousStrategy::Rational),
        (PublisherStrategy::Random, MaliciousStrategy::Random { delta_max: 1.0 }),
    ];
    let mut out = Vec::with_capacity(cells.len());
    for (publisher, malicious) in cells {
        let mut per_task = Vec::with_capacity((trials * config.tasks) as usize);
        for r in 0..u64::from(trials) {
            let result = run(&RunConfig {
                seed: derive_seed(config.seed, "payoff", 0, r),
                publisher_strategy: publisher,
                malicious_strategy: malicious,
                ..config.clone()
            })?;
            for row in &result.rows {
                per_task.push(match (row.realized_leader, row.realized_follower) {
                    (Some(l), Some(f)) => Some((l, f)),
                    _ => None,
                });
            }
        }
        let leaders: Vec<f64> = per_task.iter().flatten().map(|p| p.0).collect();
        let followers: Vec<f64> = per_task.iter().flatten().map(|p| p.1).collect();
        out.push(PayoffCell {
            publisher,
            malicious,
            mean_leader: mean(&leaders).unwrap_or(f64::NAN),
            mean_follower: mean(&followers).unwrap_or(f64::NAN),
            per_task,
        });
    }
    Ok(out)
}

/// Anything that knows how to render itself as one CSV record.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

/// 17 significant digits: round-trips f64 exactly, so re-running the
/// same config yields byte-identical files.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl CsvRecord for MetricsRow {
    fn header() -> &'static [&'static str] {
        &[
            "task",
            "fee",
            "committee_size",
            "reveal_count",
            "malicious_selected",
            "malicious_selected_ma10",
            "reveal_variance",
            "survivor_variance",
            "aggregate",
            "payout_honest",
            "payout_malicious",
            "refund",
            "reputation_honest_mean",
            "reputation_malicious_mean",
            "realized_leader",
            "realized_follower",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.task.to_string(),
            fmt_f64(self.fee),
            self.committee_size.to_string(),
            self.reveal_count.to_string(),
            self.malicious_selected.to_string(),
            fmt_f64(self.malicious_selected_ma10),
            fmt_opt(self.reveal_variance),
            fmt_opt(self.survivor_variance),
            fmt_opt(self.aggregate),
            fmt_f64(self.payout_honest),
            fmt_f64(self.payout_malicious),
            fmt_f64(self.refund),
            fmt_f64(self.reputation_honest_mean),
            fmt_opt(self.reputation_malicious_mean),
            fmt_opt(self.realized_leader),
            fmt_opt(self.realized_follower),
        ]
    }
}

impl CsvRecord for SweepRow {
    fn header() -> &'static [&'static str] {
        &[
            "axis",
            "value",
            "mode",
            "seeds",
            "u",
            "alpha_eff",
            "mean_reveal_variance",
            "mean_malicious_selected",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.axis.to_string(),
            fmt_f64(self.value),
            self.mode.to_string(),
            self.seeds.to_string(),
            fmt_f64(self.u),
            fmt_f64(self.alpha_eff),
            fmt_f64(self.mean_reveal_variance),
            fmt_f64(self.mean_malicious_selected),
        ]
    }
}

/// Writes header + rows. An empty row slice yields a header-only file.
pub fn emit_csv<T: CsvRecord>(rows: &[T], mut writer: impl std::io::Write) -> Result<()> {
    writeln!(writer, "{}", T::header().join(","))?;
    for row in rows {
        writeln!(writer, "{}", row.record().join(","))?;
    }
    Ok(())
}

pub fn emit_csv_to_path<T: CsvRecord>(rows: &[T], path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    emit_csv(rows, std::io::BufWriter::new(file))
}

/// Writes the final reputation snapshot as flat (node_id, reputation)
/// records.
pub fn emit_reputation_csv(
    snapshot: &[(NodeId, f64)],
    mut writer: impl std::io::Write,
) -> Result<()> {
    writeln!(writer, "node_id,reputation")?;
    for (node, c) in snapshot {
        writeln!(writer, "{},{}", node.0, fmt_f64(*c))?;
    }
    Ok(())
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PairedT {
    pub t: f64,
    /// One-sided p-value for H1: mean(a - b) > 0.
    pub p: f64,
    pub n: usize,
}

/// Paired one-sided t-test on matched samples. Returns `None` when fewer
/// than two pairs exist or the differences have zero variance.
pub fn paired_one_sided_t(a: &[f64], b: &[f64]) -> Option<PairedT> {
    assert_eq!(a.len(), b.len(), "paired test requires matched samples");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len();
    if n < 2 {
        return None;
    }
    let m = mean(&diffs)?;
    let var = sample_variance(&diffs)?;
    if var == 0.0 {
        return None;
    }
    let t = m / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).ok()?;
    Some(PairedT { t, p: 1.0 - dist.cdf(t), n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig { tasks: 30, ..RunConfig::default() }
    }

    #[test]
    fn default_config_is_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_configs_fail_before_running() {
        for bad in [
            RunConfig { lambda: 1.5, ..small() },
            RunConfig { committee: 0, ..small() },
            RunConfig { committee: 60, ..small() },
            RunConfig { tasks: 0, ..small() },
            RunConfig { quantity: 0.0, ..small() },
            RunConfig { u: -0.1, ..small() },
            RunConfig { noise_sigma: -1.0, ..small() },
        ] {
            assert!(matches!(run(&bad), Err(Error::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn emits_one_row_per_task() {
        let result = run(&small()).unwrap();
        assert_eq!(result.rows.len(), 30);
        for (i, row) in result.rows.iter().enumerate() {
            assert_eq!(row.task, i as u64 + 1);
        }
    }

    #[test]
    fn run_is_deterministic() {
        let a = run(&small()).unwrap();
        let b = run(&small()).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.final_reputation, b.final_reputation);
    }

    #[test]
    fn csv_is_byte_identical_across_runs() {
        let mut bufs = Vec::new();
        for _ in 0..2 {
            let result = run(&small()).unwrap();
            let mut buf = Vec::new();
            emit_csv(&result.rows, &mut buf).unwrap();
            bufs.push(buf);
        }
        assert_eq!(bufs[0], bufs[1]);
        assert!(!bufs[0].is_empty());
    }

    #[test]
    fn different_seeds_diverge() {
        let a = run(&small()).unwrap();
        let b = run(&RunConfig { seed: 1, ..small() }).unwrap();
        assert_ne!(a.rows, b.rows);
    }

    #[test]
    fn saturated_committee_selects_everyone() {
        let config = RunConfig { nodes: 5, committee: 5, lambda: 0.0, tasks: 1, ..small() };
        for mode in [SelectionMode::Reputation, SelectionMode::Baseline] {
            let result = run(&RunConfig { selection_mode: mode, ..config.clone() }).unwrap();
            assert_eq!(result.rows[0].committee_size, 5);
        }
    }

    #[test]
    fn noiseless_honest_network_has_zero_variance() {
        let config = RunConfig { lambda: 0.0, noise_sigma: 0.0, tasks: 20, ..small() };
        let (rep, base) = compare_consistency(&config).unwrap();
        assert_eq!(rep, 0.0);
        assert_eq!(base, 0.0);
        let result = run(&config).unwrap();
        for row in &result.rows {
            if row.reveal_count > 0 {
                assert_eq!(row.aggregate, Some(100.0));
            }
            assert_eq!(row.malicious_selected, 0);
            assert_eq!(row.reputation_malicious_mean, None);
        }
    }

    #[test]
    fn escrow_conserved_every_task() {
        let result = run(&RunConfig { tasks: 50, ..small() }).unwrap();
        for row in &result.rows {
            let total = row.payout_honest + row.payout_malicious + row.refund;
            assert!((total - row.fee).abs() < 1e-9, "task {}", row.task);
        }
    }

    #[test]
    fn moving_average_matches_direct_computation() {
        let result = run(&small()).unwrap();
        let counts: Vec<f64> =
            result.rows.iter().map(|r| f64::from(r.malicious_selected)).collect();
        for (i, row) in result.rows.iter().enumerate() {
            let start = i.saturating_sub(9);
            let expect = counts[start..=i].iter().sum::<f64>() / (i - start + 1) as f64;
            assert_eq!(row.malicious_selected_ma10, expect);
        }
    }

    #[test]
    fn transcript_disabled_by_default_and_recordable() {
        let result = run(&small()).unwrap();
        assert!(result.transcript.is_empty());
        let result = run(&RunConfig { record_transcript: true, tasks: 3, ..small() }).unwrap();
        assert!(!result.transcript.is_empty());
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = small();
        let json = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn partial_json_config_takes_defaults() {
        let config: RunConfig = serde_json::from_str(r#"{"seed": 7, "tasks": 5}"#).unwrap();
        assert_eq!(config.seed, 7);
        assert_eq!(config.tasks, 5);
        assert_eq!(config.nodes, 50);
        assert_eq!(config.selection_mode, SelectionMode::Reputation);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sede": 7}"#).is_err());
    }

    #[test]
    fn empty_rows_yield_header_only_csv() {
        let mut buf = Vec::new();
        emit_csv::<MetricsRow>(&[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("task,fee,"));
    }

    #[test]
    fn csv_has_header_plus_rows() {
        let result = run(&small()).unwrap();
        let mut buf = Vec::new();
        emit_csv(&result.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 31);
        let cols = MetricsRow::header().len();
        for line in text.lines() {
            assert_eq!(line.split(',').count(), cols);
        }
    }

    #[test]
    fn sweep_produces_two_modes_per_value() {
        let rows = sweep(&small(), SweepAxis::Lambda, &[0.2, 0.4], 2).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().any(|r| r.mode == SelectionMode::Reputation && r.value == 0.2));
        assert!(rows.iter().any(|r| r.mode == SelectionMode::Baseline && r.value == 0.4));
    }

    #[test]
    fn sweep_rejects_illegal_values() {
        assert!(sweep(&small(), SweepAxis::Lambda, &[1.5], 1).is_err());
        assert!(sweep(&small(), SweepAxis::Committee, &[2.5], 1).is_err());
        assert!(sweep(&small(), SweepAxis::U, &[], 1).is_err());
    }

    #[test]
    fn axis_parses_aliases() {
        assert_eq!("m".parse::<SweepAxis>().unwrap(), SweepAxis::Committee);
        assert_eq!("K".parse::<SweepAxis>().unwrap(), SweepAxis::K);
        assert!("bogus".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn payoff_cells_align_for_pairing() {
        let cells = payoff_experiment(&RunConfig { tasks: 20, ..small() }, 2).unwrap();
        assert_eq!(cells.len(), 4);
        for cell in &cells {
            assert_eq!(cell.per_task.len(), 40);
        }
    }

    #[test]
    fn full_fee_full_reveal_pays_fee_over_n() {
        // u = 1 recommends P = K; rational deviation is 0, so every
        // malicious reveal survives with h = 1 and U2 = P/n exactly.
        let config = RunConfig { u: 1.0, noise_sigma: 0.0, tasks: 20, ..small() };
        let result = run(&config).unwrap();
        for row in &result.rows {
            if row.malicious_selected > 0 && row.reveal_count > 0 {
                let expect = row.fee / f64::from(row.reveal_count);
                assert!((row.realized_follower.unwrap() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn paired_t_detects_obvious_shift() {
        let a: Vec<f64> = (0..20).map(|i| 1.0 + 0.01 * f64::from(i)).collect();
        let b = vec![0.0; 20];
        let r = paired_one_sided_t(&a, &b).unwrap();
        assert!(r.t > 10.0);
        assert!(r.p < 1e-6);
        // zero-variance differences are undefined
        assert!(paired_one_sided_t(&b, &b).is_none());
    }

    #[test]
    fn mean_and_helpers() {
        assert_eq!(mean(&[]), None);
        assert_eq!(mean(&[2.0, 4.0]), Some(3.0));
        assert_eq!(fmt_opt(None), "");
        let v = 0.1 + 0.2;
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }
}
