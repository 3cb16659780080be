//! Contract tests for the external interfaces: the JSON config format,
//! the CSV outputs, and the line-delimited JSON transcript.

use oracle_sim::harness::{
    emit_csv, emit_csv_to_path, emit_reputation_csv, run, CsvRecord, MetricsRow, RunConfig,
};
use oracle_sim::protocol::write_transcript;

#[test]
fn json_config_file_round_trip() {
    let dir = std::env::temp_dir().join("oracle-sim-interface-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{
            "seed": 11,
            "nodes": 20,
            "lambda": 0.25,
            "committee": 4,
            "quantity": 8.0,
            "u": 0.7,
            "tasks": 12,
            "selection_mode": "baseline",
            "malicious_strategy": {"kind": "fixed", "delta": 0.5}
        }"#,
    )
    .unwrap();
    let config: RunConfig = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(config.seed, 11);
    assert_eq!(config.nodes, 20);
    assert_eq!(config.committee, 4);
    assert_eq!(config.selection_mode, oracle_sim::SelectionMode::Baseline);
    // omitted fields fall back to defaults
    assert_eq!(config.true_price, 100.0);
    assert_eq!(config.noise_sigma, 0.1);
    let result = run(&config).unwrap();
    assert_eq!(result.rows.len(), 12);
}

#[test]
fn csv_files_are_byte_identical_across_runs() {
    let dir = std::env::temp_dir().join("oracle-sim-interface-test");
    std::fs::create_dir_all(&dir).unwrap();
    let config = RunConfig { seed: 9, tasks: 25, ..RunConfig::default() };
    let paths = [dir.join("a.csv"), dir.join("b.csv")];
    for path in &paths {
        let result = run(&config).unwrap();
        emit_csv_to_path(&result.rows, path).unwrap();
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn csv_column_order_is_fixed() {
    assert_eq!(
        MetricsRow::header(),
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
    );
    let result = run(&RunConfig { tasks: 5, ..RunConfig::default() }).unwrap();
    let mut buf = Vec::new();
    emit_csv(&result.rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), MetricsRow::header().join(","));
    assert_eq!(lines.count(), 5);
}

#[test]
fn reputation_snapshot_is_flat_records() {
    let result = run(&RunConfig { tasks: 5, ..RunConfig::default() }).unwrap();
    let mut buf = Vec::new();
    emit_reputation_csv(&result.final_reputation, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "node_id,reputation");
    let mut count = 0;
    for line in lines {
        let (id, c) = line.split_once(',').unwrap();
        id.parse::<u32>().unwrap();
        let c: f64 = c.parse().unwrap();
        assert!(c > 0.0 && c <= 1.0);
        count += 1;
    }
    assert_eq!(count, 50);
}

#[test]
fn transcript_is_valid_ndjson() {
    let config = RunConfig { tasks: 4, record_transcript: true, ..RunConfig::default() };
    let result = run(&config).unwrap();
    let mut buf = Vec::new();
    write_transcript(&result.transcript, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut requests = 0;
    let mut outcomes = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        match v["event"].as_str().unwrap() {
            "request" => requests += 1,
            "outcome" => outcomes += 1,
            "commit" | "reveal" | "verdict" => {}
            other => panic!("unknown event {other}"),
        }
    }
    assert_eq!(requests, 4);
    assert_eq!(outcomes, 4);
}
