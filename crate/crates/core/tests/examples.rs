//! Runs the library examples as smoke tests.

#[path = "../examples/cluster_bug_reports.rs"]
#[allow(dead_code)]
mod cluster;
#[path = "../examples/encode_bug_reports.rs"]
#[allow(dead_code)]
mod encode;
#[path = "../examples/mine_frequent_itemsets.rs"]
#[allow(dead_code)]
mod mine;
#[path = "../examples/render_rule_tables.rs"]
#[allow(dead_code)]
mod render;
#[path = "../examples/class_rules_and_redundancy.rs"]
#[allow(dead_code)]
mod rules;
#[path = "../examples/redundancy_trend.rs"]
#[allow(dead_code)]
mod trend;
#[path = "../examples/verify_against_oracles.rs"]
#[allow(dead_code)]
mod verify;

#[test]
fn data_examples_run() {
    encode::run().unwrap();
    cluster::run().unwrap();
    mine::run().unwrap();
    rules::run().unwrap();
    render::run().unwrap();
}

#[test]
fn full_pipeline_example_runs() {
    let out = tempfile::tempdir().unwrap();
    pipeline::run(out.path().to_path_buf()).unwrap();
    assert!(out.path().join("report/summary.json").is_file());
}

#[test]
fn trend_example_covers_all_sizes() {
    let rows = trend::trend(7).unwrap();
    assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), trend::SIZES);
}

#[test]
fn verify_example_passes() {
    assert!(verify::run());
}
