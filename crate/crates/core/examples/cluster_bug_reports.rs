//! Partition encoded bug reports with seeded K-means.
//!
//! ```text
//! cargo run --example cluster_bug_reports
//! ```

use std::path::Path;

use triage_miner::cluster::{kmeans_fit, split_by_cluster, FeatureVector, DEFAULT_MAX_ITERATIONS};
use triage_miner::ingest::{build_codebooks_and_encode, read_csv_file, ColumnMap};

pub fn run() -> triage_miner::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_bugs.csv");
    let (_, records) = build_codebooks_and_encode(&read_csv_file(&path, &ColumnMap::default())?)?;
    let points: Vec<FeatureVector> = records.iter().map(FeatureVector::from_record).collect();

    let model = kmeans_fit(&points, 5, 0, DEFAULT_MAX_ITERATIONS)?;
    println!(
        "converged after {} iterations, inertia {:.3}",
        model.iterations_run, model.inertia
    );
    let trace: Vec<String> = model
        .inertia_history
        .iter()
        .map(|v| format!("{v:.1}"))
        .collect();
    println!("inertia trace: {}", trace.join(" -> "));

    for (i, group) in split_by_cluster(&records, &model)?.iter().enumerate() {
        let c = model.centroids[i].0;
        println!(
            "cluster {i}: {:>3} reports, centroid (sev {:.2}, pri {:.2}, comp {:.2}, os {:.2})",
            group.len(),
            c[0],
            c[1],
            c[2],
            c[3]
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
