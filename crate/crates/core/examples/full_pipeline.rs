//! Run the whole pipeline on the bundled sample with the default
//! parameters (5 clusters, support count 3, confidence 10%, top 5
//! assignees) and write the report directory.
//!
//! ```text
//! cargo run --example full_pipeline [output-dir]
//! ```

use std::path::{Path, PathBuf};

use triage_miner::config::PipelineConfig;
use triage_miner::pipeline::run_pipeline;

pub fn run(output_dir: PathBuf) -> triage_miner::Result<()> {
    let mut config = PipelineConfig::with_defaults(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_bugs.csv"),
    );
    config.output_dir = output_dir;
    let outcome = run_pipeline(&config)?;

    let summary = outcome.analysis.summary();
    println!("cluster  size  essential  redundant  1-ant  2-ant  3-ant  4-ant");
    for c in &summary.clusters {
        let h = &c.report.length_histogram;
        println!(
            "{:>7} {:>5} {:>10} {:>10} {:>6} {:>6} {:>6} {:>6}",
            c.report.cluster_index,
            c.report.size,
            c.report.essential_count,
            c.report.redundant_count,
            h[&1],
            h[&2],
            h[&3],
            h[&4]
        );
    }
    println!("report written to {}", outcome.report_dir.display());
    Ok(())
}

fn main() {
    let output = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("triage-miner-example"));
    if let Err(e) = run(output) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
