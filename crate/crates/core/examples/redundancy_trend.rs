//! Synthesize datasets of growing size and report how the share of
//! redundant rules changes.
//!
//! ```text
//! cargo run --release --example redundancy_trend
//! ```

use triage_miner::config::PipelineConfig;
use triage_miner::ingest::build_codebooks_and_encode;
use triage_miner::pipeline::analyze_records;
use triage_miner::synth::{synthesize_rows, SynthConfig};

pub const SIZES: [usize; 3] = [500, 2_000, 8_000];

/// `(size, essential, redundant)` for each dataset size.
pub fn trend(seed: u64) -> triage_miner::Result<Vec<(usize, usize, usize)>> {
    let mut rows = Vec::new();
    for size in SIZES {
        let raw = synthesize_rows(&SynthConfig {
            records: size,
            seed,
            ..SynthConfig::default()
        });
        let (codebooks, records) = build_codebooks_and_encode(&raw)?;
        let config = PipelineConfig::with_defaults("synthetic.csv");
        let summary = analyze_records(&config, codebooks, records)?.summary();
        rows.push((size, summary.total_essential, summary.total_redundant));
    }
    Ok(rows)
}

pub fn run() -> triage_miner::Result<()> {
    println!("records  essential  redundant  redundant share");
    let rows = trend(7)?;
    for &(size, essential, redundant) in &rows {
        let share = redundant as f64 / (essential + redundant).max(1) as f64;
        println!(
            "{size:>7} {essential:>10} {redundant:>10} {:>15.1}%",
            100.0 * share
        );
    }
    let grows = rows.windows(2).all(|w| w[1].2 >= w[0].2);
    println!("redundant count grows with data size on this run: {grows}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
