//! Parse a bug export and build the five attribute codebooks.
//!
//! ```text
//! cargo run --example encode_bug_reports
//! ```

use std::path::Path;

use triage_miner::ingest::{build_codebooks_and_encode, read_csv_file, Attribute, ColumnMap};

pub fn run() -> triage_miner::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_bugs.csv");
    let rows = read_csv_file(&path, &ColumnMap::default())?;
    let (codebooks, records) = build_codebooks_and_encode(&rows)?;

    println!("{} bug reports", records.len());
    for attribute in Attribute::ALL {
        let book = codebooks.get(attribute);
        let preview: Vec<String> = book
            .entries()
            .take(4)
            .map(|(code, label)| format!("{code}={label}"))
            .collect();
        println!(
            "{attribute:>16}: {} codes ({} ...)",
            book.len(),
            preview.join(", ")
        );
    }

    let first = &records[0];
    println!("\nfirst record encoded: {first:?}");
    println!(
        "decoded back:         {:?}",
        codebooks.decode_record(first)?
    );
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
