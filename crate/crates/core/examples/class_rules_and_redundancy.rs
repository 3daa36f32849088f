//! Mine assignee rules for the busiest assignees of one dataset and split
//! them into essential and redundant rules.
//!
//! ```text
//! cargo run --example class_rules_and_redundancy
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use triage_miner::ingest::{build_codebooks_and_encode, read_csv_file, ColumnMap};
use triage_miner::mine::{apriori, to_transactions, MAX_ITEMSET_SIZE};
use triage_miner::report::render_rule;
use triage_miner::rules::{eliminate_redundant, generate_class_rules, top_assignees};

pub fn run() -> triage_miner::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_bugs.csv");
    let (codebooks, records) =
        build_codebooks_and_encode(&read_csv_file(&path, &ColumnMap::default())?)?;

    let top = top_assignees(&records, 5);
    let allowed: BTreeSet<u32> = top.iter().copied().collect();
    let table = apriori(&to_transactions(&records), 3, MAX_ITEMSET_SIZE);
    let rules = generate_class_rules(&table, 0.10, &allowed)?;
    let partition = eliminate_redundant(&rules)?;

    println!(
        "{} rules over the whole dataset: {} essential, {} redundant",
        rules.len(),
        partition.essential.len(),
        partition.redundant.len()
    );
    println!("\nstrongest essential rules:");
    let mut essential = partition.essential.clone();
    essential.sort_by(|a, b| {
        b.cmp_confidence(a)
            .then(b.support_count.cmp(&a.support_count))
    });
    for rule in essential.iter().take(5) {
        println!("  {}", render_rule(rule, &codebooks)?);
    }
    println!("\nsome redundant rules and what makes them redundant:");
    for entry in partition.redundant.iter().take(5) {
        println!("  {}", render_rule(&entry.rule, &codebooks)?);
        println!(
            "    covered by {}",
            render_rule(&entry.witness, &codebooks)?
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
