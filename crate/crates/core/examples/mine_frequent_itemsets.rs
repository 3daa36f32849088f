//! Apriori on a handful of transactions, checked against brute force.
//!
//! ```text
//! cargo run --example mine_frequent_itemsets
//! ```

use triage_miner::ingest::BugRecord;
use triage_miner::mine::{apriori, to_transactions, MAX_ITEMSET_SIZE};
use triage_miner::oracle;

fn record(id: usize, codes: [u32; 5]) -> BugRecord {
    BugRecord {
        bug_id: id.to_string(),
        severity: codes[0],
        priority: codes[1],
        component: codes[2],
        operating_system: codes[3],
        assignee: codes[4],
    }
}

pub fn run() -> triage_miner::Result<()> {
    let records: Vec<BugRecord> = [
        [4, 3, 1, 1, 1],
        [4, 3, 1, 2, 1],
        [4, 3, 2, 1, 2],
        [3, 3, 1, 1, 1],
        [4, 2, 1, 1, 2],
        [4, 3, 1, 1, 1],
        [5, 3, 2, 2, 3],
    ]
    .into_iter()
    .enumerate()
    .map(|(i, c)| record(i, c))
    .collect();
    let transactions = to_transactions(&records);

    let table = apriori(&transactions, 3, MAX_ITEMSET_SIZE);
    println!("{} frequent itemsets at support >= 3:", table.len());
    for (itemset, count) in table.iter() {
        println!("  {itemset}  support {count}");
    }

    let brute = oracle::frequent_itemsets(&transactions, 3, MAX_ITEMSET_SIZE);
    println!(
        "matches brute-force enumeration: {}",
        table.counts() == &brute
    );
    println!("\nJSON dump:\n{}", table.to_json()?);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
