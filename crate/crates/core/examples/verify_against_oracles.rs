//! Cross-check Apriori, rule generation and redundancy elimination against
//! brute-force oracles on random inputs.
//!
//! ```text
//! cargo run --release --example verify_against_oracles
//! ```

use triage_miner::verify::{
    verify_apriori_random, verify_redundancy_random, verify_rules_random, VerifyOptions,
};

pub fn run() -> bool {
    let options = VerifyOptions {
        trials: 25,
        ..VerifyOptions::default()
    };
    let checks = [
        verify_apriori_random(&options),
        verify_rules_random(&options),
        verify_redundancy_random(&options),
    ];
    for check in &checks {
        println!("{check}");
    }
    checks.iter().all(|c| c.passed())
}

fn main() {
    if !run() {
        std::process::exit(3);
    }
}
