//! Cross-checks of the fast paths against the brute-force oracles, on
//! random inputs and on a real run's clusters.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::Attribute;
use crate::mine::{apriori, to_transactions, Item, Itemset, Transaction, MAX_ITEMSET_SIZE};
use crate::oracle;
use crate::pipeline::Analysis;
use crate::rules::{eliminate_redundant, generate_class_rules, Rule};
use crate::synth::uniform_records;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_transactions: usize,
    pub max_codes: u32,
    pub max_rules: usize,
    pub support_levels: Vec<u32>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 100,
            seed: 0,
            max_transactions: 200,
            max_codes: 12,
            max_rules: 50,
            support_levels: vec![1, 2, 3, 5],
        }
    }
}

/// Outcome of one family of checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub skipped: usize,
    pub mismatches: Vec<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, {} skipped, {} mismatches",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.skipped,
            self.mismatches.len()
        )
    }
}

/// Compares apriori with brute-force enumeration; `None` when they agree.
pub fn compare_apriori(transactions: &[Transaction], min_support_count: u32) -> Option<String> {
    let fast = apriori(transactions, min_support_count, MAX_ITEMSET_SIZE);
    let slow = oracle::frequent_itemsets(transactions, min_support_count, MAX_ITEMSET_SIZE);
    if fast.counts() == &slow {
        return None;
    }
    let missing = slow.keys().filter(|k| fast.get(k).is_none()).count();
    let extra = fast.iter().filter(|(k, _)| !slow.contains_key(*k)).count();
    Some(format!(
        "{} transactions, min support {min_support_count}: {missing} missing, {extra} extra, {} vs {} itemsets",
        transactions.len(),
        fast.len(),
        slow.len()
    ))
}

/// Compares eliminate_redundant with the all-pairs oracle and re-verifies
/// every witness; `None` when everything agrees.
pub fn compare_redundancy(rules: &[Rule]) -> Option<String> {
    let partition = match eliminate_redundant(rules) {
        Ok(p) => p,
        Err(e) => return Some(e.to_string()),
    };
    let flags = oracle::essential_flags(rules);
    let expected: HashSet<_> = rules
        .iter()
        .zip(&flags)
        .filter(|(_, &e)| e)
        .map(|(r, _)| r.key())
        .collect();
    let actual: HashSet<_> = partition.essential.iter().map(Rule::key).collect();
    let mut problems = Vec::new();
    if expected != actual {
        problems.push(format!(
            "essential sets differ ({} expected, {} found)",
            expected.len(),
            actual.len()
        ));
    }
    if partition.total() != rules.len() {
        problems.push(format!(
            "partition covers {} of {} rules",
            partition.total(),
            rules.len()
        ));
    }
    for entry in &partition.redundant {
        if !oracle::witness_is_valid(&entry.witness, &entry.rule)
            || !actual.contains(&entry.witness.key())
        {
            problems.push(format!("bad witness {} for {}", entry.witness, entry.rule));
        }
    }
    (!problems.is_empty()).then(|| problems.join("; "))
}

fn compare_rules(
    transactions: &[Transaction],
    min_support: u32,
    min_confidence: f64,
    allowed: &BTreeSet<u32>,
) -> Option<String> {
    let table = apriori(transactions, min_support, MAX_ITEMSET_SIZE);
    let fast: BTreeSet<oracle::RuleCounts> =
        match generate_class_rules(&table, min_confidence, allowed) {
            Ok(rules) => rules
                .into_iter()
                .map(|r| {
                    (
                        r.antecedent,
                        r.consequent,
                        r.support_count,
                        r.antecedent_support,
                    )
                })
                .collect(),
            Err(e) => return Some(e.to_string()),
        };
    let slow = oracle::class_rules(transactions, min_support, min_confidence, allowed);
    (fast != slow).then(|| format!("{} rules vs {} from brute force", fast.len(), slow.len()))
}

/// A random rule set over a small item universe, so that subsumption and
/// exact confidence ties are common.
pub fn random_rule_set<R: Rng>(rng: &mut R, max_rules: usize) -> Vec<Rule> {
    const ANTECEDENT_ATTRIBUTES: [Attribute; 4] = [
        Attribute::Severity,
        Attribute::Priority,
        Attribute::Component,
        Attribute::OperatingSystem,
    ];
    const DENOMINATORS: [u32; 6] = [2, 3, 4, 6, 8, 12];
    let target = rng.gen_range(1..=max_rules.max(1));
    let mut seen = HashSet::new();
    let mut rules = Vec::new();
    for _ in 0..target * 4 {
        if rules.len() == target {
            break;
        }
        let mut items = Vec::new();
        for &a in &ANTECEDENT_ATTRIBUTES {
            if rng.gen_bool(0.5) {
                items.push(Item::new(a, rng.gen_range(1..=2)));
            }
        }
        let antecedent = Itemset::new(items);
        if antecedent.is_empty() {
            continue;
        }
        let consequent = Item::new(Attribute::Assignee, rng.gen_range(1..=2));
        if !seen.insert((antecedent.clone(), consequent)) {
            continue;
        }
        let denominator = *DENOMINATORS.choose(rng).expect("non-empty");
        let support = rng.gen_range(1..=denominator);
        rules.push(Rule::new(antecedent, consequent, support, denominator));
    }
    rules
}

/// Apriori vs brute force on `options.trials` random datasets.
pub fn verify_apriori_random(options: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut result = CheckResult::new("apriori vs brute-force enumeration (random)");
    for trial in 0..options.trials {
        let n = rng.gen_range(1..=options.max_transactions.max(1));
        let cards = [(); 5].map(|_| rng.gen_range(1..=options.max_codes.max(1)));
        let records = uniform_records(&mut rng, n, cards);
        let min_support = options.support_levels[trial % options.support_levels.len().max(1)];
        result.cases += 1;
        if let Some(m) = compare_apriori(&to_transactions(&records), min_support) {
            result.mismatches.push(format!("trial {trial}: {m}"));
        }
    }
    result
}

/// Class rule generation vs brute force on random datasets.
pub fn verify_rules_random(options: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x5eed);
    let mut result = CheckResult::new("class rules vs brute-force enumeration (random)");
    for trial in 0..options.trials {
        let n = rng.gen_range(1..=options.max_transactions.max(1));
        let cards = [(); 5].map(|_| rng.gen_range(1..=options.max_codes.clamp(1, 6)));
        let records = uniform_records(&mut rng, n, cards);
        let allowed: BTreeSet<u32> = (1..=cards[4]).filter(|_| rng.gen_bool(0.7)).collect();
        let min_support = options.support_levels[trial % options.support_levels.len().max(1)];
        let min_confidence = [0.1, 0.25, 0.5, 1.0][trial % 4];
        result.cases += 1;
        if let Some(m) = compare_rules(
            &to_transactions(&records),
            min_support,
            min_confidence,
            &allowed,
        ) {
            result.mismatches.push(format!("trial {trial}: {m}"));
        }
    }
    result
}

/// Redundancy elimination vs the all-pairs oracle on random rule sets.
pub fn verify_redundancy_random(options: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0xbeef);
    let mut result = CheckResult::new("redundancy vs all-pairs subsumption (random)");
    for trial in 0..options.trials {
        let rules = random_rule_set(&mut rng, options.max_rules);
        result.cases += 1;
        if let Some(m) = compare_redundancy(&rules) {
            result.mismatches.push(format!("trial {trial}: {m}"));
        }
    }
    result
}

/// Re-runs the oracles on each cluster of a completed analysis, skipping
/// clusters above the size caps.
pub fn verify_analysis(analysis: &Analysis, options: &VerifyOptions) -> Vec<CheckResult> {
    let mut itemsets = CheckResult::new("apriori vs brute-force enumeration (dataset clusters)");
    let mut rules = CheckResult::new("class rules vs brute-force enumeration (dataset clusters)");
    let mut redundancy = CheckResult::new("redundancy vs all-pairs subsumption (dataset clusters)");
    let min_support = analysis.config.min_support_count;
    for (i, cluster) in analysis.clusters.iter().enumerate() {
        if cluster.records.len() > options.max_transactions {
            itemsets.skipped += 1;
            rules.skipped += 1;
        } else {
            let transactions = to_transactions(&cluster.records);
            itemsets.cases += 1;
            if let Some(m) = compare_apriori(&transactions, min_support) {
                itemsets.mismatches.push(format!("cluster {i}: {m}"));
            }
            rules.cases += 1;
            let allowed: BTreeSet<u32> = cluster.top_assignees.iter().copied().collect();
            if let Some(m) = compare_rules(
                &transactions,
                min_support,
                analysis.config.min_confidence,
                &allowed,
            ) {
                rules.mismatches.push(format!("cluster {i}: {m}"));
            }
        }
        if cluster.rules.len() > options.max_rules {
            redundancy.skipped += 1;
        } else {
            redundancy.cases += 1;
            if let Some(m) = compare_redundancy(&cluster.rules) {
                redundancy.mismatches.push(format!("cluster {i}: {m}"));
            }
        }
    }
    vec![itemsets, rules, redundancy]
}
