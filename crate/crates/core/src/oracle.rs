//! Brute-force reference implementations used to cross-check the fast
//! paths. They share data types with the rest of the crate but none of its
//! algorithms.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::ingest::Attribute;
use crate::mine::{Item, Itemset, Transaction};
use crate::rules::Rule;

/// Counts every non-empty sub-itemset of every transaction and keeps those
/// with size at most `max_size` and support at least `min_support_count`.
pub fn frequent_itemsets(
    transactions: &[Transaction],
    min_support_count: u32,
    max_size: usize,
) -> BTreeMap<Itemset, u32> {
    let mut counts: HashMap<Vec<Item>, u32> = HashMap::new();
    for t in transactions {
        let items = t.itemset.items();
        for mask in 1u32..(1 << items.len()) {
            if mask.count_ones() as usize > max_size {
                continue;
            }
            let subset: Vec<Item> = (0..items.len())
                .filter(|bit| mask & (1 << bit) != 0)
                .map(|bit| items[bit])
                .collect();
            *counts.entry(subset).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c >= min_support_count.max(1))
        .map(|(items, c)| (Itemset::new(items), c))
        .collect()
}

fn contains_all(haystack: &Itemset, needles: &Itemset) -> bool {
    needles
        .items()
        .iter()
        .all(|n| haystack.items().iter().any(|h| h == n))
}

fn scan_support(itemset: &Itemset, transactions: &[Transaction]) -> u32 {
    transactions
        .iter()
        .filter(|t| contains_all(&t.itemset, itemset))
        .count() as u32
}

/// A rule as `(antecedent, consequent, support, antecedent support)`.
pub type RuleCounts = (Itemset, Item, u32, u32);

/// Class rules enumerated from brute-force itemsets, with antecedent
/// supports counted by a direct scan.
pub fn class_rules(
    transactions: &[Transaction],
    min_support_count: u32,
    min_confidence: f64,
    allowed_consequents: &BTreeSet<u32>,
) -> BTreeSet<RuleCounts> {
    let mut out = BTreeSet::new();
    for (itemset, support) in frequent_itemsets(transactions, min_support_count, usize::MAX) {
        let assignees: Vec<Item> = itemset
            .items()
            .iter()
            .copied()
            .filter(|i| i.attribute == Attribute::Assignee)
            .collect();
        if assignees.len() != 1
            || itemset.len() < 2
            || !allowed_consequents.contains(&assignees[0].code)
        {
            continue;
        }
        let consequent = assignees[0];
        let antecedent = Itemset::new(itemset.items().iter().copied().filter(|i| *i != consequent));
        let antecedent_support = scan_support(&antecedent, transactions);
        if f64::from(support) / f64::from(antecedent_support) >= min_confidence {
            out.insert((antecedent, consequent, support, antecedent_support));
        }
    }
    out
}

/// Whether `witness` makes `rule` redundant, checked from first principles.
pub fn witness_is_valid(witness: &Rule, rule: &Rule) -> bool {
    let strict_subset = witness.antecedent.len() < rule.antecedent.len()
        && contains_all(&rule.antecedent, &witness.antecedent);
    let confidence_no_lower = u128::from(witness.support_count)
        * u128::from(rule.antecedent_support)
        >= u128::from(rule.support_count) * u128::from(witness.antecedent_support);
    witness.consequent == rule.consequent && strict_subset && confidence_no_lower
}

/// All-pairs check: a rule is essential iff no other rule in the set
/// subsumes it. Returns one flag per input rule.
pub fn essential_flags(rules: &[Rule]) -> Vec<bool> {
    rules
        .iter()
        .map(|r| !rules.iter().any(|w| witness_is_valid(w, r)))
        .collect()
}
