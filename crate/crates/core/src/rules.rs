//! Class association rules with an assignee consequent, and their split into
//! essential and redundant rules.
//!
//! A rule `B => c` is redundant when some essential rule `A => c` has
//! `A` a strict subset of `B` and confidence at least as high: the longer
//! rule adds conditions without adding certainty. Confidences are compared
//! as exact rationals of support counts.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ingest::{Attribute, BugRecord};
use crate::mine::{FrequentItemsetTable, Item, Itemset};

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub antecedent: Itemset,
    pub consequent: Item,
    /// Support of antecedent ∪ consequent.
    pub support_count: u32,
    pub antecedent_support: u32,
    pub confidence: f64,
}

impl Rule {
    pub fn new(
        antecedent: Itemset,
        consequent: Item,
        support_count: u32,
        antecedent_support: u32,
    ) -> Self {
        Rule {
            antecedent,
            consequent,
            support_count,
            antecedent_support,
            confidence: f64::from(support_count) / f64::from(antecedent_support),
        }
    }

    /// Compares confidences exactly by cross-multiplying support counts.
    pub fn cmp_confidence(&self, other: &Rule) -> Ordering {
        let lhs = u64::from(self.support_count) * u64::from(other.antecedent_support);
        let rhs = u64::from(other.support_count) * u64::from(self.antecedent_support);
        lhs.cmp(&rhs)
    }

    pub fn key(&self) -> (&Itemset, &Item) {
        (&self.antecedent, &self.consequent)
    }

    /// True when `self` makes `other` redundant.
    pub fn subsumes(&self, other: &Rule) -> bool {
        self.consequent == other.consequent
            && self.antecedent.is_strict_subset_of(&other.antecedent)
            && self.cmp_confidence(other) != Ordering::Less
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} => {} ({}/{})",
            self.antecedent, self.consequent, self.support_count, self.antecedent_support
        )
    }
}

/// Output order: shorter antecedents first, then higher confidence, then
/// higher support, then canonical itemset order.
pub fn rule_order(a: &Rule, b: &Rule) -> Ordering {
    a.antecedent
        .len()
        .cmp(&b.antecedent.len())
        .then_with(|| b.cmp_confidence(a))
        .then_with(|| b.support_count.cmp(&a.support_count))
        .then_with(|| a.antecedent.cmp(&b.antecedent))
        .then_with(|| a.consequent.cmp(&b.consequent))
}

/// Derives every rule `A => c` with `c` an allowed assignee, `A` non-empty
/// and free of assignee items, `A ∪ {c}` frequent, and confidence at least
/// `min_confidence`.
pub fn generate_class_rules(
    table: &FrequentItemsetTable,
    min_confidence: f64,
    allowed_consequents: &BTreeSet<u32>,
) -> Result<Vec<Rule>> {
    let mut rules = Vec::new();
    for (itemset, support) in table.iter() {
        if itemset.len() < 2 {
            continue;
        }
        let Some(consequent) = itemset.item_for(Attribute::Assignee) else {
            continue;
        };
        if !allowed_consequents.contains(&consequent.code) {
            continue;
        }
        let antecedent = itemset.without(&consequent);
        if antecedent.item_for(Attribute::Assignee).is_some() {
            continue;
        }
        let antecedent_support = table.get(&antecedent).ok_or_else(|| {
            Error::TableIntegrity(format!("{itemset} is frequent but {antecedent} is missing"))
        })?;
        let rule = Rule::new(antecedent, consequent, support, antecedent_support);
        if rule.confidence >= min_confidence {
            rules.push(rule);
        }
    }
    rules.sort_by(rule_order);
    Ok(rules)
}

/// The `n` assignees with the most bugs, most first; ties go to the lower code.
pub fn top_assignees(records: &[BugRecord], n: usize) -> Vec<u32> {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for r in records {
        *counts.entry(r.assignee).or_default() += 1;
    }
    let mut ranked: Vec<(u32, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.into_iter().take(n).map(|(code, _)| code).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedundantRule {
    pub rule: Rule,
    pub witness: Rule,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RulePartition {
    pub essential: Vec<Rule>,
    pub redundant: Vec<RedundantRule>,
}

impl RulePartition {
    pub fn total(&self) -> usize {
        self.essential.len() + self.redundant.len()
    }

    /// Re-checks every recorded witness; returns one message per failure.
    pub fn check_witnesses(&self) -> Vec<String> {
        let essential: HashSet<_> = self.essential.iter().map(Rule::key).collect();
        let mut problems = Vec::new();
        for RedundantRule { rule, witness } in &self.redundant {
            if !essential.contains(&witness.key()) {
                problems.push(format!("witness {witness} of {rule} is not essential"));
            }
            if !witness.subsumes(rule) {
                problems.push(format!("witness {witness} does not subsume {rule}"));
            }
        }
        problems
    }
}

/// Splits `rules` into essential and redundant ones.
///
/// Rules are visited in ascending antecedent size so that every candidate
/// witness has already been classified. Among qualifying essential rules
/// the recorded witness is the one with the smallest antecedent, then the
/// highest confidence, then the first in canonical order.
pub fn eliminate_redundant(rules: &[Rule]) -> Result<RulePartition> {
    let mut seen = HashSet::new();
    for rule in rules {
        if !seen.insert(rule.key()) {
            return Err(Error::DuplicateRule(rule.to_string()));
        }
    }

    let mut order: Vec<&Rule> = rules.iter().collect();
    order.sort_by(|a, b| rule_order(a, b));

    let mut essential_by_consequent: HashMap<Item, Vec<&Rule>> = HashMap::new();
    let mut partition = RulePartition::default();
    for rule in order {
        let witness = essential_by_consequent
            .get(&rule.consequent)
            .into_iter()
            .flatten()
            .filter(|w| w.subsumes(rule))
            .min_by(|a, b| {
                a.antecedent
                    .len()
                    .cmp(&b.antecedent.len())
                    .then_with(|| b.cmp_confidence(a))
                    .then_with(|| a.antecedent.cmp(&b.antecedent))
            })
            .copied();
        match witness {
            Some(w) => partition.redundant.push(RedundantRule {
                rule: rule.clone(),
                witness: w.clone(),
            }),
            None => {
                essential_by_consequent
                    .entry(rule.consequent)
                    .or_default()
                    .push(rule);
                partition.essential.push(rule.clone());
            }
        }
    }
    Ok(partition)
}
