//! Level-wise Apriori over one-value-per-attribute transactions.
//!
//! Support counting is vertical: every frequent itemset carries the sorted
//! list of transaction ids that contain it, and a candidate's list is the
//! intersection of its two parents' lists.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::ingest::{Attribute, BugRecord};

/// Largest meaningful itemset: one item per attribute.
pub const MAX_ITEMSET_SIZE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Item {
    pub attribute: Attribute,
    pub code: u32,
}

impl Item {
    pub fn new(attribute: Attribute, code: u32) -> Self {
        Item { attribute, code }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.attribute, self.code)
    }
}

/// A sorted, duplicate-free set of items.
///
/// Construction does not reject two items of the same attribute; such an
/// itemset is representable but never occurs in a transaction.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Itemset(Vec<Item>);

impl Itemset {
    pub fn new(items: impl IntoIterator<Item = Item>) -> Self {
        let mut items: Vec<Item> = items.into_iter().collect();
        items.sort_unstable();
        items.dedup();
        Itemset(items)
    }

    pub fn empty() -> Self {
        Itemset(Vec::new())
    }

    pub fn items(&self) -> &[Item] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: &Item) -> bool {
        self.0.binary_search(item).is_ok()
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.0.iter().all(|i| other.contains(i))
    }

    pub fn is_strict_subset_of(&self, other: &Itemset) -> bool {
        self.len() < other.len() && self.is_subset_of(other)
    }

    /// At most one item per attribute.
    pub fn is_well_formed(&self) -> bool {
        self.0.windows(2).all(|w| w[0].attribute != w[1].attribute)
    }

    pub fn item_for(&self, attribute: Attribute) -> Option<Item> {
        self.0.iter().copied().find(|i| i.attribute == attribute)
    }

    pub fn without(&self, item: &Item) -> Itemset {
        Itemset(self.0.iter().copied().filter(|i| i != item).collect())
    }

    pub fn with(&self, item: Item) -> Itemset {
        Itemset::new(self.0.iter().copied().chain([item]))
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{item}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub bug_id: String,
    pub itemset: Itemset,
}

/// Lifts each record to a five-item transaction.
pub fn to_transactions(records: &[BugRecord]) -> Vec<Transaction> {
    records
        .iter()
        .map(|r| Transaction {
            bug_id: r.bug_id.clone(),
            itemset: Itemset::new(Attribute::ALL.map(|a| Item::new(a, r.code(a)))),
        })
        .collect()
}

/// Number of transactions containing `candidate` (all of them for the empty set).
pub fn support_count(candidate: &Itemset, transactions: &[Transaction]) -> usize {
    transactions
        .iter()
        .filter(|t| candidate.is_subset_of(&t.itemset))
        .count()
}

/// Frequent itemsets with their exact support counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequentItemsetTable {
    counts: BTreeMap<Itemset, u32>,
    pub min_support_count: u32,
    pub transaction_count: usize,
}

impl FrequentItemsetTable {
    /// Builds a table from precomputed counts; no invariant is checked here.
    pub fn from_counts(
        counts: BTreeMap<Itemset, u32>,
        min_support_count: u32,
        transaction_count: usize,
    ) -> Self {
        FrequentItemsetTable {
            counts,
            min_support_count,
            transaction_count,
        }
    }

    pub fn get(&self, itemset: &Itemset) -> Option<u32> {
        self.counts.get(itemset).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Itemset, u32)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }

    pub fn counts(&self) -> &BTreeMap<Itemset, u32> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Checks the support threshold and downward closure, returning one
    /// message per violation.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (itemset, count) in self.iter() {
            if count < self.min_support_count {
                problems.push(format!(
                    "{itemset} has support {count} below {}",
                    self.min_support_count
                ));
            }
            if itemset.len() < 2 {
                continue;
            }
            for item in itemset.items() {
                let subset = itemset.without(item);
                match self.get(&subset) {
                    None => problems.push(format!("{itemset} stored but subset {subset} missing")),
                    Some(c) if c < count => {
                        problems.push(format!("{subset} has support {c} below superset {itemset}"))
                    }
                    Some(_) => {}
                }
            }
        }
        problems
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        #[derive(Serialize)]
        struct Entry<'a> {
            items: &'a Itemset,
            support_count: u32,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            min_support_count: u32,
            transaction_count: usize,
            itemsets: Vec<Entry<'a>>,
        }
        serde_json::to_string_pretty(&Doc {
            min_support_count: self.min_support_count,
            transaction_count: self.transaction_count,
            itemsets: self
                .iter()
                .map(|(items, support_count)| Entry {
                    items,
                    support_count,
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AprioriOptions {
    pub min_support_count: u32,
    pub max_size: usize,
    /// Skip joins that would put two items of one attribute in a candidate.
    pub attribute_pruning: bool,
}

impl AprioriOptions {
    pub fn new(min_support_count: u32, max_size: usize) -> Self {
        AprioriOptions {
            min_support_count,
            max_size,
            attribute_pruning: true,
        }
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Mines every itemset of size `1..=max_size` with support at least
/// `min_support_count` (a count of 0 is treated as 1).
pub fn apriori(
    transactions: &[Transaction],
    min_support_count: u32,
    max_size: usize,
) -> FrequentItemsetTable {
    apriori_with(
        transactions,
        AprioriOptions::new(min_support_count, max_size),
    )
}

pub fn apriori_with(transactions: &[Transaction], options: AprioriOptions) -> FrequentItemsetTable {
    let min_support = options.min_support_count.max(1);
    let min_len = min_support as usize;

    let mut tids: BTreeMap<Item, Vec<u32>> = BTreeMap::new();
    for (tid, t) in transactions.iter().enumerate() {
        for item in t.itemset.items() {
            tids.entry(*item).or_default().push(tid as u32);
        }
    }

    let mut counts = BTreeMap::new();
    // Each level is kept sorted so that itemsets sharing a prefix are adjacent.
    let mut level: Vec<(Vec<Item>, Vec<u32>)> = tids
        .into_iter()
        .filter(|(_, t)| t.len() >= min_len)
        .map(|(item, t)| (vec![item], t))
        .collect();

    let mut size = 1;
    while !level.is_empty() && size <= options.max_size {
        for (items, t) in &level {
            counts.insert(Itemset(items.clone()), t.len() as u32);
        }
        if size == options.max_size {
            break;
        }

        let previous: HashSet<&[Item]> = level.iter().map(|(items, _)| items.as_slice()).collect();
        let mut next = Vec::new();
        let mut start = 0;
        while start < level.len() {
            let prefix = &level[start].0[..size - 1];
            let end = start
                + level[start..]
                    .iter()
                    .take_while(|(items, _)| &items[..size - 1] == prefix)
                    .count();
            for i in start..end {
                for j in i + 1..end {
                    let (a, ta) = &level[i];
                    let (b, tb) = &level[j];
                    let (last_a, last_b) = (a[size - 1], b[size - 1]);
                    if options.attribute_pruning && last_a.attribute == last_b.attribute {
                        continue;
                    }
                    let mut candidate = a.clone();
                    candidate.push(last_b);
                    // The two parents are frequent by construction; check the rest.
                    let all_subsets_frequent = (0..size - 1).all(|drop| {
                        let subset: Vec<Item> = candidate
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != drop)
                            .map(|(_, it)| *it)
                            .collect();
                        previous.contains(subset.as_slice())
                    });
                    if !all_subsets_frequent {
                        continue;
                    }
                    let t = intersect(ta, tb);
                    if t.len() >= min_len {
                        next.push((candidate, t));
                    }
                }
            }
            start = end;
        }
        level = next;
        size += 1;
    }

    FrequentItemsetTable {
        counts,
        min_support_count: min_support,
        transaction_count: transactions.len(),
    }
}
