//! Rule rendering and per-cluster reports.
//!
//! Rules print as
//! `Severity {Normal} ∧ Priority {P3} ∧ Os {Linux} ∧ Component{Build Config} ⇒ Assignee {Jon Granrose} @ (9,52.94%)`
//! with attributes always in severity, priority, os, component order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::ingest::{Attribute, BugRecord, Codebooks};
use crate::rules::{rule_order, Rule, RulePartition};

/// Antecedent lengths reported in histograms.
pub const MAX_ANTECEDENT: usize = 4;

const PRINT_ORDER: [Attribute; 4] = [
    Attribute::Severity,
    Attribute::Priority,
    Attribute::OperatingSystem,
    Attribute::Component,
];

/// `support / antecedent_support` as a percentage, rounded half-up to two
/// decimals; whole percentages print without a fraction.
pub fn format_confidence(support_count: u32, antecedent_support: u32) -> String {
    let num = u64::from(support_count) * 20_000 + u64::from(antecedent_support);
    let hundredths = num / (2 * u64::from(antecedent_support));
    if hundredths % 100 == 0 {
        format!("{}%", hundredths / 100)
    } else {
        format!("{}.{:02}%", hundredths / 100, hundredths % 100)
    }
}

fn write_item(out: &mut String, attribute: Attribute, label: &str) {
    let _ = match attribute {
        Attribute::Severity => write!(out, "Severity {{{label}}}"),
        Attribute::Priority => write!(out, "Priority {{{label}}}"),
        Attribute::OperatingSystem => write!(out, "Os {{{label}}}"),
        Attribute::Component => write!(out, "Component{{{label}}}"),
        Attribute::Assignee => write!(out, "Assignee {{{label}}}"),
    };
}

pub fn render_rule(rule: &Rule, codebooks: &Codebooks) -> Result<String> {
    let mut out = String::new();
    for attribute in PRINT_ORDER {
        if let Some(item) = rule.antecedent.item_for(attribute) {
            if !out.is_empty() {
                out.push_str(" ∧ ");
            }
            write_item(&mut out, attribute, codebooks.decode(attribute, item.code)?);
        }
    }
    out.push_str(" ⇒ ");
    let consequent = rule.consequent;
    write_item(
        &mut out,
        consequent.attribute,
        codebooks.decode(consequent.attribute, consequent.code)?,
    );
    let _ = write!(
        out,
        " @ ({},{})",
        rule.support_count,
        format_confidence(rule.support_count, rule.antecedent_support)
    );
    Ok(out)
}

/// Rule count per antecedent length, with every length 1..=4 present.
pub fn length_histogram<'a>(rules: impl IntoIterator<Item = &'a Rule>) -> BTreeMap<usize, usize> {
    let mut histogram: BTreeMap<usize, usize> = (1..=MAX_ANTECEDENT).map(|n| (n, 0)).collect();
    for rule in rules {
        *histogram.entry(rule.antecedent.len()).or_default() += 1;
    }
    histogram
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleStatus {
    Essential,
    Redundant,
}

impl RuleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleStatus::Essential => "essential",
            RuleStatus::Redundant => "redundant",
        }
    }
}

/// A rule decoded for output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderedRule {
    pub text: String,
    pub status: RuleStatus,
    pub witness: Option<String>,
    pub severity: Option<String>,
    pub priority: Option<String>,
    pub operating_system: Option<String>,
    pub component: Option<String>,
    pub assignee: String,
    pub antecedent_length: usize,
    pub support_count: u32,
    pub confidence: f64,
}

fn rendered(
    rule: &Rule,
    status: RuleStatus,
    witness: Option<&Rule>,
    codebooks: &Codebooks,
) -> Result<RenderedRule> {
    let label = |attribute: Attribute| -> Result<Option<String>> {
        rule.antecedent
            .item_for(attribute)
            .map(|item| codebooks.decode(attribute, item.code).map(str::to_string))
            .transpose()
    };
    Ok(RenderedRule {
        text: render_rule(rule, codebooks)?,
        status,
        witness: witness.map(|w| render_rule(w, codebooks)).transpose()?,
        severity: label(Attribute::Severity)?,
        priority: label(Attribute::Priority)?,
        operating_system: label(Attribute::OperatingSystem)?,
        component: label(Attribute::Component)?,
        assignee: codebooks
            .decode(Attribute::Assignee, rule.consequent.code)?
            .to_string(),
        antecedent_length: rule.antecedent.len(),
        support_count: rule.support_count,
        confidence: rule.confidence,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub cluster_index: usize,
    pub size: usize,
    pub top_assignees: Vec<String>,
    pub essential_count: usize,
    pub redundant_count: usize,
    pub length_histogram: BTreeMap<usize, usize>,
    #[serde(skip)]
    pub rules: Vec<RenderedRule>,
}

impl ClusterReport {
    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Checks the report's own accounting; returns one message per failure.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let total = self.rule_count();
        if self.essential_count + self.redundant_count != total {
            problems.push(format!(
                "cluster {}: essential {} + redundant {} != {total} rules",
                self.cluster_index, self.essential_count, self.redundant_count
            ));
        }
        let histogram_total: usize = self.length_histogram.values().sum();
        if histogram_total != total {
            problems.push(format!(
                "cluster {}: length histogram sums to {histogram_total}, expected {total}",
                self.cluster_index
            ));
        }
        problems
    }

    /// Human-readable listing, essential rules first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Cluster {}: {} bug reports",
            self.cluster_index, self.size
        );
        let _ = writeln!(out, "Top assignees: {}", self.top_assignees.join(", "));
        let _ = writeln!(
            out,
            "Rules: {} (essential {}, redundant {})",
            self.rule_count(),
            self.essential_count,
            self.redundant_count
        );
        let lengths: Vec<String> = self
            .length_histogram
            .iter()
            .map(|(len, n)| format!("{len}-antecedent {n}"))
            .collect();
        let _ = writeln!(out, "Rule lengths: {}", lengths.join(", "));

        for (status, heading) in [
            (RuleStatus::Essential, "Essential rules"),
            (RuleStatus::Redundant, "Redundant rules"),
        ] {
            let _ = writeln!(out, "\n{heading}");
            for (i, rule) in self.rules.iter().filter(|r| r.status == status).enumerate() {
                let _ = writeln!(out, "{}. {}", i + 1, rule.text);
                if let Some(w) = &rule.witness {
                    let _ = writeln!(out, "   witness: {w}");
                }
            }
        }
        out
    }
}

/// Assembles one cluster's report. `top_assignees` are codes, most frequent first.
pub fn build_cluster_report(
    cluster_index: usize,
    records: &[BugRecord],
    top_assignees: &[u32],
    partition: &RulePartition,
    codebooks: &Codebooks,
) -> Result<ClusterReport> {
    let mut essential: Vec<&Rule> = partition.essential.iter().collect();
    essential.sort_by(|a, b| rule_order(a, b));
    let mut redundant: Vec<_> = partition.redundant.iter().collect();
    redundant.sort_by(|a, b| rule_order(&a.rule, &b.rule));

    let mut rules = Vec::with_capacity(partition.total());
    for rule in essential {
        rules.push(rendered(rule, RuleStatus::Essential, None, codebooks)?);
    }
    for entry in &redundant {
        rules.push(rendered(
            &entry.rule,
            RuleStatus::Redundant,
            Some(&entry.witness),
            codebooks,
        )?);
    }

    Ok(ClusterReport {
        cluster_index,
        size: records.len(),
        top_assignees: top_assignees
            .iter()
            .map(|&c| codebooks.decode(Attribute::Assignee, c).map(str::to_string))
            .collect::<Result<_>>()?,
        essential_count: partition.essential.len(),
        redundant_count: partition.redundant.len(),
        length_histogram: length_histogram(
            partition
                .essential
                .iter()
                .chain(partition.redundant.iter().map(|r| &r.rule)),
        ),
        rules,
    })
}

/// `figures/cluster_sizes.csv`
pub fn cluster_sizes_csv(reports: &[ClusterReport]) -> String {
    let mut out = String::from("cluster,size\n");
    for r in reports {
        let _ = writeln!(out, "{},{}", r.cluster_index, r.size);
    }
    out
}

/// `figures/essential_redundant.csv`
pub fn essential_redundant_csv(reports: &[ClusterReport]) -> String {
    let mut out = String::from("cluster,essential,redundant\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.cluster_index, r.essential_count, r.redundant_count
        );
    }
    out
}

/// `figures/rule_lengths.csv`, one column per antecedent length.
pub fn rule_lengths_csv(reports: &[ClusterReport]) -> String {
    let mut out = String::from("cluster");
    for n in 1..=MAX_ANTECEDENT {
        let _ = write!(out, ",length_{n}");
    }
    out.push('\n');
    for r in reports {
        let _ = write!(out, "{}", r.cluster_index);
        for n in 1..=MAX_ANTECEDENT {
            let _ = write!(out, ",{}", r.length_histogram.get(&n).copied().unwrap_or(0));
        }
        out.push('\n');
    }
    out
}

/// `rules.csv`: one row per rule across all clusters.
pub fn rules_csv(reports: &[ClusterReport]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "cluster",
        "status",
        "severity",
        "priority",
        "os",
        "component",
        "assignee",
        "antecedent_length",
        "support_count",
        "confidence",
        "rule",
        "witness",
    ])?;
    for report in reports {
        for rule in &report.rules {
            let opt = |v: &Option<String>| v.clone().unwrap_or_default();
            writer.write_record([
                report.cluster_index.to_string(),
                rule.status.as_str().to_string(),
                opt(&rule.severity),
                opt(&rule.priority),
                opt(&rule.operating_system),
                opt(&rule.component),
                rule.assignee.clone(),
                rule.antecedent_length.to_string(),
                rule.support_count.to_string(),
                rule.confidence.to_string(),
                rule.text.clone(),
                opt(&rule.witness),
            ])?;
        }
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
