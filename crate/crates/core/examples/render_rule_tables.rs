//! Print rules in the `Attr {label} ∧ ... ⇒ Assignee {name} @ (support,confidence%)` form.
//!
//! ```text
//! cargo run --example render_rule_tables
//! ```

use triage_miner::ingest::{build_codebooks_and_encode, Attribute, RawBugRow};
use triage_miner::mine::{Item, Itemset};
use triage_miner::report::render_rule;
use triage_miner::rules::Rule;

pub fn run() -> triage_miner::Result<()> {
    let rows: Vec<RawBugRow> = [
        ("Build Config", "Linux", "Jon Granrose"),
        ("User Interface", "All", "Ben Goodger"),
        ("Developer Tools: Debugger", "Unspecified", "Jason Laster"),
    ]
    .iter()
    .enumerate()
    .map(|(i, (component, os, who))| RawBugRow {
        bug_id: i.to_string(),
        severity: "normal".into(),
        priority: "P3".into(),
        component: component.to_string(),
        operating_system: os.to_string(),
        assignee: who.to_string(),
    })
    .collect();
    let (books, _) = build_codebooks_and_encode(&rows)?;
    let code = |attribute: Attribute, label: &str| {
        books
            .get(attribute)
            .code(label)
            .expect("label was ingested")
    };
    let item = |attribute: Attribute, label: &str| Item::new(attribute, code(attribute, label));

    let rules = [
        Rule::new(
            Itemset::new([
                item(Attribute::Severity, "Normal"),
                item(Attribute::Priority, "P3"),
                item(Attribute::OperatingSystem, "Linux"),
                item(Attribute::Component, "Build Config"),
            ]),
            item(Attribute::Assignee, "Jon Granrose"),
            9,
            17,
        ),
        Rule::new(
            Itemset::new([
                item(Attribute::OperatingSystem, "All"),
                item(Attribute::Component, "User Interface"),
            ]),
            item(Attribute::Assignee, "Ben Goodger"),
            3,
            4,
        ),
        Rule::new(
            Itemset::new([
                item(Attribute::Severity, "Normal"),
                item(Attribute::Priority, "P3"),
                item(Attribute::OperatingSystem, "Unspecified"),
                item(Attribute::Component, "Developer Tools: Debugger"),
            ]),
            item(Attribute::Assignee, "Jason Laster"),
            7,
            7,
        ),
    ];
    for (i, rule) in rules.iter().enumerate() {
        println!("{}. {}", i + 1, render_rule(rule, &books)?);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
