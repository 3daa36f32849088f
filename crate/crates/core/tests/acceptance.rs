//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! ```text
//! cargo test -p triage-miner --test acceptance
//! ```

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{run_bin, snapshot, SAMPLE};
use triage_miner::cluster::{kmeans_fit, FeatureVector};
use triage_miner::config::PipelineConfig;
use triage_miner::ingest::{build_codebooks_and_encode, Attribute, RawBugRow};
use triage_miner::mine::{apriori, to_transactions, Item, Itemset, Transaction, MAX_ITEMSET_SIZE};
use triage_miner::oracle;
use triage_miner::pipeline::{analyze, analyze_records, Analysis};
use triage_miner::report::render_rule;
use triage_miner::rules::{eliminate_redundant, generate_class_rules, Rule};
use triage_miner::synth::{synthesize_rows, uniform_records, SynthConfig};
use triage_miner::verify::random_rule_set;
use triage_miner::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn sample_config() -> PipelineConfig {
    PipelineConfig::with_defaults(Path::new(env!("CARGO_MANIFEST_DIR")).join(SAMPLE))
}

fn synthetic_analysis(records: usize, seed: u64, k: usize) -> Result<Analysis, String> {
    let rows = synthesize_rows(&SynthConfig {
        records,
        seed,
        ..SynthConfig::default()
    });
    let (books, encoded) = build_codebooks_and_encode(&rows).map_err(|e| e.to_string())?;
    let mut config = PipelineConfig::with_defaults("synthetic.csv");
    config.k = k;
    config.parallelism = k;
    analyze_records(&config, books, encoded).map_err(|e| e.to_string())
}

fn apriori_equivalence() -> Outcome {
    const TRIALS: usize = 120;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut itemsets = 0;
    for trial in 0..TRIALS {
        let n = rng.gen_range(1..=200);
        let cards = [(); 5].map(|_| rng.gen_range(1..=12));
        let min_support = [1, 2, 3, 5][trial % 4];
        let transactions = to_transactions(&uniform_records(&mut rng, n, cards));
        let fast = apriori(&transactions, min_support, MAX_ITEMSET_SIZE);
        let slow = oracle::frequent_itemsets(&transactions, min_support, MAX_ITEMSET_SIZE);
        ensure(fast.counts() == &slow, || {
            format!(
                "trial {trial}: {} itemsets vs {} from enumeration",
                fast.len(),
                slow.len()
            )
        })?;
        itemsets += slow.len();
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{TRIALS} datasets, {itemsets} itemsets, 0 differences, {elapsed:.2?}"
    ))
}

fn recount(itemset: &Itemset, transactions: &[Transaction]) -> u32 {
    transactions
        .iter()
        .filter(|t| {
            itemset
                .items()
                .iter()
                .all(|i| t.itemset.items().contains(i))
        })
        .count() as u32
}

fn check_thresholds(rules: &[Rule], transactions: &[Transaction]) -> Result<(), String> {
    for rule in rules {
        let support = recount(&rule.antecedent.with(rule.consequent), transactions);
        let antecedent = recount(&rule.antecedent, transactions);
        ensure(
            support == rule.support_count && antecedent == rule.antecedent_support,
            || format!("{rule}: counts {support}/{antecedent} on recount"),
        )?;
        ensure(support >= 3, || format!("{rule}: support {support} < 3"))?;
        ensure(
            10 * u64::from(support) >= u64::from(antecedent) && rule.confidence >= 0.10,
            || format!("{rule}: confidence {support}/{antecedent} < 10%"),
        )?;
    }
    Ok(())
}

fn rule_thresholds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut rules_checked = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=300);
        let cards = [(); 5].map(|_| rng.gen_range(1..=6));
        let transactions = to_transactions(&uniform_records(&mut rng, n, cards));
        let table = apriori(&transactions, 3, MAX_ITEMSET_SIZE);
        let allowed: BTreeSet<u32> = (1..=cards[4]).collect();
        let rules = generate_class_rules(&table, 0.10, &allowed).map_err(|e| e.to_string())?;
        check_thresholds(&rules, &transactions)?;
        rules_checked += rules.len();
    }
    for seed in 0..12 {
        let analysis = synthetic_analysis(rng.gen_range(100..=1500), seed, 5)?;
        for cluster in &analysis.clusters {
            check_thresholds(&cluster.rules, &to_transactions(&cluster.records))?;
            rules_checked += cluster.rules.len();
        }
    }
    Ok(format!(
        "{rules_checked} rules over 112 datasets, 0 violations"
    ))
}

fn redundancy_equivalence() -> Outcome {
    const TRIALS: usize = 150;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut redundant = 0;
    for trial in 0..TRIALS {
        let rules = random_rule_set(&mut rng, 50);
        ensure(rules.len() <= 50, || {
            format!("trial {trial}: {} rules", rules.len())
        })?;
        let partition = eliminate_redundant(&rules).map_err(|e| e.to_string())?;
        let flags = oracle::essential_flags(&rules);
        let expected: BTreeSet<_> = rules
            .iter()
            .zip(&flags)
            .filter(|(_, &e)| e)
            .map(|(r, _)| r.key())
            .collect();
        let actual: BTreeSet<_> = partition.essential.iter().map(Rule::key).collect();
        ensure(expected == actual, || {
            format!(
                "trial {trial}: {} essential vs {} from all-pairs",
                actual.len(),
                expected.len()
            )
        })?;
        ensure(partition.total() == rules.len(), || {
            format!("trial {trial}: rules lost")
        })?;
        for entry in &partition.redundant {
            let w = &entry.witness;
            let r = &entry.rule;
            let exact = u128::from(w.support_count) * u128::from(r.antecedent_support)
                >= u128::from(r.support_count) * u128::from(w.antecedent_support);
            ensure(
                w.consequent == r.consequent
                    && w.antecedent.is_strict_subset_of(&r.antecedent)
                    && exact
                    && actual.contains(&w.key()),
                || format!("trial {trial}: witness {w} does not cover {r}"),
            )?;
        }
        redundant += partition.redundant.len();
    }
    Ok(format!(
        "{TRIALS} rule sets, {redundant} witnesses re-verified, 0 differences"
    ))
}

fn check_accounting(analysis: &Analysis) -> Result<(), String> {
    let sizes: usize = analysis.clusters.iter().map(|c| c.records.len()).sum();
    ensure(sizes == analysis.records.len(), || {
        format!("sizes sum to {sizes}")
    })?;
    for (i, c) in analysis.clusters.iter().enumerate() {
        let r = &c.report;
        let hist: usize = r.length_histogram.values().sum();
        ensure(
            r.size == c.records.len()
                && r.essential_count + r.redundant_count == c.rules.len()
                && hist == c.rules.len(),
            || format!("cluster {i}: counts do not add up"),
        )?;
    }
    let problems = analysis.audit();
    ensure(problems.is_empty(), || problems.join("; "))
}

fn partition_accounting() -> Outcome {
    let mut runs = 0;
    let sample = analyze(&sample_config()).map_err(|e| e.to_string())?;
    check_accounting(&sample)?;
    runs += 1;
    for seed in 0..8 {
        check_accounting(&synthetic_analysis(
            200 + 150 * seed as usize,
            seed,
            2 + seed as usize % 5,
        )?)?;
        runs += 1;
    }

    let mut tampered = sample.clone();
    tampered.clusters[0].report.essential_count += 1;
    let problems = tampered.audit();
    ensure(!problems.is_empty(), || {
        "audit missed a miscounted cluster".into()
    })?;
    ensure(Error::Invariant(problems).exit_code() == 3, || {
        "invariant failure does not map to exit 3".into()
    })?;
    let mut dropped = sample;
    dropped.clusters[1].records.pop();
    dropped.clusters[1].report.size -= 1;
    ensure(!dropped.audit().is_empty(), || {
        "audit missed a lost record".into()
    })?;
    Ok(format!(
        "{runs} runs balanced, tampered runs rejected with exit 3"
    ))
}

fn kmeans_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut fits = 0;
    for trial in 0..60 {
        let n = rng.gen_range(2..=400);
        let cards = [(); 5].map(|_| rng.gen_range(1..=10));
        let points: Vec<FeatureVector> = uniform_records(&mut rng, n, cards)
            .iter()
            .map(FeatureVector::from_record)
            .collect();
        let distinct: BTreeSet<[u64; 4]> = points.iter().map(|p| p.0.map(f64::to_bits)).collect();
        let k = rng.gen_range(1..=distinct.len().min(8));
        let seed = rng.gen();
        let model = kmeans_fit(&points, k, seed, 100).map_err(|e| format!("trial {trial}: {e}"))?;
        for pair in model.inertia_history.windows(2) {
            ensure(pair[1] <= pair[0], || {
                format!("trial {trial}: inertia rose {} -> {}", pair[0], pair[1])
            })?;
        }
        ensure(!model.cluster_sizes().contains(&0), || {
            format!("trial {trial}: empty cluster")
        })?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| e.to_string())?;
        let again = pool
            .install(|| kmeans_fit(&points, k, seed, 100))
            .map_err(|e| e.to_string())?;
        ensure(
            again.assignments == model.assignments
                && again.inertia.to_bits() == model.inertia.to_bits(),
            || format!("trial {trial}: rerun differs"),
        )?;
        fits += 1;
    }

    let clumps: Vec<FeatureVector> = [[1.0; 4]; 5]
        .into_iter()
        .chain([[9.0; 4]; 5])
        .map(FeatureVector)
        .collect();
    let model = kmeans_fit(&clumps, 2, 0, 100).map_err(|e| e.to_string())?;
    let a = &model.assignments;
    ensure(
        a[..5].iter().all(|&x| x == a[0]) && a[5..].iter().all(|&x| x == a[5]) && a[0] != a[5],
        || format!("two clumps split as {a:?}"),
    )?;
    ensure(model.inertia == 0.0, || {
        format!("two clumps inertia {}", model.inertia)
    })?;
    Ok(format!("{fits} random fits plus two-clump example"))
}

fn rendering_golden() -> Outcome {
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
    let (books, _) = build_codebooks_and_encode(&rows).map_err(|e| e.to_string())?;
    let item = |attribute: Attribute, label: &str| {
        Item::new(attribute, books.get(attribute).code(label).unwrap())
    };
    let cases = [
        (
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
            "Severity {Normal} ∧ Priority {P3} ∧ Os {Linux} ∧ Component{Build Config} ⇒ Assignee {Jon Granrose} @ (9,52.94%)",
        ),
        (
            Rule::new(
                Itemset::new([item(Attribute::OperatingSystem, "All"), item(Attribute::Component, "User Interface")]),
                item(Attribute::Assignee, "Ben Goodger"),
                3,
                4,
            ),
            "Os {All} ∧ Component{User Interface} ⇒ Assignee {Ben Goodger} @ (3,75%)",
        ),
        (
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
            "Severity {Normal} ∧ Priority {P3} ∧ Os {Unspecified} ∧ Component{Developer Tools: Debugger} ⇒ Assignee {Jason Laster} @ (7,100%)",
        ),
    ];
    for (rule, expected) in &cases {
        let rendered = render_rule(rule, &books).map_err(|e| e.to_string())?;
        ensure(rendered == *expected, || {
            format!("got {rendered:?}, want {expected:?}")
        })?;
    }
    Ok("3 pinned strings match character for character".into())
}

fn end_to_end_determinism() -> Outcome {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = out.path().to_str().ok_or("non-UTF-8 temp dir")?;
    let mut snapshots = Vec::new();
    let mut slowest = Duration::ZERO;
    for _ in 0..2 {
        let start = Instant::now();
        let output = run_bin(&["run", "--input", SAMPLE, "--output", dir]);
        slowest = slowest.max(start.elapsed());
        ensure(output.status.success(), || {
            String::from_utf8_lossy(&output.stderr).into_owned()
        })?;
        snapshots.push(snapshot(&out.path().join("report")));
    }
    ensure(snapshots[0] == snapshots[1], || {
        "report directories differ".into()
    })?;
    ensure(slowest < Duration::from_secs(10), || {
        format!("run took {slowest:?}")
    })?;
    Ok(format!(
        "{} files byte-identical, slowest run {slowest:.2?}",
        snapshots[0].len()
    ))
}

fn trend_harness() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for size in [500, 2_000, 8_000] {
        let csv = dir.path().join(format!("bugs_{size}.csv"));
        let out = dir.path().join(format!("out_{size}"));
        let synth = run_bin(&[
            "synthesize",
            "--records",
            &size.to_string(),
            "--seed",
            "7",
            "--output",
            csv.to_str().unwrap(),
        ]);
        ensure(synth.status.success(), || {
            String::from_utf8_lossy(&synth.stderr).into_owned()
        })?;
        let run = run_bin(&[
            "run",
            "--input",
            csv.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ]);
        ensure(run.status.success(), || {
            String::from_utf8_lossy(&run.stderr).into_owned()
        })?;
        let summary: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(out.join("report/summary.json")).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let essential = summary["total_essential"]
            .as_u64()
            .ok_or("missing total_essential")?;
        let redundant = summary["total_redundant"]
            .as_u64()
            .ok_or("missing total_redundant")?;
        let share = 100.0 * redundant as f64 / (essential + redundant).max(1) as f64;
        lines.push(format!(
            "{size}: {essential} essential / {redundant} redundant ({share:.1}% redundant)"
        ));
    }
    Ok(lines.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "apriori matches brute-force enumeration",
            apriori_equivalence,
        ),
        (
            "rules respect support and confidence thresholds",
            rule_thresholds,
        ),
        (
            "redundancy matches all-pairs subsumption",
            redundancy_equivalence,
        ),
        ("partition accounting and self-audit", partition_accounting),
        ("k-means invariants", kmeans_invariants),
        ("rule rendering golden strings", rendering_golden),
        ("end-to-end determinism", end_to_end_determinism),
        ("redundancy trend across dataset sizes", trend_harness),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
