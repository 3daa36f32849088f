//! Deterministic synthetic bug datasets.
//!
//! Components and operating systems follow Zipf-like frequencies. Each
//! component has a small roster of owners; with probability `affinity` a
//! bug goes to one of its component's owners, otherwise to an assignee
//! drawn from a skewed global distribution.

use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ingest::{BugRecord, ColumnMap, RawBugRow};

const SEVERITIES: [&str; 7] = [
    "blocker",
    "critical",
    "major",
    "normal",
    "minor",
    "trivial",
    "enhancement",
];
const SEVERITY_WEIGHTS: [f64; 7] = [2.0, 6.0, 14.0, 55.0, 10.0, 5.0, 8.0];
const PRIORITY_WEIGHTS: [f64; 5] = [10.0, 18.0, 55.0, 10.0, 7.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub records: usize,
    pub seed: u64,
    pub components: usize,
    pub operating_systems: usize,
    pub assignees: usize,
    /// Zipf exponent of the global assignee distribution.
    pub assignee_skew: f64,
    /// Probability that a bug goes to one of its component's owners.
    pub affinity: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            records: 1000,
            seed: 0,
            components: 20,
            operating_systems: 6,
            assignees: 40,
            assignee_skew: 1.1,
            affinity: 0.7,
        }
    }
}

fn zipf(n: usize, exponent: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|rank| 1.0 / (rank as f64).powf(exponent))).expect("n >= 1")
}

/// Generates `config.records` rows with labels such as `Component 03`.
pub fn synthesize_rows(config: &SynthConfig) -> Vec<RawBugRow> {
    let components = config.components.max(1);
    let oses = config.operating_systems.max(1);
    let assignees = config.assignees.max(1);
    let width = |n: usize| n.to_string().len();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let severity = WeightedIndex::new(SEVERITY_WEIGHTS).expect("static weights");
    let priority = WeightedIndex::new(PRIORITY_WEIGHTS).expect("static weights");
    let component = zipf(components, 1.0);
    let os = zipf(oses, 1.2);
    let global = zipf(assignees, config.assignee_skew);
    let rosters: Vec<Vec<usize>> = (0..components)
        .map(|_| {
            (0..rng.gen_range(1..=3))
                .map(|_| rng.gen_range(0..assignees))
                .collect()
        })
        .collect();

    (0..config.records)
        .map(|i| {
            let c = component.sample(&mut rng);
            let who = if rng.gen_bool(config.affinity.clamp(0.0, 1.0)) {
                rosters[c][rng.gen_range(0..rosters[c].len())]
            } else {
                global.sample(&mut rng)
            };
            RawBugRow {
                bug_id: (100_000 + i).to_string(),
                severity: SEVERITIES[severity.sample(&mut rng)].to_string(),
                priority: format!("P{}", priority.sample(&mut rng) + 1),
                component: format!("Component {:0w$}", c + 1, w = width(components)),
                operating_system: format!("OS {:0w$}", os.sample(&mut rng) + 1, w = width(oses)),
                assignee: format!("dev{:0w$}", who + 1, w = width(assignees)),
            }
        })
        .collect()
}

/// Writes rows as CSV using the headers of `column_map`.
pub fn write_csv<W: Write>(rows: &[RawBugRow], column_map: &ColumnMap, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        &column_map.bug_id,
        &column_map.severity,
        &column_map.priority,
        &column_map.component,
        &column_map.operating_system,
        &column_map.assignee,
    ])?;
    for r in rows {
        writer.write_record([
            &r.bug_id,
            &r.severity,
            &r.priority,
            &r.component,
            &r.operating_system,
            &r.assignee,
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Already-encoded records with uniform codes; `cardinalities` gives the
/// number of codes per attribute in canonical attribute order.
pub fn uniform_records<R: Rng>(
    rng: &mut R,
    count: usize,
    cardinalities: [u32; 5],
) -> Vec<BugRecord> {
    (0..count)
        .map(|i| {
            let mut code = |a: usize| rng.gen_range(1..=cardinalities[a].max(1));
            BugRecord {
                bug_id: format!("t{i}"),
                severity: code(0),
                priority: code(1),
                component: code(2),
                operating_system: code(3),
                assignee: code(4),
            }
        })
        .collect()
}
