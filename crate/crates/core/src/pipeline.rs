//! End-to-end run: ingest, encode, cluster, mine each cluster, prune, report.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info};
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{kmeans_fit, split_by_cluster, ClusterModel, FeatureVector};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::ingest::{build_codebooks_and_encode, read_csv_file, BugRecord, Codebooks};
use crate::mine::{apriori, to_transactions, FrequentItemsetTable, MAX_ITEMSET_SIZE};
use crate::report::{self, build_cluster_report, ClusterReport};
use crate::rules::{eliminate_redundant, generate_class_rules, top_assignees, Rule, RulePartition};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    pub min_support_count: u32,
    pub min_confidence: f64,
    pub top_n: usize,
}

impl From<&PipelineConfig> for MiningParams {
    fn from(config: &PipelineConfig) -> Self {
        MiningParams {
            min_support_count: config.min_support_count,
            min_confidence: config.min_confidence,
            top_n: config.top_n,
        }
    }
}

/// Everything computed for one cluster.
#[derive(Debug, Clone)]
pub struct ClusterAnalysis {
    pub records: Vec<BugRecord>,
    pub top_assignees: Vec<u32>,
    pub table: FrequentItemsetTable,
    pub rules: Vec<Rule>,
    pub partition: RulePartition,
    pub report: ClusterReport,
}

/// Mines one cluster's records under `params`.
pub fn analyze_cluster(
    index: usize,
    records: Vec<BugRecord>,
    params: MiningParams,
    codebooks: &Codebooks,
) -> Result<ClusterAnalysis> {
    let transactions = to_transactions(&records);
    let table = apriori(&transactions, params.min_support_count, MAX_ITEMSET_SIZE);
    let top = top_assignees(&records, params.top_n);
    let allowed: BTreeSet<u32> = top.iter().copied().collect();
    let rules = generate_class_rules(&table, params.min_confidence, &allowed)?;
    let partition = eliminate_redundant(&rules)?;
    let report = build_cluster_report(index, &records, &top, &partition, codebooks)?;
    debug!(
        "cluster {index}: {} records, {} frequent itemsets, {} rules ({} essential)",
        records.len(),
        table.len(),
        rules.len(),
        partition.essential.len()
    );
    Ok(ClusterAnalysis {
        records,
        top_assignees: top,
        table,
        rules,
        partition,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub config: PipelineConfig,
    pub codebooks: Codebooks,
    pub records: Vec<BugRecord>,
    pub model: ClusterModel,
    pub clusters: Vec<ClusterAnalysis>,
}

impl Analysis {
    pub fn reports(&self) -> Vec<ClusterReport> {
        self.clusters.iter().map(|c| c.report.clone()).collect()
    }

    pub fn summary(&self) -> Summary {
        let clusters: Vec<ClusterSummary> = self
            .clusters
            .iter()
            .map(|c| ClusterSummary {
                report: c.report.clone(),
                frequent_itemsets: c.table.len(),
                rule_count: c.report.rule_count(),
            })
            .collect();
        Summary {
            input_records: self.records.len(),
            k: self.model.k,
            seed: self.model.seed,
            iterations_run: self.model.iterations_run,
            inertia: self.model.inertia,
            min_support_count: self.config.min_support_count,
            min_confidence: self.config.min_confidence,
            top_n: self.config.top_n,
            total_rules: clusters.iter().map(|c| c.rule_count).sum(),
            total_essential: clusters.iter().map(|c| c.report.essential_count).sum(),
            total_redundant: clusters.iter().map(|c| c.report.redundant_count).sum(),
            clusters,
        }
    }

    /// Re-checks the run's own outputs; returns one message per violation.
    pub fn audit(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let sizes: usize = self.clusters.iter().map(|c| c.report.size).sum();
        if sizes != self.records.len() {
            problems.push(format!(
                "cluster sizes sum to {sizes}, input has {}",
                self.records.len()
            ));
        }
        if self.model.cluster_sizes().contains(&0) {
            problems.push("k-means returned an empty cluster".into());
        }
        for (i, c) in self.clusters.iter().enumerate() {
            problems.extend(c.report.check_invariants());
            if c.partition.total() != c.rules.len() {
                problems.push(format!(
                    "cluster {i}: partition holds {} rules, {} were mined",
                    c.partition.total(),
                    c.rules.len()
                ));
            }
            problems.extend(
                c.partition
                    .check_witnesses()
                    .into_iter()
                    .map(|p| format!("cluster {i}: {p}")),
            );
            problems.extend(
                c.table
                    .check_invariants()
                    .into_iter()
                    .map(|p| format!("cluster {i}: {p}")),
            );
            for rule in &c.rules {
                if rule.support_count < self.config.min_support_count
                    || rule.confidence < self.config.min_confidence
                    || rule.confidence > 1.0
                {
                    problems.push(format!("cluster {i}: rule {rule} violates thresholds"));
                }
                if !c.top_assignees.contains(&rule.consequent.code) {
                    problems.push(format!(
                        "cluster {i}: rule {rule} predicts a non-top assignee"
                    ));
                }
            }
        }
        problems
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSummary {
    #[serde(flatten)]
    pub report: ClusterReport,
    pub frequent_itemsets: usize,
    pub rule_count: usize,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub input_records: usize,
    pub k: usize,
    pub seed: u64,
    pub iterations_run: usize,
    pub inertia: f64,
    pub min_support_count: u32,
    pub min_confidence: f64,
    pub top_n: usize,
    pub total_rules: usize,
    pub total_essential: usize,
    pub total_redundant: usize,
    pub clusters: Vec<ClusterSummary>,
}

/// Clusters already-encoded records and mines every cluster.
pub fn analyze_records(
    config: &PipelineConfig,
    codebooks: Codebooks,
    records: Vec<BugRecord>,
) -> Result<Analysis> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    pool.install(|| {
        let points: Vec<FeatureVector> = records.iter().map(FeatureVector::from_record).collect();
        let model = kmeans_fit(&points, config.k, config.seed, config.max_iterations)?;
        info!(
            "k-means: k={} iterations={} inertia={}",
            model.k, model.iterations_run, model.inertia
        );
        let groups = split_by_cluster(&records, &model)?;
        let params = MiningParams::from(config);
        let clusters = groups
            .into_par_iter()
            .enumerate()
            .map(|(i, group)| analyze_cluster(i, group, params, &codebooks))
            .collect::<Result<Vec<_>>>()?;
        Ok(Analysis {
            config: config.clone(),
            codebooks: codebooks.clone(),
            records: records.clone(),
            model,
            clusters,
        })
    })
}

/// Reads, encodes and analyses the configured input.
pub fn analyze(config: &PipelineConfig) -> Result<Analysis> {
    let rows = read_csv_file(&config.input_path, &config.column_map)?;
    info!(
        "read {} bug reports from {}",
        rows.len(),
        config.input_path.display()
    );
    let (codebooks, records) = build_codebooks_and_encode(&rows)?;
    analyze_records(config, codebooks, records)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes every report file into `dir`, which must already exist.
pub fn write_report_files(analysis: &Analysis, dir: &Path) -> Result<()> {
    let figures = dir.join("figures");
    fs::create_dir_all(&figures).map_err(|e| Error::io(&figures, e))?;
    let reports = analysis.reports();

    write(
        dir,
        "summary.json",
        &serde_json::to_string_pretty(&analysis.summary())?,
    )?;
    write(dir, "config_used.json", &analysis.config.to_json()?)?;
    write(dir, "codebooks.json", &analysis.codebooks.to_json()?)?;
    write(
        dir,
        "clusters.json",
        &analysis.model.to_json(&analysis.records)?,
    )?;
    write(dir, "rules.csv", &report::rules_csv(&reports)?)?;
    for r in &reports {
        write(
            dir,
            &format!("cluster_{}.txt", r.cluster_index),
            &r.to_text(),
        )?;
    }
    write(
        &figures,
        "cluster_sizes.csv",
        &report::cluster_sizes_csv(&reports),
    )?;
    write(
        &figures,
        "essential_redundant.csv",
        &report::essential_redundant_csv(&reports),
    )?;
    write(
        &figures,
        "rule_lengths.csv",
        &report::rule_lengths_csv(&reports),
    )?;
    Ok(())
}

/// Writes the report into a scratch directory next to `output_dir/report`
/// and renames it into place, so a failed run leaves no partial output.
pub fn write_report(analysis: &Analysis, output_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let target = output_dir.join("report");
    let scratch = output_dir.join(format!(".report.tmp-{}", std::process::id()));
    if scratch.exists() {
        fs::remove_dir_all(&scratch).map_err(|e| Error::io(&scratch, e))?;
    }
    fs::create_dir(&scratch).map_err(|e| Error::io(&scratch, e))?;

    let result = write_report_files(analysis, &scratch).and_then(|()| {
        if target.exists() {
            fs::remove_dir_all(&target).map_err(|e| Error::io(&target, e))?;
        }
        fs::rename(&scratch, &target).map_err(|e| Error::io(&target, e))
    });
    if result.is_err() {
        let _ = fs::remove_dir_all(&scratch);
    }
    result.map(|()| target)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report_dir: PathBuf,
    pub analysis: Analysis,
}

/// Runs the full pipeline, audits it, and writes `output_dir/report`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunOutcome> {
    let analysis = analyze(config)?;
    let problems = analysis.audit();
    if !problems.is_empty() {
        return Err(Error::Invariant(problems));
    }
    let report_dir = write_report(&analysis, &config.output_dir)?;
    info!("report written to {}", report_dir.display());
    Ok(RunOutcome {
        report_dir,
        analysis,
    })
}
