//! Bug-assignee prediction with class association rules.
//!
//! Bug reports are encoded as severity, priority, component, operating
//! system and assignee codes, partitioned with K-means, and mined cluster
//! by cluster with Apriori for rules of the form
//! `Severity {Normal} ∧ Component{Sync} ⇒ Assignee {dev07} @ (7,77.78%)`.
//! Rules that add conditions without adding confidence are set aside as
//! redundant.
//!
//! The modules follow the pipeline order: [`ingest`], [`cluster`],
//! [`mine`], [`rules`], [`report`], with [`pipeline`] tying them together.

pub mod cluster;
pub mod config;
pub mod error;
pub mod ingest;
pub mod mine;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod rules;
pub mod synth;
pub mod verify;

pub use cluster::{kmeans_fit, split_by_cluster, ClusterModel, FeatureVector};
pub use config::{validate_config, ConfigOverrides, PipelineConfig};
pub use error::{Error, Result};
pub use ingest::{
    build_codebooks_and_encode, encode_priority, encode_severity, parse_csv, Attribute, BugRecord,
    Codebook, Codebooks, ColumnMap, RawBugRow,
};
pub use mine::{
    apriori, support_count, to_transactions, FrequentItemsetTable, Item, Itemset, Transaction,
};
pub use pipeline::{run_pipeline, Analysis};
pub use report::{build_cluster_report, length_histogram, render_rule, ClusterReport};
pub use rules::{eliminate_redundant, generate_class_rules, top_assignees, Rule, RulePartition};
