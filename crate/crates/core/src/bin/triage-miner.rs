use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use triage_miner::config::{validate_config, ConfigOverrides};
use triage_miner::ingest::ColumnMap;
use triage_miner::pipeline::{analyze, run_pipeline};
use triage_miner::synth::{synthesize_rows, write_csv, SynthConfig};
use triage_miner::verify::{self, VerifyOptions};
use triage_miner::Error;

#[derive(Parser)]
#[command(
    name = "triage-miner",
    version,
    about = "Mine assignee rules from bug reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write the report directory.
    Run(PipelineArgs),
    /// Cross-check the fast paths against brute-force oracles.
    Verify {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Random datasets and rule sets to check.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest transaction count handed to the brute-force miner.
        #[arg(long, default_value_t = 200)]
        max_transactions: usize,
        /// Largest rule set handed to the all-pairs redundancy check.
        #[arg(long, default_value_t = 50)]
        max_rules: usize,
    },
    /// Write a deterministic synthetic bug dataset as CSV.
    Synthesize {
        #[arg(long, default_value_t = 1000)]
        records: usize,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        components: usize,
        #[arg(long, default_value_t = 6)]
        operating_systems: usize,
        #[arg(long, default_value_t = 40)]
        assignees: usize,
        /// Zipf exponent of the global assignee distribution.
        #[arg(long, default_value_t = 1.1)]
        skew: f64,
        /// Probability that a bug goes to one of its component's owners.
        #[arg(long, default_value_t = 0.7)]
        affinity: f64,
    },
}

#[derive(Args)]
struct PipelineArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bug report CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Directory that receives `report/` [default: output].
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of k-means clusters [default: 5].
    #[arg(long, allow_negative_numbers = true)]
    clusters: Option<i64>,
    /// Minimum support count per cluster [default: 3].
    #[arg(long, allow_negative_numbers = true)]
    min_support: Option<i64>,
    /// Minimum rule confidence in (0, 1] [default: 0.10].
    #[arg(long, allow_negative_numbers = true)]
    min_confidence: Option<f64>,
    /// Assignees per cluster allowed as rule consequents [default: 5].
    #[arg(long, allow_negative_numbers = true)]
    top_assignees: Option<i64>,
    /// Seed for k-means++ initialisation [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Lloyd iteration cap [default: 100].
    #[arg(long, allow_negative_numbers = true)]
    max_iterations: Option<i64>,
    /// Worker threads [default: number of clusters].
    #[arg(long, allow_negative_numbers = true)]
    parallelism: Option<i64>,
}

impl PipelineArgs {
    fn resolve(&self) -> Result<triage_miner::PipelineConfig, Error> {
        let raw = match &self.config {
            Some(path) => fs::read_to_string(path).map_err(|e| Error::io(path, e))?,
            None => String::new(),
        };
        validate_config(
            &raw,
            ConfigOverrides {
                input_path: self.input.clone(),
                column_map: None,
                k: self.clusters,
                min_support_count: self.min_support,
                min_confidence: self.min_confidence,
                top_n: self.top_assignees,
                seed: self.seed,
                max_iterations: self.max_iterations,
                parallelism: self.parallelism,
                output_dir: self.output.clone(),
            },
        )
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let outcome = run_pipeline(&config)?;
            let summary = outcome.analysis.summary();
            println!(
                "{} bug reports, {} clusters, {} rules ({} essential, {} redundant)",
                summary.input_records,
                summary.k,
                summary.total_rules,
                summary.total_essential,
                summary.total_redundant
            );
            println!("report: {}", outcome.report_dir.display());
        }
        Command::Verify {
            pipeline,
            trials,
            max_transactions,
            max_rules,
        } => {
            let options = VerifyOptions {
                trials,
                seed: pipeline.seed.unwrap_or(0),
                max_transactions,
                max_rules,
                ..VerifyOptions::default()
            };
            let mut checks = vec![
                verify::verify_apriori_random(&options),
                verify::verify_rules_random(&options),
                verify::verify_redundancy_random(&options),
            ];
            if pipeline.input.is_some() || pipeline.config.is_some() {
                let analysis = analyze(&pipeline.resolve()?)?;
                checks.extend(verify::verify_analysis(&analysis, &options));
            }
            let mut failures = Vec::new();
            for check in &checks {
                println!("{check}");
                for m in &check.mismatches {
                    println!("  {m}");
                }
                if !check.passed() {
                    failures.push(check.name.clone());
                }
            }
            if !failures.is_empty() {
                return Err(Error::Invariant(failures));
            }
        }
        Command::Synthesize {
            records,
            output,
            seed,
            components,
            operating_systems,
            assignees,
            skew,
            affinity,
        } => {
            let rows = synthesize_rows(&SynthConfig {
                records,
                seed,
                components,
                operating_systems,
                assignees,
                assignee_skew: skew,
                affinity,
            });
            let file = File::create(&output).map_err(|e| Error::io(&output, e))?;
            write_csv(&rows, &ColumnMap::default(), BufWriter::new(file))?;
            println!("wrote {} bug reports to {}", rows.len(), output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TRIAGE_MINER_LOG", "warn"))
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
