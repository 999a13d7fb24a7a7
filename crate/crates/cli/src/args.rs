use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use cdindex::io::{InputSource, LoadOptions, ResultFormat};
use cdindex::{CdParams, DanglingPolicy, Parallelism};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::config::Config;
use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "cdindex",
    version,
    about = "CD disruption index over citation networks"
)]
pub struct Cli {
    /// TOML file with default values for flags
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Only log warnings and errors
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute CD_t for every publication in a network
    Compute(ComputeArgs),
    /// Summary statistics and histogram of a results file
    Stats(StatsArgs),
    /// Mean CD per publication year
    Trend(TrendArgs),
    /// Label results as disruptive, neutral or consolidating
    Classify(ClassifyArgs),
    /// Compare the labels derived from two results files
    Compare(CompareArgs),
    /// Generate a seeded synthetic network
    Synth(SynthArgs),
    /// Recompute a sample of a results file and report differences
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    Nested,
    EdgeList,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmChoice {
    Original,
    Decomposed,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DanglingChoice {
    Error,
    Drop,
    Materialize,
}

impl From<DanglingChoice> for DanglingPolicy {
    fn from(c: DanglingChoice) -> Self {
        match c {
            DanglingChoice::Error => DanglingPolicy::Error,
            DanglingChoice::Drop => DanglingPolicy::Drop,
            DanglingChoice::Materialize => DanglingPolicy::Materialize,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl From<OutputFormat> for ResultFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => ResultFormat::Csv,
            OutputFormat::Jsonl => ResultFormat::Jsonl,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TruthChoice {
    A,
    B,
}

/// Where the network comes from.
#[derive(Debug, Args)]
pub struct NetworkArgs {
    /// Nested JSON-lines network
    #[arg(long, value_name = "PATH", conflicts_with_all = ["nodes", "edges"])]
    pub input: Option<PathBuf>,
    /// Node table of an edge-list network (id,year)
    #[arg(long, value_name = "PATH", requires = "edges")]
    pub nodes: Option<PathBuf>,
    /// Edge table of an edge-list network (citing_id,cited_id)
    #[arg(long, value_name = "PATH", requires = "nodes")]
    pub edges: Option<PathBuf>,
    /// Input layout; inferred from the path flags when omitted
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// What to do with edges whose endpoint has no record [default: drop]
    #[arg(long, value_enum)]
    pub dangling: Option<DanglingChoice>,
    /// Skip records without a year instead of failing
    #[arg(long)]
    pub lenient_years: bool,
}

impl NetworkArgs {
    pub fn source(&self) -> Result<InputSource, Failure> {
        let source = match (&self.input, &self.nodes, &self.edges) {
            (Some(path), None, None) => InputSource::Nested(path.clone()),
            (None, Some(nodes), Some(edges)) => InputSource::EdgeList {
                nodes: nodes.clone(),
                edges: edges.clone(),
            },
            _ => {
                return Err(Failure::invalid(
                    "give either --input or both --nodes and --edges",
                ))
            }
        };
        match (self.format, &source) {
            (Some(InputFormat::Nested), InputSource::EdgeList { .. }) => Err(Failure::invalid(
                "--format nested takes --input, not --nodes/--edges",
            )),
            (Some(InputFormat::EdgeList), InputSource::Nested(_)) => Err(Failure::invalid(
                "--format edge-list takes --nodes and --edges, not --input",
            )),
            _ => Ok(source),
        }
    }

    pub fn options(&self, config: &Config) -> LoadOptions {
        LoadOptions {
            dangling: self
                .dangling
                .or(config.dangling)
                .map(Into::into)
                .unwrap_or_default(),
            lenient_years: self.lenient_years || config.lenient_years.unwrap_or(false),
        }
    }
}

#[derive(Debug, Args)]
pub struct ResultsInput {
    /// Results file written by `compute`
    #[arg(long, value_name = "PATH")]
    pub results: PathBuf,
    /// Results layout; inferred from the extension when omitted
    #[arg(long, value_enum)]
    pub results_format: Option<OutputFormat>,
}

impl ResultsInput {
    pub fn format(&self) -> ResultFormat {
        self.results_format
            .unwrap_or_else(|| guess_format(&self.results))
            .into()
    }
}

pub fn guess_format(path: &Path) -> OutputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl" | "json" | "ndjson") => OutputFormat::Jsonl,
        _ => OutputFormat::Csv,
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Impact span in years [default: 5]
    #[arg(long)]
    pub t: Option<u32>,
    /// Only score publications with at least this many declared references
    #[arg(long)]
    pub min_refs: Option<u32>,
    /// Also write rows whose CD is undefined (no citer in the window)
    #[arg(long)]
    pub emit_undefined: bool,
    /// Worker threads [default: all cores]
    #[arg(long, env = "CDINDEX_PARALLELISM")]
    pub parallelism: Option<usize>,
    /// Scoring algorithm; `both` fails if the two disagree anywhere [default: decomposed]
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmChoice>,
    /// Results file; standard output when omitted
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// [default: csv]
    #[arg(long, value_enum)]
    pub output_format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: ResultsInput,
    /// Also write a histogram CSV here
    #[arg(long, value_name = "PATH")]
    pub histogram: Option<PathBuf>,
    /// Histogram bin width [default: 0.01]
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// Value of the `source` column in the histogram CSV
    #[arg(long, default_value = "results")]
    pub label: String,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[command(flatten)]
    pub input: ResultsInput,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Trend CSV; standard output when omitted
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: ResultsInput,
    /// Fraction labelled at each tail [default: 0.01]
    #[arg(long)]
    pub top_fraction: Option<f64>,
    /// Label CSV; standard output when omitted
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// First results file (matrix rows)
    #[arg(long, value_name = "PATH")]
    pub a: PathBuf,
    /// Second results file (matrix columns)
    #[arg(long, value_name = "PATH")]
    pub b: PathBuf,
    /// Layout of both results files; inferred from the extensions when omitted
    #[arg(long, value_enum)]
    pub results_format: Option<OutputFormat>,
    /// Fraction labelled at each tail [default: 0.01]
    #[arg(long)]
    pub top_fraction: Option<f64>,
    /// Which file holds the reference labels
    #[arg(long, value_enum, default_value = "a")]
    pub truth: TruthChoice,
    /// Also write the confusion matrix as CSV here
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 5000)]
    pub edges: usize,
    #[arg(long, default_value_t = 1980)]
    pub year_min: i32,
    #[arg(long, default_value_t = 2020)]
    pub year_max: i32,
    /// [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Share of edges allowed to point forward in time
    #[arg(long, default_value_t = 0.0)]
    pub acausal_fraction: f64,
    #[arg(long, value_enum, default_value = "nested")]
    pub format: InputFormat,
    /// Output file for `nested`, output directory for `edge-list`
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: ResultsInput,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Number of rows to recheck; all rows when omitted
    #[arg(long)]
    pub sample: Option<usize>,
    /// Seed for choosing the sample [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn impact_span(flag: Option<u32>, config: &Config) -> Result<CdParams, Failure> {
    let t = flag.or(config.t).unwrap_or(5);
    CdParams::new(t).map_err(|e| Failure::invalid(e.to_string()))
}

pub fn parallelism(flag: Option<usize>, config: &Config) -> Result<Parallelism, Failure> {
    match flag.or(config.parallelism) {
        None => Ok(Parallelism::Auto),
        Some(n) => NonZeroUsize::new(n)
            .map(Parallelism::Fixed)
            .ok_or_else(|| Failure::invalid("--parallelism must be at least 1")),
    }
}

pub fn top_fraction(flag: Option<f64>, config: &Config) -> Result<f64, Failure> {
    let f = flag
        .or(config.top_fraction)
        .unwrap_or(cdindex::analytics::DEFAULT_TOP_FRACTION);
    if f > 0.0 && f < 0.5 {
        Ok(f)
    } else {
        Err(Failure::invalid(format!(
            "--top-fraction must lie in (0, 0.5), got {f}"
        )))
    }
}
