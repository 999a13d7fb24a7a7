//! CD disruption index computation over citation networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: immutable, year-indexed citation network and subsetting
//! - [`cd`]: per-publication CD_t scoring, both the three-way citer scoring and
//!   the two-scan decomposition (`s = s' + s'' + 2`)
//! - [`batch`]: sharded multi-threaded computation over every focal publication
//! - [`analytics`]: summary statistics, histograms, yearly trends and label
//!   comparison over result sets
//! - [`io`]: nested JSON-lines and edge-list CSV loading, result serialization
//! - [`synth`]: seeded synthetic citation networks for tests and benchmarks

pub mod analytics;
pub mod batch;
pub mod cd;
pub mod graph;
pub mod io;
pub mod synth;

pub use analytics::{
    classify, compare_labels, histogram, summarize, yearly_trend, AnalyticsError, DisruptionLabel,
    Histogram, LabelComparison, SummaryStats, TrendPoint,
};
pub use batch::{compute_all, compute_many, BatchError, BatchReport, BatchSpec, Parallelism};
pub use cd::{
    cd_decomposed, cd_original, score_breakdown, Algorithm, CdError, CdParams, CdResult, CiterScore,
};
pub use graph::{
    BuildReport, Citation, CitationNetwork, DanglingPolicy, FilterSpec, GraphError, NodeIx, PubId,
    PublicationRecord,
};
