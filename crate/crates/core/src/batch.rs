//! Compute CD_t for every focal publication in a network.
//!
//! Focal nodes are split into contiguous index shards of [`SHARD_SIZE`].
//! Workers claim shards from a shared counter, keep one
//! [`DecomposedScorer`] each, and hand finished shards to the calling thread,
//! which is the only one touching the sink.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cd::{self, Algorithm, CdError, CdParams, CdResult, DecomposedScorer};
use crate::graph::{CitationNetwork, DanglingPolicy, FilterSpec, GraphError, NodeIx, PubId};

pub const SHARD_SIZE: usize = 2048;

pub type SinkError = Box<dyn std::error::Error + Send + Sync>;

/// Consumer of batch results. Called from a single thread.
pub trait ResultSink {
    fn accept(&mut self, result: CdResult) -> Result<(), SinkError>;
}

impl ResultSink for Vec<CdResult> {
    fn accept(&mut self, result: CdResult) -> Result<(), SinkError> {
        self.push(result);
        Ok(())
    }
}

/// Adapts a closure into a [`ResultSink`].
pub struct FnSink<F>(pub F);

impl<F> ResultSink for FnSink<F>
where
    F: FnMut(CdResult) -> Result<(), SinkError>,
{
    fn accept(&mut self, result: CdResult) -> Result<(), SinkError> {
        (self.0)(result)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    #[default]
    Auto,
    Fixed(NonZeroUsize),
}

impl Parallelism {
    pub fn threads(self) -> usize {
        match self {
            Parallelism::Auto => std::thread::available_parallelism()
                .map(NonZeroUsize::get)
                .unwrap_or(1),
            Parallelism::Fixed(n) => n.get(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BatchSpec {
    pub params: CdParams,
    /// Applied as a network subset (dangling edges dropped) before scoring.
    pub filter: FilterSpec,
    pub emit_undefined: bool,
    pub parallelism: Parallelism,
    pub algorithm: Algorithm,
    /// Rows between progress callbacks; 0 disables them.
    pub progress_interval: u64,
}

impl Default for BatchSpec {
    fn default() -> Self {
        BatchSpec {
            params: CdParams::default(),
            filter: FilterSpec::default(),
            emit_undefined: false,
            parallelism: Parallelism::Auto,
            algorithm: Algorithm::Decomposed,
            progress_interval: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BatchReport {
    pub total_focals: u64,
    pub defined: u64,
    pub undefined: u64,
    pub emitted: u64,
    pub wall_time: Duration,
}

impl BatchReport {
    /// Focal publications per second.
    pub fn throughput(&self) -> f64 {
        let secs = self.wall_time.as_secs_f64();
        if secs > 0.0 {
            self.total_focals as f64 / secs
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Progress {
    pub done: u64,
    pub total: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("result sink failed after {} emitted rows: {source}", report.emitted)]
    Sink {
        #[source]
        source: SinkError,
        report: BatchReport,
    },
}

pub fn compute_all(
    network: &CitationNetwork,
    spec: &BatchSpec,
    sink: &mut dyn ResultSink,
) -> Result<BatchReport, BatchError> {
    compute_all_with_progress(network, spec, sink, &mut |_| {})
}

pub fn compute_all_with_progress(
    network: &CitationNetwork,
    spec: &BatchSpec,
    sink: &mut dyn ResultSink,
    progress: &mut dyn FnMut(&Progress),
) -> Result<BatchReport, BatchError> {
    let start = Instant::now();
    let subset;
    let network = if spec.filter.is_identity() {
        network
    } else {
        subset = network.subset(&spec.filter, DanglingPolicy::Drop)?;
        &subset
    };

    let total = network.len();
    let shards = total.div_ceil(SHARD_SIZE);
    let workers = spec.parallelism.threads().clamp(1, shards.max(1));
    let next_shard = AtomicUsize::new(0);
    let cancelled = AtomicBool::new(false);
    let mut report = BatchReport::default();
    let mut failure = None;

    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::sync_channel::<Vec<CdResult>>(workers * 2);
        for _ in 0..workers {
            let tx = tx.clone();
            let next_shard = &next_shard;
            let cancelled = &cancelled;
            scope.spawn(move || {
                let mut scorer = DecomposedScorer::new(network);
                loop {
                    if cancelled.load(Ordering::Relaxed) {
                        break;
                    }
                    let shard = next_shard.fetch_add(1, Ordering::Relaxed);
                    if shard >= shards {
                        break;
                    }
                    let lo = shard * SHARD_SIZE;
                    let hi = (lo + SHARD_SIZE).min(total);
                    let results: Vec<CdResult> = (lo..hi)
                        .map(|i| {
                            let node = NodeIx(i as u32);
                            match spec.algorithm {
                                Algorithm::Decomposed => scorer.score(network, node, spec.params),
                                Algorithm::Original => cd::original_at(network, node, spec.params),
                            }
                        })
                        .collect();
                    if tx.send(results).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);

        let mut next_report = spec.progress_interval;
        'recv: for results in rx.iter() {
            for result in results {
                report.total_focals += 1;
                if result.is_defined() {
                    report.defined += 1;
                } else {
                    report.undefined += 1;
                    if !spec.emit_undefined {
                        continue;
                    }
                }
                if let Err(err) = sink.accept(result) {
                    failure = Some(err);
                    cancelled.store(true, Ordering::Relaxed);
                    break 'recv;
                }
                report.emitted += 1;
            }
            if spec.progress_interval > 0 && report.total_focals >= next_report {
                progress(&Progress {
                    done: report.total_focals,
                    total: total as u64,
                    elapsed: start.elapsed(),
                });
                while next_report <= report.total_focals {
                    next_report += spec.progress_interval;
                }
            }
        }
        // Dropping the receiver unblocks any worker waiting to send.
    });

    report.wall_time = start.elapsed();
    match failure {
        Some(source) => Err(BatchError::Sink { source, report }),
        None => Ok(report),
    }
}

/// Scores the given focals in input order with the decomposed algorithm.
/// Unknown ids yield a per-item error.
pub fn compute_many(
    network: &CitationNetwork,
    focals: &[PubId],
    params: CdParams,
) -> Vec<Result<CdResult, CdError>> {
    let mut scorer = DecomposedScorer::new(network);
    focals
        .iter()
        .map(|id| cd::lookup(network, id).map(|node| scorer.score(network, node, params)))
        .collect()
}
