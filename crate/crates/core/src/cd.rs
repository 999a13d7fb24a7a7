//! CD_t scoring for a single focal publication.
//!
//! For a focal publication `f` published in year `T` with references `R`, the
//! citer set `C` holds every distinct publication from years `T+1..=T+t` that
//! cites `f` or a member of `R`. Each citer scores
//!
//! | cites `f` | cites some `r ∈ R` | score |
//! |-----------|--------------------|-------|
//! | yes       | no                 | 1     |
//! | yes       | yes                | -1    |
//! | no        | yes                | 0     |
//!
//! and `CD_t` is the mean score. [`cd_original`] collects `C` and then checks
//! each citer against `f` and `R`. [`cd_decomposed`] instead makes two
//! independent passes: every in-window citer of `f` gets `s' = -1`, every
//! in-window citer of any reference gets `s'' = -2` (once, however many
//! references it cites), and `CD_t = (Σs' + Σs'') / n + 2`. The two agree
//! because `s = s' + s'' + 2` in each of the three cases above.
//!
//! Both paths reduce to an integer numerator over `n` and divide once, so they
//! return bit-identical values.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CitationNetwork, NodeIx, PubId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CdError {
    #[error("unknown publication id {0}")]
    UnknownId(PubId),
    #[error("impact span t must be at least 1, got {0}")]
    InvalidImpactSpan(u32),
}

pub(crate) fn lookup(network: &CitationNetwork, focal: &PubId) -> Result<NodeIx, CdError> {
    network
        .node(focal)
        .ok_or_else(|| CdError::UnknownId(focal.clone()))
}

/// Impact span `t`: citations from years `T+1` through `T+t` count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CdParams {
    t: u32,
}

impl CdParams {
    pub fn new(t: u32) -> Result<Self, CdError> {
        if t == 0 {
            return Err(CdError::InvalidImpactSpan(t));
        }
        Ok(CdParams { t })
    }

    pub fn t(self) -> u32 {
        self.t
    }

    /// Inclusive citer-year window for a focal year.
    pub fn window(self, focal_year: i32) -> (i64, i64) {
        let year = focal_year as i64;
        (year + 1, year + self.t as i64)
    }
}

impl Default for CdParams {
    fn default() -> Self {
        CdParams { t: 5 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Original,
    #[default]
    Decomposed,
}

/// Per-citer classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiterScore {
    pub citer: PubId,
    pub cites_focal: bool,
    pub cites_reference: bool,
    pub score: i8,
}

impl CiterScore {
    /// `None` when the publication cites neither the focal work nor any
    /// reference, in which case it is not a citer at all.
    pub fn new(citer: PubId, cites_focal: bool, cites_reference: bool) -> Option<Self> {
        let score = match (cites_focal, cites_reference) {
            (true, false) => 1,
            (true, true) => -1,
            (false, true) => 0,
            (false, false) => return None,
        };
        Some(CiterScore {
            citer,
            cites_focal,
            cites_reference,
            score,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdResult {
    pub focal: PubId,
    pub t: u32,
    /// `None` when no citer falls in the window.
    pub cd: Option<f64>,
    pub n: u64,
    pub k: u64,
    pub n_disruptive: u64,
    pub n_neutral: u64,
    pub n_consolidating: u64,
}

impl CdResult {
    pub fn from_counts(
        focal: PubId,
        t: u32,
        k: u64,
        n_disruptive: u64,
        n_neutral: u64,
        n_consolidating: u64,
    ) -> Self {
        let n = n_disruptive + n_neutral + n_consolidating;
        let cd = (n > 0).then(|| (n_disruptive as i64 - n_consolidating as i64) as f64 / n as f64);
        CdResult {
            focal,
            t,
            cd,
            n,
            k,
            n_disruptive,
            n_neutral,
            n_consolidating,
        }
    }

    /// `Σ s(c)`, so that `cd = numerator / n`.
    pub fn numerator(&self) -> i64 {
        self.n_disruptive as i64 - self.n_consolidating as i64
    }

    pub fn is_defined(&self) -> bool {
        self.cd.is_some()
    }
}

/// Three-way scoring of the collected citer set.
pub fn cd_original(
    network: &CitationNetwork,
    focal: &PubId,
    params: CdParams,
) -> Result<CdResult, CdError> {
    let node = lookup(network, focal)?;
    Ok(original_at(network, node, params))
}

pub(crate) fn original_at(network: &CitationNetwork, focal: NodeIx, params: CdParams) -> CdResult {
    let k = network.refs_raw(focal).len() as u64;
    let (mut disruptive, mut neutral, mut consolidating) = (0u64, 0u64, 0u64);
    for (_, cites_focal, cites_reference) in classify_citers(network, focal, params) {
        match (cites_focal, cites_reference) {
            (true, false) => disruptive += 1,
            (true, true) => consolidating += 1,
            (false, true) => neutral += 1,
            (false, false) => unreachable!("collected citer cites nothing"),
        }
    }
    CdResult::from_counts(
        network.id(focal).clone(),
        params.t(),
        k,
        disruptive,
        neutral,
        consolidating,
    )
}

/// Collects `C`, then checks every member's own reference list against `f`
/// and `R`.
fn classify_citers(
    network: &CitationNetwork,
    focal: NodeIx,
    params: CdParams,
) -> Vec<(NodeIx, bool, bool)> {
    let (from, to) = params.window(network.year(focal));
    let references = network.refs_raw(focal);

    let mut citers: BTreeSet<u32> = network
        .citers_window_raw(focal, from, to)
        .iter()
        .copied()
        .collect();
    for &r in references {
        citers.extend(network.citers_window_raw(NodeIx(r), from, to));
    }

    citers
        .into_iter()
        .map(|c| {
            let own = network.refs_raw(NodeIx(c));
            let cites_focal = own.binary_search(&focal.0).is_ok();
            let cites_reference = own.iter().any(|x| references.binary_search(x).is_ok());
            (NodeIx(c), cites_focal, cites_reference)
        })
        .collect()
}

/// Per-citer scores, sorted by citer id.
pub fn score_breakdown(
    network: &CitationNetwork,
    focal: &PubId,
    params: CdParams,
) -> Result<Vec<CiterScore>, CdError> {
    let node = lookup(network, focal)?;
    let mut scores: Vec<CiterScore> = classify_citers(network, node, params)
        .into_iter()
        .filter_map(|(c, f, r)| CiterScore::new(network.id(c).clone(), f, r))
        .collect();
    scores.sort_by(|a, b| a.citer.cmp(&b.citer));
    Ok(scores)
}

/// Two independent scans with `s'`/`s''` scores.
pub fn cd_decomposed(
    network: &CitationNetwork,
    focal: &PubId,
    params: CdParams,
) -> Result<CdResult, CdError> {
    let node = lookup(network, focal)?;
    Ok(DecomposedScorer::new(network).score(network, node, params))
}

const SEEN_FOCAL: u8 = 0b01;
const SEEN_REFERENCE: u8 = 0b10;

/// Reusable scratch space for [`cd_decomposed`]: a per-node membership byte
/// plus the list of touched nodes, so resetting costs O(n) rather than
/// O(network).
#[derive(Debug, Default)]
pub struct DecomposedScorer {
    marks: Vec<u8>,
    touched: Vec<u32>,
}

impl DecomposedScorer {
    pub fn new(network: &CitationNetwork) -> Self {
        DecomposedScorer {
            marks: vec![0; network.len()],
            touched: Vec::new(),
        }
    }

    pub fn score(
        &mut self,
        network: &CitationNetwork,
        focal: NodeIx,
        params: CdParams,
    ) -> CdResult {
        if self.marks.len() < network.len() {
            self.marks.resize(network.len(), 0);
        }
        let (from, to) = params.window(network.year(focal));
        let references = network.refs_raw(focal);

        // Scan A: s' = -1 for each distinct citer of f.
        let mut sum_focal: i64 = 0;
        for &c in network.citers_window_raw(focal, from, to) {
            let mark = &mut self.marks[c as usize];
            if *mark == 0 {
                self.touched.push(c);
            }
            if *mark & SEEN_FOCAL == 0 {
                *mark |= SEEN_FOCAL;
                sum_focal -= 1;
            }
        }

        // Scan B: s'' = -2 for each distinct citer of any reference.
        let mut sum_reference: i64 = 0;
        for &r in references {
            for &c in network.citers_window_raw(NodeIx(r), from, to) {
                let mark = &mut self.marks[c as usize];
                if *mark == 0 {
                    self.touched.push(c);
                }
                if *mark & SEEN_REFERENCE == 0 {
                    *mark |= SEEN_REFERENCE;
                    sum_reference -= 2;
                }
            }
        }

        let n = self.touched.len() as u64;
        let (mut disruptive, mut neutral, mut consolidating) = (0u64, 0u64, 0u64);
        for &c in &self.touched {
            match std::mem::take(&mut self.marks[c as usize]) {
                SEEN_FOCAL => disruptive += 1,
                SEEN_REFERENCE => neutral += 1,
                _ => consolidating += 1,
            }
        }
        self.touched.clear();

        let numerator = sum_focal + sum_reference + 2 * n as i64;
        let cd = (n > 0).then(|| numerator as f64 / n as f64);
        debug_assert_eq!(numerator, disruptive as i64 - consolidating as i64);

        CdResult {
            focal: network.id(focal).clone(),
            t: params.t(),
            cd,
            n,
            k: references.len() as u64,
            n_disruptive: disruptive,
            n_neutral: neutral,
            n_consolidating: consolidating,
        }
    }
}
