//! Seeded synthetic citation networks.
//!
//! Node years are drawn uniformly from the year range. Each edge picks a
//! uniformly random citing node and, by default, a cited node published no
//! later than the citing one. With `acausal_fraction > 0` that share of edges
//! picks the cited node from the whole network instead. Edges are distinct
//! and never self-loops, and the same spec always yields the same records.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{PubId, PublicationRecord};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub nodes: usize,
    pub edges: usize,
    /// Inclusive.
    pub year_min: i32,
    /// Inclusive.
    pub year_max: i32,
    pub seed: u64,
    pub acausal_fraction: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            nodes: 1000,
            edges: 5000,
            year_min: 1980,
            year_max: 2020,
            seed: 1,
            acausal_fraction: 0.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("year range [{0}, {1}] is empty")]
    EmptyYearRange(i32, i32),
    #[error("acausal fraction must lie in [0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("cannot place {requested} distinct edges; at most {possible} are possible")]
    TooManyEdges { requested: usize, possible: u128 },
}

pub fn node_id(i: usize) -> PubId {
    PubId::new(format!("pub.{i:08}")).expect("non-empty")
}

/// Upper bound on the number of distinct edges the spec can hold.
fn capacity(spec: &SynthSpec, years: &[i32]) -> u128 {
    let n = spec.nodes as u128;
    if spec.acausal_fraction > 0.0 {
        return n * n.saturating_sub(1);
    }
    // causal pairs: cited year <= citing year
    let mut sorted = years.to_vec();
    sorted.sort_unstable();
    sorted
        .iter()
        .map(|&y| (sorted.partition_point(|&x| x <= y) as u128).saturating_sub(1))
        .sum()
}

pub fn generate(spec: &SynthSpec) -> Result<Vec<PublicationRecord>, SynthError> {
    if spec.year_min > spec.year_max {
        return Err(SynthError::EmptyYearRange(spec.year_min, spec.year_max));
    }
    if !(0.0..=1.0).contains(&spec.acausal_fraction) {
        return Err(SynthError::InvalidFraction(spec.acausal_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let years: Vec<i32> = (0..spec.nodes)
        .map(|_| rng.gen_range(spec.year_min..=spec.year_max))
        .collect();

    let possible = capacity(spec, &years);
    if spec.edges as u128 > possible {
        return Err(SynthError::TooManyEdges {
            requested: spec.edges,
            possible,
        });
    }

    // Nodes ordered by year; `older_end[p]` is one past the last node (in that
    // order) whose year is <= the year of the node at position p.
    let mut by_year: Vec<u32> = (0..spec.nodes as u32).collect();
    by_year.sort_by_key(|&i| (years[i as usize], i));
    let mut pos_of = vec![0u32; spec.nodes];
    for (p, &i) in by_year.iter().enumerate() {
        pos_of[i as usize] = p as u32;
    }
    let mut older_end = vec![0u32; spec.nodes];
    let mut p = spec.nodes;
    while p > 0 {
        let year = years[by_year[p - 1] as usize];
        let end = p;
        while p > 0 && years[by_year[p - 1] as usize] == year {
            older_end[p - 1] = end as u32;
            p -= 1;
        }
    }

    let mut edges: Vec<u64> = Vec::with_capacity(spec.edges);
    while edges.len() < spec.edges {
        let missing = spec.edges - edges.len();
        for _ in 0..missing {
            let citing = rng.gen_range(0..spec.nodes);
            let cited = if rng.gen_bool(spec.acausal_fraction) {
                rng.gen_range(0..spec.nodes)
            } else {
                let end = older_end[pos_of[citing] as usize] as usize;
                by_year[rng.gen_range(0..end)] as usize
            };
            if cited != citing {
                edges.push(((citing as u64) << 32) | cited as u64);
            }
        }
        edges.sort_unstable();
        edges.dedup();
    }
    edges.truncate(spec.edges);

    let mut records: Vec<PublicationRecord> = (0..spec.nodes)
        .map(|i| PublicationRecord::new(node_id(i), years[i]))
        .collect();
    for e in edges {
        let (citing, cited) = ((e >> 32) as usize, (e & 0xffff_ffff) as usize);
        records[citing].references.push(node_id(cited));
    }
    Ok(records)
}
