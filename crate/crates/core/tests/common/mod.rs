//! Shared helpers and independent oracles for the integration tests.
//!
//! The oracles work on plain edge lists and never touch `CitationNetwork`
//! internals.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use cdindex::{CitationNetwork, DanglingPolicy, PubId, PublicationRecord};
use rand::Rng;

pub fn pid(s: &str) -> PubId {
    PubId::new(s).unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// A raw graph: node years and distinct `(citing, cited)` pairs.
#[derive(Clone, Debug)]
pub struct RawGraph {
    pub years: Vec<(String, i32)>,
    pub edges: Vec<(String, String)>,
}

impl RawGraph {
    pub fn random(rng: &mut impl Rng, max_nodes: usize, acausal: bool) -> RawGraph {
        let nodes = rng.gen_range(1..=max_nodes);
        let span = rng.gen_range(1..=12);
        let years: Vec<(String, i32)> = (0..nodes)
            .map(|i| (format!("n{i:04}"), 1990 + rng.gen_range(0..span)))
            .collect();
        let density = rng.gen_range(0.0..4.0);
        let attempts = (nodes as f64 * density) as usize;
        let mut edges = BTreeSet::new();
        for _ in 0..attempts {
            let a = rng.gen_range(0..nodes);
            let b = rng.gen_range(0..nodes);
            if a == b {
                continue;
            }
            if !acausal && years[b].1 > years[a].1 {
                continue;
            }
            edges.insert((years[a].0.clone(), years[b].0.clone()));
        }
        RawGraph {
            years,
            edges: edges.into_iter().collect(),
        }
    }

    pub fn references_records(&self) -> Vec<PublicationRecord> {
        let mut refs: HashMap<&str, Vec<PubId>> = HashMap::new();
        for (a, b) in &self.edges {
            refs.entry(a).or_default().push(pid(b));
        }
        self.years
            .iter()
            .map(|(id, y)| {
                PublicationRecord::new(pid(id), *y)
                    .with_references(refs.remove(id.as_str()).unwrap_or_default())
            })
            .collect()
    }

    pub fn citations_records(&self) -> Vec<PublicationRecord> {
        let year: HashMap<&str, i32> = self.years.iter().map(|(id, y)| (id.as_str(), *y)).collect();
        let mut cits: HashMap<&str, Vec<(PubId, i32)>> = HashMap::new();
        for (a, b) in &self.edges {
            cits.entry(b).or_default().push((pid(a), year[a.as_str()]));
        }
        self.years
            .iter()
            .map(|(id, y)| {
                PublicationRecord::new(pid(id), *y)
                    .with_citations(cits.remove(id.as_str()).unwrap_or_default())
            })
            .collect()
    }

    pub fn network(&self) -> CitationNetwork {
        CitationNetwork::build(self.references_records(), DanglingPolicy::Error).unwrap()
    }
}

/// Brute-force CD: `(Σ s, n, k)` by scanning the full edge list.
pub fn oracle_cd(graph: &RawGraph, focal: &str, t: u32) -> (i64, u64, u64) {
    let year: HashMap<&str, i32> = graph
        .years
        .iter()
        .map(|(id, y)| (id.as_str(), *y))
        .collect();
    let edges: HashSet<(&str, &str)> = graph
        .edges
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let focal_year = year[focal] as i64;
    let refs: Vec<&str> = graph
        .edges
        .iter()
        .filter(|(a, _)| a == focal)
        .map(|(_, b)| b.as_str())
        .collect();

    let mut sum = 0i64;
    let mut n = 0u64;
    for (c, cy) in &graph.years {
        let lag = *cy as i64 - focal_year;
        if lag < 1 || lag > t as i64 {
            continue;
        }
        let cites_focal = edges.contains(&(c.as_str(), focal));
        let cites_ref = refs.iter().any(|r| edges.contains(&(c.as_str(), r)));
        match (cites_focal, cites_ref) {
            (true, false) => sum += 1,
            (true, true) => sum -= 1,
            (false, true) => {}
            (false, false) => continue,
        }
        n += 1;
    }
    (sum, n, refs.len() as u64)
}

/// Independent quantile: sort, then interpolate between order statistics.
pub fn oracle_quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p * (v.len() - 1) as f64;
    let below = pos.floor() as usize;
    let above = pos.ceil() as usize;
    let w = pos - below as f64;
    if w == 0.0 {
        v[below]
    } else {
        v[below] + w * (v[above] - v[below])
    }
}
