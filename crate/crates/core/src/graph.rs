//! Immutable citation network.
//!
//! Publications are mapped to dense indices in ascending id order, so two
//! networks built from the same records (in any order) are structurally equal.
//! Both directions of every edge are stored in CSR form:
//!
//! - `refs`: for each node, the sorted indices of the publications it cites
//! - `citers`: for each node, the publications citing it, sorted by
//!   `(citer year, citer index)` so that a year window is a contiguous slice

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque publication identifier, e.g. `pub.1019844293`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PubId(String);

impl PubId {
    pub fn new(id: impl Into<String>) -> Result<Self, GraphError> {
        let id = id.into();
        if id.is_empty() {
            return Err(GraphError::EmptyId);
        }
        Ok(PubId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PubId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for PubId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PubId::new(s)
    }
}

impl TryFrom<String> for PubId {
    type Error = GraphError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        PubId::new(value)
    }
}

impl TryFrom<&str> for PubId {
    type Error = GraphError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        PubId::new(value)
    }
}

impl From<PubId> for String {
    fn from(id: PubId) -> Self {
        id.0
    }
}

impl AsRef<str> for PubId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A citing publication as listed in a record's `citations` array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub id: PubId,
    pub year: i32,
}

/// One row of the input table.
///
/// Either direction of an edge may be given; `build` synthesizes the other.
/// Duplicates in `references` and `citations` are collapsed at build time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicationRecord {
    pub id: PubId,
    pub year: i32,
    pub references: Vec<PubId>,
    pub citations: Vec<Citation>,
}

impl PublicationRecord {
    pub fn new(id: PubId, year: i32) -> Self {
        PublicationRecord {
            id,
            year,
            references: Vec::new(),
            citations: Vec::new(),
        }
    }

    pub fn with_references(mut self, references: impl IntoIterator<Item = PubId>) -> Self {
        self.references.extend(references);
        self
    }

    pub fn with_citations(mut self, citations: impl IntoIterator<Item = (PubId, i32)>) -> Self {
        self.citations.extend(
            citations
                .into_iter()
                .map(|(id, year)| Citation { id, year }),
        );
        self
    }
}

/// What to do with an edge whose other endpoint has no record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DanglingPolicy {
    /// Abort the build.
    Error,
    /// Remove the edge and count it.
    #[default]
    Drop,
    /// Unknown citers (which carry a year) become stub records; unknown
    /// reference targets are dropped.
    Materialize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("publication id must be non-empty")]
    EmptyId,
    #[error("duplicate publication id {0}")]
    DuplicateId(PubId),
    #[error("dangling edge {src} -> {dst}: {dst} has no record")]
    DanglingEdge { src: PubId, dst: PubId },
    #[error(
        "inconsistent edge {src} -> {dst}: citation year {edge_year} but record year {record_year}"
    )]
    InconsistentEdge {
        src: PubId,
        dst: PubId,
        edge_year: i32,
        record_year: i32,
    },
    #[error("publication {0} cites itself")]
    SelfCitation(PubId),
    #[error("unknown publication id {0}")]
    UnknownId(PubId),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
}

/// Record filter applied by [`CitationNetwork::subset`]. All present
/// conditions must hold for a record to be kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FilterSpec {
    /// Minimum number of references, measured on the record before any edge
    /// pruning.
    pub min_references: Option<u32>,
    pub allowed_ids: Option<HashSet<PubId>>,
    /// Inclusive `[lo, hi]`.
    pub year_range: Option<(i32, i32)>,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<(), GraphError> {
        if let Some((lo, hi)) = self.year_range {
            if lo > hi {
                return Err(GraphError::InvalidFilter(format!(
                    "year range [{lo}, {hi}] is empty"
                )));
            }
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.min_references.is_none() && self.allowed_ids.is_none() && self.year_range.is_none()
    }
}

/// Counters collected while building a network.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub records: usize,
    pub duplicate_edges_collapsed: usize,
    pub dangling_edges_dropped: usize,
    pub stubs_materialized: usize,
    /// Citation entries whose year disagreed with the citer's own record.
    pub year_conflicts: usize,
}

/// Dense node index into a [`CitationNetwork`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIx(pub(crate) u32);

impl NodeIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct CitationNetwork {
    ids: Vec<PubId>,
    index: HashMap<PubId, u32>,
    years: Vec<i32>,
    declared_refs: Vec<u32>,
    ref_offsets: Vec<usize>,
    refs: Vec<u32>,
    citer_offsets: Vec<usize>,
    citers: Vec<u32>,
    citer_years: Vec<i32>,
    report: BuildReport,
}

impl PartialEq for CitationNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
            && self.years == other.years
            && self.declared_refs == other.declared_refs
            && self.ref_offsets == other.ref_offsets
            && self.refs == other.refs
            && self.citer_offsets == other.citer_offsets
            && self.citers == other.citers
    }
}

impl Eq for CitationNetwork {}

impl CitationNetwork {
    /// Builds a network from input records.
    ///
    /// An empty record list yields an empty network.
    pub fn build(
        records: Vec<PublicationRecord>,
        policy: DanglingPolicy,
    ) -> Result<CitationNetwork, GraphError> {
        build_inner(records, policy, None)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.refs.len()
    }

    pub fn report(&self) -> &BuildReport {
        &self.report
    }

    /// All ids in index order (ascending).
    pub fn ids(&self) -> &[PubId] {
        &self.ids
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeIx> + '_ {
        (0..self.ids.len() as u32).map(NodeIx)
    }

    pub fn node(&self, id: &PubId) -> Option<NodeIx> {
        self.index.get(id).copied().map(NodeIx)
    }

    pub fn require(&self, id: &PubId) -> Result<NodeIx, GraphError> {
        self.node(id)
            .ok_or_else(|| GraphError::UnknownId(id.clone()))
    }

    pub fn contains(&self, id: &PubId) -> bool {
        self.index.contains_key(id)
    }

    pub fn id(&self, node: NodeIx) -> &PubId {
        &self.ids[node.index()]
    }

    pub fn year(&self, node: NodeIx) -> i32 {
        self.years[node.index()]
    }

    pub fn year_of(&self, id: &PubId) -> Option<i32> {
        self.node(id).map(|n| self.year(n))
    }

    /// Reference count of the original record, before any edge pruning.
    pub fn declared_references(&self, node: NodeIx) -> u32 {
        self.declared_refs[node.index()]
    }

    /// Publications cited by `node`, ascending by index.
    pub fn references(&self, node: NodeIx) -> impl ExactSizeIterator<Item = NodeIx> + '_ {
        self.refs_raw(node).iter().map(|&r| NodeIx(r))
    }

    /// Publications citing `node`, ascending by `(year, index)`.
    pub fn citers(&self, node: NodeIx) -> impl ExactSizeIterator<Item = (NodeIx, i32)> + '_ {
        let range = self.citer_offsets[node.index()]..self.citer_offsets[node.index() + 1];
        self.citers[range.clone()]
            .iter()
            .zip(&self.citer_years[range])
            .map(|(&c, &y)| (NodeIx(c), y))
    }

    pub fn cites(&self, citing: NodeIx, cited: NodeIx) -> bool {
        self.refs_raw(citing).binary_search(&cited.0).is_ok()
    }

    pub fn references_of(&self, id: &PubId) -> Result<BTreeSet<&PubId>, GraphError> {
        let node = self.require(id)?;
        Ok(self.references(node).map(|r| self.id(r)).collect())
    }

    pub fn citations_of(&self, id: &PubId) -> Result<BTreeSet<(&PubId, i32)>, GraphError> {
        let node = self.require(id)?;
        Ok(self.citers(node).map(|(c, y)| (self.id(c), y)).collect())
    }

    /// Distinct citers of `target` published in `[from_year, to_year]`.
    /// An inverted window is empty.
    pub fn citers_in_window(
        &self,
        target: &PubId,
        from_year: i32,
        to_year: i32,
    ) -> Result<BTreeSet<&PubId>, GraphError> {
        let node = self.require(target)?;
        Ok(self
            .citers_window_raw(node, from_year as i64, to_year as i64)
            .iter()
            .map(|&c| &self.ids[c as usize])
            .collect())
    }

    /// All edges as `(citing, cited)` id pairs.
    pub fn edges(&self) -> BTreeSet<(&PubId, &PubId)> {
        self.nodes()
            .flat_map(|n| self.references(n).map(move |r| (n, r)))
            .map(|(a, b)| (self.id(a), self.id(b)))
            .collect()
    }

    pub(crate) fn refs_raw(&self, node: NodeIx) -> &[u32] {
        &self.refs[self.ref_offsets[node.index()]..self.ref_offsets[node.index() + 1]]
    }

    pub(crate) fn citers_window_raw(&self, node: NodeIx, from_year: i64, to_year: i64) -> &[u32] {
        let start = self.citer_offsets[node.index()];
        let end = self.citer_offsets[node.index() + 1];
        let years = &self.citer_years[start..end];
        let lo = years.partition_point(|&y| (y as i64) < from_year);
        let hi = years.partition_point(|&y| (y as i64) <= to_year);
        if lo >= hi {
            return &[];
        }
        &self.citers[start + lo..start + hi]
    }

    /// Converts the network back into records carrying both edge directions.
    pub fn to_records(&self) -> Vec<PublicationRecord> {
        self.nodes().map(|n| self.record(n)).collect()
    }

    fn record(&self, node: NodeIx) -> PublicationRecord {
        PublicationRecord {
            id: self.id(node).clone(),
            year: self.year(node),
            references: self.references(node).map(|r| self.id(r).clone()).collect(),
            citations: self
                .citers(node)
                .map(|(c, year)| Citation {
                    id: self.id(c).clone(),
                    year,
                })
                .collect(),
        }
    }

    /// New network holding only the records that pass `filter`. Edges touching
    /// removed records are handled by `policy`.
    pub fn subset(
        &self,
        filter: &FilterSpec,
        policy: DanglingPolicy,
    ) -> Result<CitationNetwork, GraphError> {
        filter.validate()?;
        let keep = |n: NodeIx| {
            filter
                .min_references
                .is_none_or(|min| self.declared_references(n) >= min)
                && filter
                    .allowed_ids
                    .as_ref()
                    .is_none_or(|ids| ids.contains(self.id(n)))
                && filter
                    .year_range
                    .is_none_or(|(lo, hi)| (lo..=hi).contains(&self.year(n)))
        };
        let mut records = Vec::new();
        let mut declared = Vec::new();
        for n in self.nodes().filter(|&n| keep(n)) {
            records.push(self.record(n));
            declared.push(self.declared_references(n));
        }
        build_inner(records, policy, Some(declared))
    }
}

fn build_inner(
    records: Vec<PublicationRecord>,
    policy: DanglingPolicy,
    declared_override: Option<Vec<u32>>,
) -> Result<CitationNetwork, GraphError> {
    let mut report = BuildReport {
        records: records.len(),
        ..BuildReport::default()
    };

    let mut position: HashMap<&PubId, usize> = HashMap::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        if position.insert(&rec.id, i).is_some() {
            return Err(GraphError::DuplicateId(rec.id.clone()));
        }
        if rec.references.contains(&rec.id) || rec.citations.iter().any(|c| c.id == rec.id) {
            return Err(GraphError::SelfCitation(rec.id.clone()));
        }
    }

    // Unknown citers become stubs under Materialize, earliest listed year.
    let mut stubs: HashMap<&PubId, i32> = HashMap::new();
    if policy == DanglingPolicy::Materialize {
        for rec in &records {
            for c in &rec.citations {
                if position.contains_key(&c.id) {
                    continue;
                }
                stubs
                    .entry(&c.id)
                    .and_modify(|y| {
                        if *y != c.year {
                            report.year_conflicts += 1;
                            *y = (*y).min(c.year);
                        }
                    })
                    .or_insert(c.year);
            }
        }
    }
    report.stubs_materialized = stubs.len();

    let mut all: Vec<(&PubId, i32, Option<usize>)> = records
        .iter()
        .enumerate()
        .map(|(i, r)| (&r.id, r.year, Some(i)))
        .chain(stubs.iter().map(|(&id, &year)| (id, year, None)))
        .collect();
    all.sort_unstable_by(|a, b| a.0.cmp(b.0));

    let n = all.len();
    let ids: Vec<PubId> = all.iter().map(|(id, _, _)| (*id).clone()).collect();
    let years: Vec<i32> = all.iter().map(|(_, y, _)| *y).collect();
    let index: HashMap<PubId, u32> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i as u32))
        .collect();
    // record position -> node index
    let mut node_of_record = vec![0u32; records.len()];
    for (ix, (_, _, pos)) in all.iter().enumerate() {
        if let Some(p) = pos {
            node_of_record[*p] = ix as u32;
        }
    }
    drop(all);
    drop(position);

    let mut dangling_refs = vec![0u32; n];
    let mut ref_edges: Vec<(u32, u32)> = Vec::new();
    let mut cit_edges: Vec<(u32, u32, i32)> = Vec::new();
    let mut dangling_seen: Vec<&PubId> = Vec::new();

    for (pos, rec) in records.iter().enumerate() {
        let me = node_of_record[pos];
        dangling_seen.clear();
        for r in &rec.references {
            match index.get(r) {
                Some(&dst) => ref_edges.push((me, dst)),
                None => {
                    if policy == DanglingPolicy::Error {
                        return Err(GraphError::DanglingEdge {
                            src: rec.id.clone(),
                            dst: r.clone(),
                        });
                    }
                    dangling_seen.push(r);
                }
            }
        }
        dangling_seen.sort_unstable();
        let before = dangling_seen.len();
        dangling_seen.dedup();
        report.duplicate_edges_collapsed += before - dangling_seen.len();
        report.dangling_edges_dropped += dangling_seen.len();
        dangling_refs[me as usize] = dangling_seen.len() as u32;

        dangling_seen.clear();
        for c in &rec.citations {
            match index.get(&c.id) {
                Some(&src) => cit_edges.push((src, me, c.year)),
                None => {
                    if policy == DanglingPolicy::Error {
                        return Err(GraphError::DanglingEdge {
                            src: c.id.clone(),
                            dst: rec.id.clone(),
                        });
                    }
                    dangling_seen.push(&c.id);
                }
            }
        }
        dangling_seen.sort_unstable();
        let before = dangling_seen.len();
        dangling_seen.dedup();
        report.duplicate_edges_collapsed += before - dangling_seen.len();
        report.dangling_edges_dropped += dangling_seen.len();
    }

    ref_edges.sort_unstable();
    let before = ref_edges.len();
    ref_edges.dedup();
    report.duplicate_edges_collapsed += before - ref_edges.len();

    cit_edges.sort_unstable();
    let before = cit_edges.len();
    cit_edges.dedup_by_key(|e| (e.0, e.1));
    report.duplicate_edges_collapsed += before - cit_edges.len();

    for &(src, dst, edge_year) in &cit_edges {
        let record_year = years[src as usize];
        if edge_year == record_year {
            continue;
        }
        if policy == DanglingPolicy::Error && ref_edges.binary_search(&(src, dst)).is_ok() {
            return Err(GraphError::InconsistentEdge {
                src: ids[src as usize].clone(),
                dst: ids[dst as usize].clone(),
                edge_year,
                record_year,
            });
        }
        report.year_conflicts += 1;
    }

    let mut edges = ref_edges;
    edges.extend(cit_edges.iter().map(|&(s, d, _)| (s, d)));
    drop(cit_edges);
    edges.sort_unstable();
    edges.dedup();

    let mut ref_offsets = vec![0usize; n + 1];
    let mut citer_offsets = vec![0usize; n + 1];
    for &(s, d) in &edges {
        ref_offsets[s as usize + 1] += 1;
        citer_offsets[d as usize + 1] += 1;
    }
    for i in 0..n {
        ref_offsets[i + 1] += ref_offsets[i];
        citer_offsets[i + 1] += citer_offsets[i];
    }
    let refs: Vec<u32> = edges.iter().map(|&(_, d)| d).collect();

    let mut fill = citer_offsets.clone();
    let mut keyed = vec![(0i32, 0u32); edges.len()];
    for &(s, d) in &edges {
        let slot = &mut fill[d as usize];
        keyed[*slot] = (years[s as usize], s);
        *slot += 1;
    }
    drop(edges);
    for i in 0..n {
        keyed[citer_offsets[i]..citer_offsets[i + 1]].sort_unstable();
    }
    let citer_years: Vec<i32> = keyed.iter().map(|&(y, _)| y).collect();
    let citers: Vec<u32> = keyed.iter().map(|&(_, c)| c).collect();

    let declared_refs: Vec<u32> = match declared_override {
        Some(declared) => {
            let mut out: Vec<u32> = (0..n)
                .map(|i| (ref_offsets[i + 1] - ref_offsets[i]) as u32)
                .collect();
            for (pos, d) in declared.into_iter().enumerate() {
                out[node_of_record[pos] as usize] = d;
            }
            out
        }
        None => (0..n)
            .map(|i| (ref_offsets[i + 1] - ref_offsets[i]) as u32 + dangling_refs[i])
            .collect(),
    };

    if report.dangling_edges_dropped > 0 {
        log::warn!(
            "dropped {} dangling edge(s) while building network",
            report.dangling_edges_dropped
        );
    }
    if report.year_conflicts > 0 {
        log::warn!(
            "{} citation year(s) disagreed with the citer's record; record years used",
            report.year_conflicts
        );
    }

    Ok(CitationNetwork {
        ids,
        index,
        years,
        declared_refs,
        ref_offsets,
        refs,
        citer_offsets,
        citers,
        citer_years,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pid(s: &str) -> PubId {
        PubId::new(s).unwrap()
    }

    fn rec(id: &str, year: i32, refs: &[&str]) -> PublicationRecord {
        PublicationRecord::new(pid(id), year).with_references(refs.iter().map(|r| pid(r)))
    }

    #[test]
    fn empty_id_rejected() {
        assert_eq!(PubId::new(""), Err(GraphError::EmptyId));
        assert!(serde_json::from_str::<PubId>("\"\"").is_err());
    }

    #[test]
    fn single_record_network() {
        let net = CitationNetwork::build(vec![rec("a", 2000, &[])], DanglingPolicy::Drop).unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.edge_count(), 0);
        let a = net.node(&pid("a")).unwrap();
        assert_eq!(net.references(a).len(), 0);
        assert_eq!(net.citers(a).len(), 0);
    }

    #[test]
    fn empty_network() {
        let net = CitationNetwork::build(vec![], DanglingPolicy::Drop).unwrap();
        assert!(net.is_empty());
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = CitationNetwork::build(
            vec![rec("a", 2000, &[]), rec("a", 2001, &[])],
            DanglingPolicy::Drop,
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DuplicateId(pid("a")));
    }

    #[test]
    fn self_citation_rejected() {
        let err =
            CitationNetwork::build(vec![rec("a", 2000, &["a"])], DanglingPolicy::Drop).unwrap_err();
        assert_eq!(err, GraphError::SelfCitation(pid("a")));
        let r = PublicationRecord::new(pid("b"), 2000).with_citations([(pid("b"), 2001)]);
        assert_eq!(
            CitationNetwork::build(vec![r], DanglingPolicy::Drop).unwrap_err(),
            GraphError::SelfCitation(pid("b"))
        );
    }

    #[test]
    fn dangling_policies() {
        let records = || {
            vec![
                rec("a", 2000, &["ghost"]),
                PublicationRecord::new(pid("b"), 1990).with_citations([(pid("stub"), 1995)]),
            ]
        };
        let err = CitationNetwork::build(records(), DanglingPolicy::Error).unwrap_err();
        assert_eq!(
            err,
            GraphError::DanglingEdge {
                src: pid("a"),
                dst: pid("ghost")
            }
        );

        let dropped = CitationNetwork::build(records(), DanglingPolicy::Drop).unwrap();
        assert_eq!(dropped.len(), 2);
        assert_eq!(dropped.edge_count(), 0);
        assert_eq!(dropped.report().dangling_edges_dropped, 2);
        // the dangling reference still counts towards the declared total
        let a = dropped.node(&pid("a")).unwrap();
        assert_eq!(dropped.declared_references(a), 1);

        let mat = CitationNetwork::build(records(), DanglingPolicy::Materialize).unwrap();
        assert_eq!(mat.len(), 3);
        assert_eq!(mat.report().stubs_materialized, 1);
        assert_eq!(mat.year_of(&pid("stub")), Some(1995));
        assert!(mat.edges().contains(&(&pid("stub"), &pid("b"))));
        assert!(!mat.contains(&pid("ghost")));
    }

    #[test]
    fn record_year_wins_over_citation_year() {
        let records = vec![
            rec("a", 2000, &[]),
            PublicationRecord::new(pid("b"), 1990).with_citations([(pid("a"), 2003)]),
        ];
        let net = CitationNetwork::build(records, DanglingPolicy::Drop).unwrap();
        assert_eq!(net.report().year_conflicts, 1);
        assert_eq!(
            net.citations_of(&pid("b")).unwrap(),
            BTreeSet::from([(&pid("a"), 2000)])
        );
    }

    #[test]
    fn inconsistent_year_with_both_directions_is_an_error_when_strict() {
        let records = vec![
            rec("a", 2000, &["b"]),
            PublicationRecord::new(pid("b"), 1990).with_citations([(pid("a"), 2003)]),
        ];
        let err = CitationNetwork::build(records.clone(), DanglingPolicy::Error).unwrap_err();
        assert!(matches!(
            err,
            GraphError::InconsistentEdge {
                edge_year: 2003,
                record_year: 2000,
                ..
            }
        ));
        assert!(CitationNetwork::build(records, DanglingPolicy::Drop).is_ok());
    }

    #[test]
    fn duplicate_edges_collapse() {
        let once = CitationNetwork::build(
            vec![rec("a", 2000, &["b"]), rec("b", 1990, &[])],
            DanglingPolicy::Drop,
        )
        .unwrap();
        let twice = CitationNetwork::build(
            vec![rec("a", 2000, &["b", "b"]), rec("b", 1990, &[])],
            DanglingPolicy::Drop,
        )
        .unwrap();
        assert_eq!(once, twice);
        assert_eq!(twice.report().duplicate_edges_collapsed, 1);
    }

    #[test]
    fn windows_are_inclusive() {
        let records = vec![
            rec("f", 2000, &[]),
            rec("c1", 2000, &["f"]),
            rec("c2", 2001, &["f"]),
            rec("c3", 2003, &["f"]),
            rec("c4", 2004, &["f"]),
        ];
        let net = CitationNetwork::build(records, DanglingPolicy::Drop).unwrap();
        let got = net.citers_in_window(&pid("f"), 2001, 2003).unwrap();
        assert_eq!(got, BTreeSet::from([&pid("c2"), &pid("c3")]));
        assert!(net
            .citers_in_window(&pid("f"), 2003, 2001)
            .unwrap()
            .is_empty());
        assert_eq!(
            net.citers_in_window(&pid("nope"), 0, 1).unwrap_err(),
            GraphError::UnknownId(pid("nope"))
        );
    }

    #[test]
    fn subset_measures_references_before_pruning() {
        let records = vec![
            rec("a", 2000, &["b", "c"]),
            rec("b", 1990, &[]),
            rec("c", 1990, &[]),
        ];
        let net = CitationNetwork::build(records, DanglingPolicy::Drop).unwrap();
        let filter = FilterSpec {
            allowed_ids: Some(HashSet::from([pid("a"), pid("b")])),
            ..FilterSpec::default()
        };
        let sub = net.subset(&filter, DanglingPolicy::Drop).unwrap();
        let a = sub.node(&pid("a")).unwrap();
        assert_eq!(sub.references(a).len(), 1);
        assert_eq!(sub.declared_references(a), 2);

        let filter = FilterSpec {
            min_references: Some(2),
            ..FilterSpec::default()
        };
        let again = sub.subset(&filter, DanglingPolicy::Drop).unwrap();
        assert_eq!(again.ids(), &[pid("a")]);
    }

    #[test]
    fn subset_under_error_policy_reports_cut_edges() {
        let net = CitationNetwork::build(
            vec![rec("a", 2000, &["b"]), rec("b", 1990, &[])],
            DanglingPolicy::Drop,
        )
        .unwrap();
        let filter = FilterSpec {
            year_range: Some((2000, 2000)),
            ..FilterSpec::default()
        };
        assert!(matches!(
            net.subset(&filter, DanglingPolicy::Error),
            Err(GraphError::DanglingEdge { .. })
        ));
    }

    #[test]
    fn invalid_year_range() {
        let filter = FilterSpec {
            year_range: Some((2001, 2000)),
            ..FilterSpec::default()
        };
        let net = CitationNetwork::build(vec![], DanglingPolicy::Drop).unwrap();
        assert!(matches!(
            net.subset(&filter, DanglingPolicy::Drop),
            Err(GraphError::InvalidFilter(_))
        ));
    }
}
