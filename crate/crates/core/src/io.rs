//! File formats.
//!
//! **Nested** (JSON lines, one publication per line):
//!
//! ```text
//! {"id": "pub.1", "year": 2000, "reference_ids": ["pub.0"], "citations": [{"id": "pub.2", "year": 2001}]}
//! ```
//!
//! `reference_ids` and `citations` may be omitted or empty; `year` may be
//! `null` or missing, which is handled by [`LoadOptions::lenient_years`].
//!
//! **Edge list** (two CSV files with mandatory headers):
//!
//! - nodes: `id,year`
//! - edges: `citing_id,cited_id`
//!
//! **Results** (CSV or JSON lines), rows sorted by `focal_id` then `t`:
//!
//! `focal_id,t,cd,n,k,n_disruptive,n_neutral,n_consolidating`
//!
//! `cd` has six decimals and is empty (CSV) or `null` (JSON) when undefined.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cd::CdResult;
use crate::graph::{
    Citation, CitationNetwork, DanglingPolicy, GraphError, PubId, PublicationRecord,
};

pub const NODE_HEADER: [&str; 2] = ["id", "year"];
pub const EDGE_HEADER: [&str; 2] = ["citing_id", "cited_id"];
pub const RESULT_HEADER: [&str; 8] = [
    "focal_id",
    "t",
    "cd",
    "n",
    "k",
    "n_disruptive",
    "n_neutral",
    "n_consolidating",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}:{line}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl IngestError {
    fn parse(path: &Path, line: u64, reason: impl Into<String>) -> Self {
        IngestError::Parse {
            path: path.to_path_buf(),
            line,
            reason: reason.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputSource {
    Nested(PathBuf),
    EdgeList { nodes: PathBuf, edges: PathBuf },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    pub dangling: DanglingPolicy,
    /// Skip (and count) records without a year instead of failing.
    pub lenient_years: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub records_read: usize,
    pub records_skipped_missing_year: usize,
    pub duplicate_edges_collapsed: usize,
    pub dangling_edges_dropped: usize,
    pub stubs_materialized: usize,
    pub year_conflicts: usize,
}

pub fn load(
    source: &InputSource,
    options: LoadOptions,
) -> Result<(CitationNetwork, IngestReport), IngestError> {
    let mut report = IngestReport::default();
    let records = match source {
        InputSource::Nested(path) => read_nested(path, options, &mut report)?,
        InputSource::EdgeList { nodes, edges } => {
            read_edge_list(nodes, edges, options, &mut report)?
        }
    };
    let network = CitationNetwork::build(records, options.dangling)?;
    let built = network.report();
    report.duplicate_edges_collapsed += built.duplicate_edges_collapsed;
    report.dangling_edges_dropped += built.dangling_edges_dropped;
    report.stubs_materialized = built.stubs_materialized;
    report.year_conflicts = built.year_conflicts;
    Ok((network, report))
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| IngestError::io(path, e))
}

#[derive(Deserialize)]
struct NestedRow {
    id: String,
    #[serde(default)]
    year: Option<i32>,
    #[serde(default)]
    reference_ids: Vec<String>,
    #[serde(default)]
    citations: Vec<NestedCitation>,
}

#[derive(Deserialize)]
struct NestedCitation {
    id: String,
    year: i32,
}

fn read_nested(
    path: &Path,
    options: LoadOptions,
    report: &mut IngestReport,
) -> Result<Vec<PublicationRecord>, IngestError> {
    let mut records = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| IngestError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: NestedRow = serde_json::from_str(&line)
            .map_err(|e| IngestError::parse(path, line_no, e.to_string()))?;
        let id =
            |s: String| PubId::new(s).map_err(|e| IngestError::parse(path, line_no, e.to_string()));
        report.records_read += 1;
        let Some(year) = row.year else {
            if options.lenient_years {
                report.records_skipped_missing_year += 1;
                continue;
            }
            return Err(IngestError::parse(
                path,
                line_no,
                format!("record {} has no year", row.id),
            ));
        };
        records.push(PublicationRecord {
            id: id(row.id)?,
            year,
            references: row
                .reference_ids
                .into_iter()
                .map(id)
                .collect::<Result<_, _>>()?,
            citations: row
                .citations
                .into_iter()
                .map(|c| {
                    Ok(Citation {
                        id: id(c.id)?,
                        year: c.year,
                    })
                })
                .collect::<Result<_, IngestError>>()?,
        });
    }
    Ok(records)
}

fn csv_reader<R: Read>(
    reader: R,
    path: &Path,
    expected: &[&str],
) -> Result<csv::Reader<R>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::parse(path, 1, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(IngestError::parse(
            path,
            1,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(rdr)
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn read_edge_list(
    nodes_path: &Path,
    edges_path: &Path,
    options: LoadOptions,
    report: &mut IngestReport,
) -> Result<Vec<PublicationRecord>, IngestError> {
    use std::collections::HashMap;

    let mut records = Vec::new();
    let mut position: HashMap<PubId, usize> = HashMap::new();
    let mut skipped: std::collections::HashSet<PubId> = Default::default();

    let mut rdr = csv_reader(open(nodes_path)?, nodes_path, &NODE_HEADER)?;
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IngestError::parse(nodes_path, line, e.to_string())
        })?;
        let line = record_line(&row);
        let id =
            PubId::new(&row[0]).map_err(|e| IngestError::parse(nodes_path, line, e.to_string()))?;
        report.records_read += 1;
        if row[1].is_empty() {
            if options.lenient_years {
                report.records_skipped_missing_year += 1;
                skipped.insert(id);
                continue;
            }
            return Err(IngestError::parse(
                nodes_path,
                line,
                format!("record {id} has no year"),
            ));
        }
        let year: i32 = row[1].parse().map_err(|e| {
            IngestError::parse(nodes_path, line, format!("bad year `{}`: {e}", &row[1]))
        })?;
        if position.contains_key(&id) {
            return Err(GraphError::DuplicateId(id).into());
        }
        position.insert(id.clone(), records.len());
        records.push(PublicationRecord::new(id, year));
    }

    let mut rdr = csv_reader(open(edges_path)?, edges_path, &EDGE_HEADER)?;
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IngestError::parse(edges_path, line, e.to_string())
        })?;
        let line = record_line(&row);
        let citing =
            PubId::new(&row[0]).map_err(|e| IngestError::parse(edges_path, line, e.to_string()))?;
        let cited =
            PubId::new(&row[1]).map_err(|e| IngestError::parse(edges_path, line, e.to_string()))?;
        match position.get(&citing) {
            Some(&p) => records[p].references.push(cited),
            // No citing record means no year, so the edge cannot be kept.
            None => {
                if options.dangling == DanglingPolicy::Error && !skipped.contains(&citing) {
                    return Err(GraphError::DanglingEdge {
                        src: citing,
                        dst: cited,
                    }
                    .into());
                }
                report.dangling_edges_dropped += 1;
            }
        }
    }
    Ok(records)
}

/// Writes a network in the nested format, one line per publication in id
/// order, carrying both edge directions.
pub fn write_nested<W: Write>(writer: W, network: &CitationNetwork) -> std::io::Result<()> {
    write_nested_records(writer, &network.to_records())
}

pub fn write_nested_records<W: Write>(
    writer: W,
    records: &[PublicationRecord],
) -> std::io::Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        id: &'a PubId,
        year: i32,
        reference_ids: &'a [PubId],
        citations: &'a [Citation],
    }
    let mut out = BufWriter::new(writer);
    for rec in records {
        let row = Row {
            id: &rec.id,
            year: rec.year,
            reference_ids: &rec.references,
            citations: &rec.citations,
        };
        serde_json::to_writer(&mut out, &row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Writes nodes and edges files for the given records (references direction
/// only).
pub fn write_edge_list<N: Write, E: Write>(
    nodes: N,
    edges: E,
    records: &[PublicationRecord],
) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(nodes);
    out.write_record(NODE_HEADER)?;
    for rec in records {
        out.write_record([rec.id.as_str(), &rec.year.to_string()])?;
    }
    out.flush()?;
    let mut out = csv::Writer::from_writer(edges);
    out.write_record(EDGE_HEADER)?;
    for rec in records {
        for r in &rec.references {
            out.write_record([rec.id.as_str(), r.as_str()])?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultFormat {
    #[default]
    Csv,
    Jsonl,
}

/// A serialized result row. `cd` is the value as written (six decimals).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub focal_id: PubId,
    pub t: u32,
    pub cd: Option<f64>,
    pub n: u64,
    pub k: u64,
    pub n_disruptive: u64,
    pub n_neutral: u64,
    pub n_consolidating: u64,
}

/// Rounds to the six decimals used on disk.
pub fn round_cd(cd: f64) -> f64 {
    format!("{cd:.6}").parse().expect("formatted float parses")
}

impl From<&CdResult> for ResultRow {
    fn from(r: &CdResult) -> Self {
        ResultRow {
            focal_id: r.focal.clone(),
            t: r.t,
            cd: r.cd.map(round_cd),
            n: r.n,
            k: r.k,
            n_disruptive: r.n_disruptive,
            n_neutral: r.n_neutral,
            n_consolidating: r.n_consolidating,
        }
    }
}

impl ResultRow {
    /// Rebuilds the exact result from the stored counts.
    pub fn to_result(&self) -> CdResult {
        CdResult::from_counts(
            self.focal_id.clone(),
            self.t,
            self.k,
            self.n_disruptive,
            self.n_neutral,
            self.n_consolidating,
        )
    }
}

/// Writes results sorted by `(focal_id, t)` and returns the row count.
pub fn write_results<W: Write>(
    writer: W,
    results: impl IntoIterator<Item = CdResult>,
    format: ResultFormat,
) -> std::io::Result<usize> {
    let mut rows: Vec<ResultRow> = results.into_iter().map(|r| ResultRow::from(&r)).collect();
    rows.sort_by(|a, b| a.focal_id.cmp(&b.focal_id).then(a.t.cmp(&b.t)));
    let mut out = BufWriter::new(writer);
    match format {
        ResultFormat::Csv => {
            writeln!(out, "{}", RESULT_HEADER.join(","))?;
            let mut csv_out = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut out);
            for r in &rows {
                csv_out
                    .write_record([
                        r.focal_id.as_str(),
                        &r.t.to_string(),
                        &r.cd.map_or(String::new(), |cd| format!("{cd:.6}")),
                        &r.n.to_string(),
                        &r.k.to_string(),
                        &r.n_disruptive.to_string(),
                        &r.n_neutral.to_string(),
                        &r.n_consolidating.to_string(),
                    ])
                    .map_err(std::io::Error::other)?;
            }
            csv_out.flush()?;
        }
        ResultFormat::Jsonl => {
            for r in &rows {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
        }
    }
    out.flush()?;
    Ok(rows.len())
}

pub fn write_results_file(
    path: &Path,
    results: impl IntoIterator<Item = CdResult>,
    format: ResultFormat,
) -> Result<usize, IngestError> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_results(file, results, format).map_err(|e| IngestError::io(path, e))
}

pub fn read_results<R: Read>(
    reader: R,
    format: ResultFormat,
    path: &Path,
) -> Result<Vec<ResultRow>, IngestError> {
    let mut rows = Vec::new();
    match format {
        ResultFormat::Csv => {
            let mut rdr = csv_reader(reader, path, &RESULT_HEADER)?;
            for row in rdr.records() {
                let row = row.map_err(|e| {
                    let line = e.position().map_or(0, |p| p.line());
                    IngestError::parse(path, line, e.to_string())
                })?;
                let line = record_line(&row);
                let bad = |field: &str, e: &dyn std::fmt::Display| {
                    IngestError::parse(path, line, format!("bad {field}: {e}"))
                };
                let int = |i: usize| -> Result<u64, IngestError> {
                    row[i].parse().map_err(|e| bad(RESULT_HEADER[i], &e))
                };
                rows.push(ResultRow {
                    focal_id: PubId::new(&row[0]).map_err(|e| bad("focal_id", &e))?,
                    t: row[1].parse().map_err(|e| bad("t", &e))?,
                    cd: if row[2].is_empty() {
                        None
                    } else {
                        Some(row[2].parse().map_err(|e| bad("cd", &e))?)
                    },
                    n: int(3)?,
                    k: int(4)?,
                    n_disruptive: int(5)?,
                    n_neutral: int(6)?,
                    n_consolidating: int(7)?,
                });
            }
        }
        ResultFormat::Jsonl => {
            for (i, line) in BufReader::new(reader).lines().enumerate() {
                let line = line.map_err(|e| IngestError::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                rows.push(
                    serde_json::from_str(&line)
                        .map_err(|e| IngestError::parse(path, i as u64 + 1, e.to_string()))?,
                );
            }
        }
    }
    Ok(rows)
}

pub fn read_results_file(path: &Path, format: ResultFormat) -> Result<Vec<ResultRow>, IngestError> {
    read_results(open(path)?, format, path)
}
