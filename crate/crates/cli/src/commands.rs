use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use cdindex::analytics::{self, DisruptionLabel, Truth};
use cdindex::batch::{compute_all_with_progress, Progress};
use cdindex::io::{self as cdio, IngestReport, ResultFormat, ResultRow};
use cdindex::synth::{self, SynthSpec};
use cdindex::{
    cd_original, Algorithm, BatchReport, BatchSpec, CdParams, CdResult, CitationNetwork,
    FilterSpec, PubId,
};
use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::config::Config;
use crate::failure::Failure;

/// Tolerance when comparing a recomputed value with a stored one.
const VERIFY_TOLERANCE: f64 = 1e-12;

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(path, e))
}

/// A file when given, otherwise standard output.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_network(network: &NetworkArgs, config: &Config) -> Result<CitationNetwork, Failure> {
    let source = network.source()?;
    let (net, report) = cdio::load(&source, network.options(config))?;
    log_ingest(&report, &net);
    Ok(net)
}

fn log_ingest(r: &IngestReport, net: &CitationNetwork) {
    info!(
        "loaded {} publications, {} edges ({} records read, {} skipped without year, \
         {} duplicate edges collapsed, {} dangling dropped, {} stubs, {} year conflicts)",
        net.len(),
        net.edge_count(),
        r.records_read,
        r.records_skipped_missing_year,
        r.duplicate_edges_collapsed,
        r.dangling_edges_dropped,
        r.stubs_materialized,
        r.year_conflicts
    );
}

fn log_batch(label: &str, r: &BatchReport) {
    info!(
        "{label}: {} focals, {} defined, {} undefined, {} emitted in {:.2?} ({:.0}/s)",
        r.total_focals,
        r.defined,
        r.undefined,
        r.emitted,
        r.wall_time,
        r.throughput()
    );
}

fn read_rows(input: &ResultsInput) -> Result<Vec<ResultRow>, Failure> {
    Ok(cdio::read_results_file(&input.results, input.format())?)
}

/// Results as written: analytics run on the stored (rounded) value.
fn as_written(rows: &[ResultRow]) -> Vec<CdResult> {
    rows.iter()
        .map(|row| CdResult {
            cd: row.cd,
            ..row.to_result()
        })
        .collect()
}

pub fn compute(args: &ComputeArgs, config: &Config) -> Result<(), Failure> {
    let params = impact_span(args.t, config)?;
    let parallelism = parallelism(args.parallelism, config)?;
    let choice = args
        .algorithm
        .or(config.algorithm)
        .unwrap_or(AlgorithmChoice::Decomposed);
    let format: ResultFormat = args
        .output_format
        .or(config.output_format)
        .unwrap_or(OutputFormat::Csv)
        .into();
    let filter = FilterSpec {
        min_references: args.min_refs.or(config.min_refs),
        ..FilterSpec::default()
    };
    args.network.source()?;

    let net = load_network(&args.network, config)?;
    let spec = BatchSpec {
        params,
        filter,
        emit_undefined: args.emit_undefined || config.emit_undefined.unwrap_or(false),
        parallelism,
        algorithm: Algorithm::Decomposed,
        progress_interval: 1_000_000,
    };
    let run = |algorithm: Algorithm| -> Result<Vec<CdResult>, Failure> {
        let spec = BatchSpec {
            algorithm,
            ..spec.clone()
        };
        let mut out = Vec::new();
        let mut progress = |p: &Progress| {
            info!("{}/{} focals after {:.1?}", p.done, p.total, p.elapsed);
        };
        let report = compute_all_with_progress(&net, &spec, &mut out, &mut progress)
            .map_err(|e| Failure::Parse(e.into()))?;
        log_batch(&format!("{algorithm:?}").to_lowercase(), &report);
        Ok(out)
    };

    let results = match choice {
        AlgorithmChoice::Original => run(Algorithm::Original)?,
        AlgorithmChoice::Decomposed => run(Algorithm::Decomposed)?,
        AlgorithmChoice::Both => {
            let decomposed = run(Algorithm::Decomposed)?;
            let original = run(Algorithm::Original)?;
            let diffs = diff_results(&decomposed, &original);
            if !diffs.is_empty() {
                for d in diffs.iter().take(20) {
                    warn!("{d}");
                }
                return Err(Failure::Mismatch(format!(
                    "original and decomposed disagree on {} publications",
                    diffs.len()
                )));
            }
            info!(
                "original and decomposed agree on all {} rows",
                decomposed.len()
            );
            decomposed
        }
    };

    let mut out = output(args.output.as_deref())?;
    let written = cdio::write_results(&mut out, results, format)?;
    out.flush()?;
    info!("wrote {written} rows");
    Ok(())
}

fn diff_results(a: &[CdResult], b: &[CdResult]) -> Vec<String> {
    let by_id: HashMap<&PubId, &CdResult> = b.iter().map(|r| (&r.focal, r)).collect();
    let mut diffs = Vec::new();
    for r in a {
        match by_id.get(&r.focal) {
            Some(other) if *other == r => {}
            Some(other) => diffs.push(format!("{}: {r:?} vs {other:?}", r.focal)),
            None => diffs.push(format!("{}: missing from original", r.focal)),
        }
    }
    if a.len() != b.len() {
        diffs.push(format!("row counts differ: {} vs {}", a.len(), b.len()));
    }
    diffs
}

pub fn stats(args: &StatsArgs, config: &Config) -> Result<(), Failure> {
    let width = args
        .bin_width
        .or(config.bin_width)
        .unwrap_or(analytics::DEFAULT_BIN_WIDTH);
    if !(width > 0.0 && width.is_finite()) {
        return Err(Failure::invalid(format!(
            "--bin-width must be positive, got {width}"
        )));
    }
    let results = as_written(&read_rows(&args.input)?);
    let s = analytics::summarize(&results)?;
    let hist = analytics::histogram(&results, width)?;

    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "count,mean,std,min,q25,q50,q75,q95,q99,max")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        s.count, s.mean, s.std, s.min, s.q25, s.q50, s.q75, s.q95, s.q99, s.max
    )?;
    out.flush()?;

    if let Some(path) = &args.histogram {
        analytics::write_histogram_csv(create(path)?, &[(args.label.as_str(), &hist)])?;
        info!(
            "wrote {} histogram bins to {}",
            hist.bins.len(),
            path.display()
        );
    }
    Ok(())
}

pub fn trend(args: &TrendArgs, config: &Config) -> Result<(), Failure> {
    args.network.source()?;
    let results = as_written(&read_rows(&args.input)?);
    let net = load_network(&args.network, config)?;
    let points = analytics::yearly_trend(&results, &net)?;
    analytics::write_trend_csv(output(args.output.as_deref())?, &points)?;
    Ok(())
}

pub fn classify(args: &ClassifyArgs, config: &Config) -> Result<(), Failure> {
    let fraction = top_fraction(args.top_fraction, config)?;
    let results = as_written(&read_rows(&args.input)?);
    let labels = analytics::classify(&results, fraction)?;
    let mut out = output(args.output.as_deref())?;
    writeln!(out, "id,label")?;
    let mut csv_out = csv_writer(&mut out);
    for (id, label) in &labels {
        csv_out.write_record([id.as_str(), label.as_str()])?;
    }
    csv_out.flush()?;
    drop(csv_out);
    out.flush()?;
    for label in DisruptionLabel::ALL {
        let n = labels.values().filter(|&&l| l == label).count();
        info!("{}: {n}", label.as_str());
    }
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

pub fn compare(args: &CompareArgs, config: &Config) -> Result<(), Failure> {
    let fraction = top_fraction(args.top_fraction, config)?;
    let truth = match args.truth {
        TruthChoice::A => Truth::A,
        TruthChoice::B => Truth::B,
    };
    let labels = |path: &Path| -> Result<BTreeMap<PubId, DisruptionLabel>, Failure> {
        let format = args.results_format.unwrap_or_else(|| guess_format(path));
        let rows = cdio::read_results_file(path, format.into())?;
        Ok(analytics::classify(&as_written(&rows), fraction)?)
    };
    let a = labels(&args.a)?;
    let b = labels(&args.b)?;
    let cmp = analytics::compare_labels_with(&a, &b, truth)?;
    info!(
        "{} publications in both files ({} only in a, {} only in b)",
        cmp.total(),
        a.len() as u64 - cmp.total(),
        b.len() as u64 - cmp.total()
    );

    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "label,precision,recall,f1,support")?;
    for m in &cmp.metrics {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{}",
            m.label.as_str(),
            m.precision,
            m.recall,
            m.f1,
            m.support
        )?;
        if m.zero_division {
            warn!("{}: zero denominator reported as 0", m.label.as_str());
        }
    }
    out.flush()?;

    if let Some(path) = &args.matrix {
        let mut w = create(path)?;
        writeln!(w, "a_label,b_label,count")?;
        for (i, la) in DisruptionLabel::ALL.iter().enumerate() {
            for (j, lb) in DisruptionLabel::ALL.iter().enumerate() {
                writeln!(w, "{},{},{}", la.as_str(), lb.as_str(), cmp.matrix[i][j])?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

pub fn synth(args: &SynthArgs, config: &Config) -> Result<(), Failure> {
    let spec = SynthSpec {
        nodes: args.nodes,
        edges: args.edges,
        year_min: args.year_min,
        year_max: args.year_max,
        seed: args.seed.or(config.seed).unwrap_or(1),
        acausal_fraction: args.acausal_fraction,
    };
    if spec.year_min > spec.year_max {
        return Err(Failure::invalid(format!(
            "--year-min {} is after --year-max {}",
            spec.year_min, spec.year_max
        )));
    }
    if !(0.0..=1.0).contains(&spec.acausal_fraction) {
        return Err(Failure::invalid(format!(
            "--acausal-fraction must lie in [0, 1], got {}",
            spec.acausal_fraction
        )));
    }
    let records = synth::generate(&spec).map_err(|e| Failure::invalid(e.to_string()))?;
    match args.format {
        InputFormat::Nested => {
            let mut w = create(&args.out)?;
            cdio::write_nested_records(&mut w, &records)?;
            w.flush()?;
        }
        InputFormat::EdgeList => {
            fs::create_dir_all(&args.out).map_err(|e| Failure::io(&args.out, e))?;
            let nodes = args.out.join("nodes.csv");
            let edges = args.out.join("edges.csv");
            let (mut n, mut e) = (create(&nodes)?, create(&edges)?);
            cdio::write_edge_list(&mut n, &mut e, &records)?;
            n.flush()?;
            e.flush()?;
        }
    }
    info!(
        "wrote {} publications and {} edges (seed {}) to {}",
        spec.nodes,
        spec.edges,
        spec.seed,
        args.out.display()
    );
    Ok(())
}

pub fn verify(args: &VerifyArgs, config: &Config) -> Result<(), Failure> {
    args.network.source()?;
    let sample = args.sample.or(config.sample);
    if sample == Some(0) {
        return Err(Failure::invalid("--sample must be at least 1"));
    }
    let seed = args.seed.or(config.seed).unwrap_or(1);
    let mut rows = read_rows(&args.input)?;
    let net = load_network(&args.network, config)?;

    if let Some(k) = sample {
        if k < rows.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rows = rows.choose_multiple(&mut rng, k).cloned().collect();
            rows.sort_by(|a, b| a.focal_id.cmp(&b.focal_id).then(a.t.cmp(&b.t)));
        }
    }

    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "focal_id,t,expected_cd,found_cd,detail")?;
    let mut discrepancies = 0usize;
    for row in &rows {
        if let Some((expected, detail)) = check_row(&net, row) {
            discrepancies += 1;
            let fmt = |cd: Option<f64>| cd.map_or(String::new(), |v| format!("{v:.6}"));
            let mut w = csv_writer(&mut out);
            w.write_record([
                row.focal_id.as_str(),
                &row.t.to_string(),
                &fmt(expected),
                &fmt(row.cd),
                &detail,
            ])?;
            w.flush()?;
        }
    }
    out.flush()?;
    info!("checked {} rows, {discrepancies} discrepancies", rows.len());
    if discrepancies > 0 {
        return Err(Failure::Mismatch(format!(
            "{discrepancies} of {} checked rows differ",
            rows.len()
        )));
    }
    Ok(())
}

/// `None` when the row matches a fresh computation, otherwise the recomputed
/// value and what differed.
fn check_row(net: &CitationNetwork, row: &ResultRow) -> Option<(Option<f64>, String)> {
    let params = match CdParams::new(row.t) {
        Ok(p) => p,
        Err(e) => return Some((None, e.to_string())),
    };
    let fresh = match cd_original(net, &row.focal_id, params) {
        Ok(r) => r,
        Err(e) => return Some((None, e.to_string())),
    };
    let expected = fresh.cd.map(cdio::round_cd);
    let cd_ok = match (expected, row.cd) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= VERIFY_TOLERANCE,
        _ => false,
    };
    let mut problems = Vec::new();
    if !cd_ok {
        problems.push("cd".to_string());
    }
    let counts = [
        ("n", fresh.n, row.n),
        ("k", fresh.k, row.k),
        ("n_disruptive", fresh.n_disruptive, row.n_disruptive),
        ("n_neutral", fresh.n_neutral, row.n_neutral),
        (
            "n_consolidating",
            fresh.n_consolidating,
            row.n_consolidating,
        ),
    ];
    for (name, want, got) in counts {
        if want != got {
            problems.push(format!("{name} {got} != {want}"));
        }
    }
    if problems.is_empty() {
        None
    } else {
        Some((expected, problems.join("; ")))
    }
}
