//! File formats.
//!
//! Graphs are read from JSON (`{"n": 3, "edges": [{"i": 0, "j": 1, "w": 1.0}, ...]}`)
//! or from a CSV edge list with header `i,j,w`; the format is sniffed from
//! the first non-blank character. Vertex indices are 0-based. Phase vectors
//! are JSON arrays or a single CSV row.
//!
//! Every CSV written here starts with a `#` comment line naming the library
//! version and the invocation, then a header row. Floats are written with
//! 17 significant digits so reruns diff cleanly.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::certificate::{BoundsRow, ScanGrid};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::graph::{CycleBasis, Edge, WeightedGraph};
use crate::torus::{winding_vector, PhaseState};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<Edge>,
}

fn parse_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e))
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    if text.trim_start().starts_with('{') {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| parse_err("graph JSON", e))?;
        return WeightedGraph::new(file.n, file.edges.iter().map(|e| (e.i, e.j, e.w)));
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| parse_err("graph CSV", e))?.clone();
    if header.iter().collect::<Vec<_>>() != ["i", "j", "w"] {
        return Err(Error::Parse(format!("graph CSV header must be i,j,w, found {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut edges = Vec::new();
    for rec in rdr.deserialize::<Edge>() {
        edges.push(rec.map_err(|e| parse_err("graph CSV", e))?);
    }
    let n = edges.iter().map(|e| e.i.max(e.j) + 1).max().unwrap_or(0);
    WeightedGraph::new(n, edges.iter().map(|e| (e.i, e.j, e.w)))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_graph(&read_text(path.as_ref())?)
}

pub fn graph_to_json(g: &WeightedGraph) -> String {
    serde_json::to_string_pretty(&GraphFile { n: g.n(), edges: g.edges().to_vec() }).expect("graph serializes")
}

pub fn graph_to_csv(g: &WeightedGraph) -> String {
    let mut out = String::from("i,j,w\n");
    for e in g.edges() {
        out.push_str(&format!("{},{},{}\n", e.i, e.j, fmt_f64(e.w)));
    }
    out
}

/// JSON array or one CSV row of reals.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| parse_err("JSON array", e));
    }
    let rows: Vec<&str> = t.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    if rows.len() != 1 {
        return Err(Error::Parse(format!("expected a single CSV row, found {} rows", rows.len())));
    }
    rows[0]
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| parse_err(&format!("number {s:?}"), e)))
        .collect()
}

pub fn read_phase_state(path: impl AsRef<Path>) -> Result<PhaseState> {
    Ok(PhaseState::from(parse_real_list(&read_text(path.as_ref())?)?))
}

/// Vector of length `n` from a command-line spec.
///
/// Accepted forms: `zero`, `e<k>` (unit vector), `splay:<k>` (the
/// `k`-winding splay state), `@path` (file with a JSON array or one CSV
/// row), or an inline comma list.
pub fn parse_vector_spec(spec: &str, n: usize) -> Result<DVector<f64>> {
    let spec = spec.trim();
    let v = if spec == "zero" {
        DVector::zeros(n)
    } else if let Some(k) = spec.strip_prefix("splay:") {
        let k: i64 = k.parse().map_err(|e| parse_err("splay winding", e))?;
        PhaseState::splay(n, k).into_inner()
    } else if let Some(path) = spec.strip_prefix('@') {
        DVector::from_vec(parse_real_list(&read_text(Path::new(path))?)?)
    } else if let Some(k) = spec.strip_prefix('e').and_then(|k| k.parse::<usize>().ok()) {
        if k >= n {
            return Err(Error::Parse(format!("unit vector e{k} needs dimension > {k}, have {n}")));
        }
        DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 })
    } else {
        DVector::from_vec(parse_real_list(spec)?)
    };
    if v.len() != n {
        return Err(Error::Parse(format!("vector {spec:?} has length {}, expected {n}", v.len())));
    }
    Ok(v)
}

/// Integer list such as `1,-1` (empty string for the empty vector).
pub fn parse_int_list(spec: &str) -> Result<Vec<i64>> {
    let spec = spec.trim().trim_start_matches('(').trim_end_matches(')');
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    spec.split(',').map(|s| s.trim().parse::<i64>().map_err(|e| parse_err(&format!("integer {s:?}"), e))).collect()
}

/// 17 significant digits; negative zero prints as zero.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

/// CSV writer that emits the provenance comment and header first.
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut out: W, invocation: &str, header: &[String]) -> Result<Self> {
        writeln!(out, "# ksnet {VERSION} {invocation}")?;
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(header).map_err(csv_io)?;
        Ok(Self { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(csv_io)
    }

    pub fn finish(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Columns `s, t, mu, u_0 .. u_{c-1}, cohesive_flag`.
pub fn write_scan_grid<W: Write>(out: W, invocation: &str, grid: &ScanGrid) -> Result<W> {
    let c = grid.points.first().map_or(0, |p| p.winding.len());
    let mut header: Vec<String> = ["s", "t", "mu"].iter().map(|s| s.to_string()).collect();
    header.extend((0..c).map(|k| format!("u_{k}")));
    header.push("cohesive_flag".into());
    let mut sink = CsvSink::new(out, invocation, &header)?;
    for p in &grid.points {
        let mut row = vec![fmt_f64(p.s), fmt_f64(p.t), fmt_f64(p.mu)];
        row.extend(p.winding.iter().map(|k| k.to_string()));
        row.push(p.cohesive.to_string());
        sink.row(row)?;
    }
    sink.finish()
}

/// Columns `ratio, phi, gamma_bar`.
pub fn write_bounds<W: Write>(out: W, invocation: &str, rows: &[BoundsRow]) -> Result<W> {
    let header: Vec<String> = ["ratio", "phi", "gamma_bar"].iter().map(|s| s.to_string()).collect();
    let mut sink = CsvSink::new(out, invocation, &header)?;
    for r in rows {
        sink.row([fmt_f64(r.ratio), fmt_f64(r.phi), fmt_f64(r.gamma_bar)])?;
    }
    sink.finish()
}

/// Columns `t, x_0 .. x_{n-1}`, then `u_0 .. u_{c-1}` when a basis is given,
/// then one column per named extra series (same length as the trajectory).
pub fn write_trajectory<W: Write>(
    out: W,
    invocation: &str,
    traj: &Trajectory,
    basis: Option<&CycleBasis>,
    extra: &[(&str, Vec<f64>)],
) -> Result<W> {
    let n = traj.states.first().map_or(0, |x| x.len());
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("x_{i}")));
    if let Some(b) = basis {
        header.extend((0..b.len()).map(|k| format!("u_{k}")));
    }
    for (name, series) in extra {
        if series.len() != traj.len() {
            return Err(Error::DimensionMismatch { expected: traj.len(), found: series.len() });
        }
        header.push(name.to_string());
    }
    let mut sink = CsvSink::new(out, invocation, &header)?;
    for (k, (t, x)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = vec![fmt_f64(*t)];
        row.extend(x.iter().map(|v| fmt_f64(*v)));
        if let Some(b) = basis {
            row.extend(winding_vector(b, x)?.iter().map(|k| k.to_string()));
        }
        row.extend(extra.iter().map(|(_, series)| fmt_f64(series[k])));
        sink.row(row)?;
    }
    sink.finish()
}
