//! File formats.
//!
//! | object | CSV | JSON |
//! |---|---|---|
//! | curve | `t,x1,..,xd`, one row per knot | `{"dim", "knots", "samples": [[..], ..]}` |
//! | SRVF | `t_start,t_end,q1,..,qd`, one row per cell | `{"dim", "knots", "cells": [[..], ..]}` |
//! | reparametrisation | `t,gamma` | `{"knots", "values"}` |
//! | alignment | `t,beta,gamma` | `{"matching_value", "quotient_distance", "grid_n", "beta", "gamma", ..}` |
//!
//! Floats are written with 17 significant digits in CSV and in shortest
//! round-trip form in JSON, so every emitted file parses back to the same values.
//! Curves read from files are translated to start at the origin.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::counterexample::CounterexampleReport;
use crate::curve::{SampledCurve, Srvf};
use crate::error::{Result, SrvfError};
use crate::metric::AlignmentResult;
use crate::partition::Partition;
use crate::reparam::Reparametrisation;
use crate::shapespace::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_row(out: &mut String, fields: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for x in fields {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&fmt_f64(x));
    }
    out.push('\n');
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| SrvfError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| SrvfError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| SrvfError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, line: u64, msg: impl Into<String>) -> SrvfError {
    SrvfError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Numeric table with a header row. Line numbers are 1-based and count the header.
struct Table {
    header: Vec<String>,
    rows: Vec<(u64, Vec<f64>)>,
}

fn read_table(text: &str, path: &Path, expected_prefix: &[&str]) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.len() < expected_prefix.len()
        || header.iter().zip(expected_prefix).any(|(h, e)| h != e)
    {
        return Err(parse_err(
            path,
            1,
            format!(
                "header must start with `{}`, found `{}`",
                expected_prefix.join(","),
                header.join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(k, field)| {
                let v: f64 = field.parse().map_err(|_| {
                    parse_err(
                        path,
                        line,
                        format!("column `{}`: not a number: {field:?}", header[k]),
                    )
                })?;
                if !v.is_finite() {
                    return Err(parse_err(
                        path,
                        line,
                        format!("column `{}`: non-finite value {field}", header[k]),
                    ));
                }
                Ok(v)
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, values));
    }
    Ok(Table { header, rows })
}

/// Checks a parameter column: starts at 0, strictly increasing, ends at 1.
fn check_parameter(path: &Path, column: &[(u64, f64)]) -> Result<Partition> {
    let Some(&(first_line, first)) = column.first() else {
        return Err(parse_err(path, 1, "no data rows"));
    };
    if column.len() < 2 {
        return Err(parse_err(path, first_line, "need at least two rows"));
    }
    if first != 0.0 {
        return Err(parse_err(
            path,
            first_line,
            format!("parameter must start at 0, found {first}"),
        ));
    }
    for w in column.windows(2) {
        if w[1].1 <= w[0].1 {
            return Err(parse_err(
                path,
                w[1].0,
                format!(
                    "parameter not strictly increasing: {} after {}",
                    w[1].1, w[0].1
                ),
            ));
        }
    }
    let &(last_line, last) = column.last().unwrap();
    if last != 1.0 {
        return Err(parse_err(
            path,
            last_line,
            format!("parameter must end at 1, found {last}"),
        ));
    }
    Partition::new(column.iter().map(|&(_, t)| t).collect())
        .map_err(|e| parse_err(path, first_line, e.to_string()))
}

fn coordinate_names(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("{prefix}{i}")).collect()
}

fn check_coordinate_header(
    path: &Path,
    header: &[String],
    skip: usize,
    prefix: &str,
) -> Result<usize> {
    let dim = header.len() - skip;
    if dim == 0 {
        return Err(parse_err(path, 1, "no coordinate columns"));
    }
    for (k, (h, e)) in header[skip..]
        .iter()
        .zip(coordinate_names(prefix, dim))
        .enumerate()
    {
        if *h != e {
            return Err(parse_err(
                path,
                1,
                format!("column {}: expected `{e}`, found `{h}`", k + skip + 1),
            ));
        }
    }
    Ok(dim)
}

// ---------- curves ----------

pub fn parse_curve_csv(text: &str, path: &Path) -> Result<SampledCurve> {
    let table = read_table(text, path, &["t"])?;
    let dim = check_coordinate_header(path, &table.header, 1, "x")?;
    let t: Vec<(u64, f64)> = table.rows.iter().map(|(l, r)| (*l, r[0])).collect();
    let knots = check_parameter(path, &t)?;
    let samples = table
        .rows
        .iter()
        .flat_map(|(_, r)| r[1..].iter().copied())
        .collect();
    SampledCurve::anchored(dim, knots, samples)
}

pub fn curve_to_csv(c: &SampledCurve) -> String {
    let mut out = String::from("t,");
    out.push_str(&coordinate_names("x", c.dim()).join(","));
    out.push('\n');
    for (t, x) in c.knots().breakpoints().iter().zip(c.points()) {
        push_row(&mut out, std::iter::once(*t).chain(x.iter().copied()));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    dim: usize,
    knots: Vec<f64>,
    samples: Vec<Vec<f64>>,
}

fn json_err(path: &Path, e: serde_json::Error) -> SrvfError {
    parse_err(path, e.line() as u64, e.to_string())
}

fn json_rows(path: &Path, dim: usize, rows: Vec<Vec<f64>>, what: &str) -> Result<Vec<f64>> {
    let mut flat = Vec::with_capacity(rows.len() * dim);
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != dim {
            return Err(parse_err(
                path,
                0,
                format!(
                    "{what} {i}: expected {dim} coordinates, found {}",
                    row.len()
                ),
            ));
        }
        flat.extend(row);
    }
    Ok(flat)
}

fn json_knots(path: &Path, knots: Vec<f64>) -> Result<Partition> {
    let column: Vec<(u64, f64)> = knots.into_iter().map(|t| (0, t)).collect();
    check_parameter(path, &column)
}

pub fn parse_curve_json(text: &str, path: &Path) -> Result<SampledCurve> {
    let raw: CurveJson = serde_json::from_str(text).map_err(|e| json_err(path, e))?;
    if raw.samples.len() != raw.knots.len() {
        return Err(parse_err(
            path,
            0,
            format!(
                "{} knots but {} samples",
                raw.knots.len(),
                raw.samples.len()
            ),
        ));
    }
    let knots = json_knots(path, raw.knots)?;
    let samples = json_rows(path, raw.dim, raw.samples, "sample")?;
    SampledCurve::anchored(raw.dim, knots, samples)
}

pub fn curve_to_json(c: &SampledCurve) -> String {
    let raw = CurveJson {
        dim: c.dim(),
        knots: c.knots().breakpoints().to_vec(),
        samples: c.points().map(<[f64]>::to_vec).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("curve serialises") + "\n"
}

pub fn parse_curve(text: &str, path: &Path, format: Format) -> Result<SampledCurve> {
    match format {
        Format::Csv => parse_curve_csv(text, path),
        Format::Json => parse_curve_json(text, path),
    }
}

pub fn curve_to_string(c: &SampledCurve, format: Format) -> String {
    match format {
        Format::Csv => curve_to_csv(c),
        Format::Json => curve_to_json(c),
    }
}

pub fn read_curve(path: &Path) -> Result<SampledCurve> {
    parse_curve(&read_to_string(path)?, path, Format::from_path(path))
}

pub fn write_curve(path: &Path, c: &SampledCurve) -> Result<()> {
    write_string(path, &curve_to_string(c, Format::from_path(path)))
}

// ---------- SRVFs ----------

pub fn parse_srvf_csv(text: &str, path: &Path) -> Result<Srvf> {
    let table = read_table(text, path, &["t_start", "t_end"])?;
    let dim = check_coordinate_header(path, &table.header, 2, "q")?;
    let mut column = Vec::with_capacity(table.rows.len() + 1);
    for (k, (line, r)) in table.rows.iter().enumerate() {
        if k == 0 {
            column.push((*line, r[0]));
        } else if r[0] != table.rows[k - 1].1[1] {
            return Err(parse_err(
                path,
                *line,
                format!(
                    "cell starts at {} but the previous cell ends at {}",
                    r[0],
                    table.rows[k - 1].1[1]
                ),
            ));
        }
        column.push((*line, r[1]));
    }
    if column.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    let knots = check_parameter(path, &column)?;
    let cells = table
        .rows
        .iter()
        .flat_map(|(_, r)| r[2..].iter().copied())
        .collect();
    Srvf::new(dim, knots, cells)
}

pub fn srvf_to_csv(q: &Srvf) -> String {
    let mut out = String::from("t_start,t_end,");
    out.push_str(&coordinate_names("q", q.dim()).join(","));
    out.push('\n');
    for (k, v) in q.cell_values().enumerate() {
        let (a, b) = q.knots().cell(k);
        push_row(&mut out, [a, b].into_iter().chain(v.iter().copied()));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SrvfJson {
    dim: usize,
    knots: Vec<f64>,
    cells: Vec<Vec<f64>>,
}

pub fn parse_srvf_json(text: &str, path: &Path) -> Result<Srvf> {
    let raw: SrvfJson = serde_json::from_str(text).map_err(|e| json_err(path, e))?;
    if raw.cells.len() + 1 != raw.knots.len() {
        return Err(parse_err(
            path,
            0,
            format!("{} knots but {} cells", raw.knots.len(), raw.cells.len()),
        ));
    }
    let knots = json_knots(path, raw.knots)?;
    let cells = json_rows(path, raw.dim, raw.cells, "cell")?;
    Srvf::new(raw.dim, knots, cells)
}

pub fn srvf_to_json(q: &Srvf) -> String {
    let raw = SrvfJson {
        dim: q.dim(),
        knots: q.knots().breakpoints().to_vec(),
        cells: q.cell_values().map(<[f64]>::to_vec).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("srvf serialises") + "\n"
}

pub fn parse_srvf(text: &str, path: &Path, format: Format) -> Result<Srvf> {
    match format {
        Format::Csv => parse_srvf_csv(text, path),
        Format::Json => parse_srvf_json(text, path),
    }
}

pub fn srvf_to_string(q: &Srvf, format: Format) -> String {
    match format {
        Format::Csv => srvf_to_csv(q),
        Format::Json => srvf_to_json(q),
    }
}

pub fn read_srvf(path: &Path) -> Result<Srvf> {
    parse_srvf(&read_to_string(path)?, path, Format::from_path(path))
}

pub fn write_srvf(path: &Path, q: &Srvf) -> Result<()> {
    write_string(path, &srvf_to_string(q, Format::from_path(path)))
}

// ---------- reparametrisations ----------

pub fn parse_reparam_csv(text: &str, path: &Path) -> Result<Reparametrisation> {
    let table = read_table(text, path, &["t", "gamma"])?;
    if table.header.len() != 2 {
        return Err(parse_err(path, 1, "expected exactly the columns `t,gamma`"));
    }
    let t: Vec<(u64, f64)> = table.rows.iter().map(|(l, r)| (*l, r[0])).collect();
    let knots = check_parameter(path, &t)?;
    Reparametrisation::new(knots, table.rows.iter().map(|(_, r)| r[1]).collect())
}

pub fn reparam_to_csv(g: &Reparametrisation) -> String {
    let mut out = String::from("t,gamma\n");
    for (t, v) in g.knots().breakpoints().iter().zip(g.values()) {
        push_row(&mut out, [*t, *v]);
    }
    out
}

pub fn parse_reparam_json(text: &str, path: &Path) -> Result<Reparametrisation> {
    serde_json::from_str(text).map_err(|e| json_err(path, e))
}

pub fn reparam_to_json(g: &Reparametrisation) -> String {
    serde_json::to_string_pretty(g).expect("reparametrisation serialises") + "\n"
}

pub fn read_reparam(path: &Path) -> Result<Reparametrisation> {
    let text = read_to_string(path)?;
    match Format::from_path(path) {
        Format::Csv => parse_reparam_csv(&text, path),
        Format::Json => parse_reparam_json(&text, path),
    }
}

// ---------- alignments ----------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentFile {
    pub matching_value: f64,
    pub quotient_distance: f64,
    pub grid_n: usize,
    pub grid_m: usize,
    pub t: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub move_set: Vec<(usize, usize)>,
    pub path: Vec<(usize, usize)>,
    pub dp_cells_evaluated: u64,
}

impl AlignmentFile {
    pub fn from_result(r: &AlignmentResult) -> Self {
        let t = r.beta.knots().merge(r.gamma.knots());
        let ts = t.breakpoints().to_vec();
        Self {
            matching_value: r.matching_value,
            quotient_distance: r.quotient_distance,
            grid_n: r.grid_n,
            grid_m: r.grid_m,
            beta: ts.iter().map(|&s| r.beta.eval(s)).collect(),
            gamma: ts.iter().map(|&s| r.gamma.eval(s)).collect(),
            t: ts,
            move_set: r.move_set.clone(),
            path: r.path.clone(),
            dp_cells_evaluated: r.dp_cells_evaluated,
        }
    }

    pub fn reparametrisations(&self) -> Result<(Reparametrisation, Reparametrisation)> {
        let knots = Partition::new(self.t.clone())?;
        Ok((
            Reparametrisation::new(knots.clone(), self.beta.clone())?,
            Reparametrisation::new(knots, self.gamma.clone())?,
        ))
    }
}

pub fn alignment_to_json(r: &AlignmentResult) -> String {
    serde_json::to_string_pretty(&AlignmentFile::from_result(r)).expect("alignment serialises")
        + "\n"
}

pub fn parse_alignment_json(text: &str, path: &Path) -> Result<AlignmentFile> {
    serde_json::from_str(text).map_err(|e| json_err(path, e))
}

pub fn alignment_to_csv(r: &AlignmentResult) -> String {
    let a = AlignmentFile::from_result(r);
    let mut out = String::from("t,beta,gamma\n");
    for k in 0..a.t.len() {
        push_row(&mut out, [a.t[k], a.beta[k], a.gamma[k]]);
    }
    out
}

/// Reads `t,beta,gamma` back into the pair.
pub fn parse_alignment_csv(
    text: &str,
    path: &Path,
) -> Result<(Reparametrisation, Reparametrisation)> {
    let table = read_table(text, path, &["t", "beta", "gamma"])?;
    let t: Vec<(u64, f64)> = table.rows.iter().map(|(l, r)| (*l, r[0])).collect();
    let knots = check_parameter(path, &t)?;
    Ok((
        Reparametrisation::new(
            knots.clone(),
            table.rows.iter().map(|(_, r)| r[1]).collect(),
        )?,
        Reparametrisation::new(knots, table.rows.iter().map(|(_, r)| r[2]).collect())?,
    ))
}

// ---------- shape corpora and matrices ----------

/// One corpus entry: either a curve file (relative to the corpus file) or inline
/// samples, with optional knots (uniform when absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<f64>>,
}

impl CorpusEntry {
    /// Resolves the entry to a curve; `base` is the directory of the corpus file.
    pub fn load(&self, base: &Path, corpus_path: &Path) -> Result<SampledCurve> {
        match (&self.file, &self.samples) {
            (Some(f), None) => {
                if self.knots.is_some() {
                    return Err(self.err(corpus_path, "`knots` only applies to inline samples"));
                }
                read_curve(&base.join(f))
            }
            (None, Some(samples)) => {
                let Some(dim) = samples.first().map(Vec::len) else {
                    return Err(self.err(corpus_path, "no samples"));
                };
                if dim == 0 {
                    return Err(self.err(corpus_path, "samples have no coordinates"));
                }
                let knots = match &self.knots {
                    Some(k) => {
                        if k.len() != samples.len() {
                            return Err(self.err(corpus_path, "knots and samples differ in length"));
                        }
                        json_knots(corpus_path, k.clone())?
                    }
                    None if samples.len() >= 2 => Partition::uniform(samples.len() - 1),
                    None => return Err(self.err(corpus_path, "need at least two samples")),
                };
                let flat = json_rows(corpus_path, dim, samples.clone(), "sample")?;
                SampledCurve::anchored(dim, knots, flat)
            }
            _ => Err(self.err(
                corpus_path,
                "exactly one of `file` and `samples` is required",
            )),
        }
    }

    fn err(&self, path: &Path, msg: &str) -> SrvfError {
        parse_err(path, 0, format!("entry {:?}: {msg}", self.id))
    }
}

pub fn parse_corpus(text: &str, path: &Path) -> Result<Vec<CorpusEntry>> {
    serde_json::from_str(text).map_err(|e| json_err(path, e))
}

/// Reads a corpus and loads every entry; failures are returned per entry.
pub fn read_corpus(path: &Path) -> Result<Vec<(String, Result<SampledCurve>)>> {
    let entries = parse_corpus(&read_to_string(path)?, path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    Ok(entries
        .iter()
        .map(|e| (e.id.clone(), e.load(base, path)))
        .collect())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn matrix_to_csv(m: &DistanceMatrix) -> String {
    let mut out = String::from("id");
    for id in &m.ids {
        out.push(',');
        out.push_str(&csv_field(id));
    }
    out.push('\n');
    for (i, id) in m.ids.iter().enumerate() {
        out.push_str(&csv_field(id));
        for j in 0..m.len() {
            out.push(',');
            out.push_str(&fmt_f64(m.get(i, j)));
        }
        out.push('\n');
    }
    out
}

/// Ids and row-major values of a matrix CSV.
pub fn parse_matrix_csv(text: &str, path: &Path) -> Result<(Vec<String>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    if header.get(0) != Some("id") {
        return Err(parse_err(path, 1, "first column must be `id`"));
    }
    let ids: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut values = Vec::with_capacity(ids.len() * ids.len());
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| parse_err(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.get(0) != ids.get(i).map(String::as_str) {
            return Err(parse_err(path, line, "row id does not match the header"));
        }
        for field in record.iter().skip(1) {
            values.push(
                field
                    .parse()
                    .map_err(|_| parse_err(path, line, format!("not a number: {field:?}")))?,
            );
        }
    }
    if values.len() != ids.len() * ids.len() {
        return Err(parse_err(path, 0, "matrix is not square"));
    }
    Ok((ids, values))
}

// ---------- counterexample report ----------

pub const REPORT_CSV_HEADER: &str = "N,k_prime,dp_value,explicit_value,gap_to_half,qdist_sq";

pub fn report_to_csv(r: &CounterexampleReport) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.n,
            row.k_prime,
            fmt_f64(row.dp_value),
            fmt_f64(row.explicit_value),
            fmt_f64(row.gap_to_half),
            fmt_f64(row.qdist_sq)
        );
    }
    out
}

/// Plot data: gap to ½ against resolution, one block for the explicit sequence
/// (`k'`, resolution `2^{k'}`) and one for DP (`N`).
pub fn report_gap_csv(r: &CounterexampleReport) -> String {
    let mut out = String::from("series,resolution,value,gap_to_half,qdist_sq,gap_to_one\n");
    for e in &r.explicit {
        let q = 2.0 - 2.0 * e.functional_value;
        let _ = writeln!(
            out,
            "explicit,{},{},{},{},{}",
            1u64 << e.k_prime,
            fmt_f64(e.functional_value),
            fmt_f64(e.gap_to_half),
            fmt_f64(q),
            fmt_f64(q - 1.0)
        );
    }
    for d in &r.dp {
        let _ = writeln!(
            out,
            "dp,{},{},{},{},{}",
            d.n,
            fmt_f64(d.dp_value),
            fmt_f64(0.5 - d.dp_value),
            fmt_f64(d.qdist_sq),
            fmt_f64(d.qdist_sq - 1.0)
        );
    }
    out
}

pub fn report_to_json(r: &CounterexampleReport) -> String {
    serde_json::to_string_pretty(r).expect("report serialises") + "\n"
}
