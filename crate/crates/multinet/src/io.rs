// SPDX-License-Identifier: Apache-2.0

//! Readers and writers for the on-disk formats.
//!
//! | file            | layout                                                  |
//! |-----------------|---------------------------------------------------------|
//! | edge list       | CSV, header `src,dst,weight` (or `count`)                |
//! | board members   | CSV, header `company,director`                           |
//! | prices          | CSV, header `date,<ticker>,…`, ISO dates, empty = missing |
//! | roster / labels | one label per line                                      |
//! | tensor          | first line `I J K`, then `i j k value` per nonzero       |
//! | model           | JSON, see [`ModelDocument`]                              |
//!
//! Line numbers in parse errors are 1-based and count the header.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use multinet_core::decomp::{CpModel, CpOptions};
use multinet_core::pipeline::{PriceTable, WeightedEdge};
use multinet_core::{Matrix, Tensor3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file))
}

fn headers(path: &Path, rdr: &mut csv::Reader<fs::File>) -> Result<Vec<String>> {
    let h = rdr.headers().map_err(|e| CliError::parse(path, 1, e.to_string()))?;
    Ok(h.iter().map(|s| s.to_ascii_lowercase()).collect())
}

fn records(path: &Path, rdr: &mut csv::Reader<fs::File>, width: usize) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(CliError::parse(
                path,
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn parse_f64(path: &Path, line: u64, field: &str, what: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| CliError::parse(path, line, format!("{what} `{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::parse(path, line, format!("{what} `{field}` is not finite")));
    }
    Ok(v)
}

fn edges_from(path: &Path, rdr: &mut csv::Reader<fs::File>) -> Result<Vec<(u64, WeightedEdge)>> {
    records(path, rdr, 3)?
        .into_iter()
        .map(|(line, rec)| {
            if rec[0].is_empty() || rec[1].is_empty() {
                return Err(CliError::parse(path, line, "empty node label"));
            }
            let w = parse_f64(path, line, &rec[2], "weight")?;
            Ok((line, WeightedEdge::new(&rec[0], &rec[1], w)))
        })
        .collect()
}

/// Reads a `src,dst,weight` edge list (`count` is accepted as the third
/// column name).
pub fn read_edges(path: &Path) -> Result<Vec<WeightedEdge>> {
    Ok(read_edge_rows(path)?.into_iter().map(|(_, e)| e).collect())
}

/// [`read_edges`] keeping each row's line number.
pub fn read_edge_rows(path: &Path) -> Result<Vec<(u64, WeightedEdge)>> {
    let mut rdr = csv_reader(path)?;
    let h = headers(path, &mut rdr)?;
    if h.len() != 3 || h[0] != "src" || h[1] != "dst" || !(h[2] == "weight" || h[2] == "count") {
        return Err(CliError::parse(
            path,
            1,
            format!("expected header `src,dst,weight`, found `{}`", h.join(",")),
        ));
    }
    edges_from(path, &mut rdr)
}

/// Board data in either supported layout.
#[derive(Debug, Clone, PartialEq)]
pub enum BoardFile {
    Memberships(Vec<(String, String)>),
    Counts(Vec<WeightedEdge>),
}

/// Reads board data, choosing the layout from the header:
/// `company,director` memberships or `src,dst,count` pair counts.
pub fn read_board(path: &Path) -> Result<BoardFile> {
    let mut rdr = csv_reader(path)?;
    let h = headers(path, &mut rdr)?;
    match h.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["company", "director"] => {
            let rows = records(path, &mut rdr, 2)?
                .into_iter()
                .map(|(line, rec)| {
                    if rec[0].is_empty() || rec[1].is_empty() {
                        return Err(CliError::parse(path, line, "empty company or director"));
                    }
                    Ok((rec[0].to_string(), rec[1].to_string()))
                })
                .collect::<Result<_>>()?;
            Ok(BoardFile::Memberships(rows))
        }
        ["src", "dst", "count" | "weight"] => {
            let edges = edges_from(path, &mut rdr)?;
            Ok(BoardFile::Counts(edges.into_iter().map(|(_, e)| e).collect()))
        }
        _ => Err(CliError::parse(
            path,
            1,
            format!(
                "expected header `company,director` or `src,dst,count`, found `{}`",
                h.join(",")
            ),
        )),
    }
}

/// Reads a wide price table. Dates must parse as `YYYY-MM-DD`; prices
/// must be positive.
pub fn read_prices(path: &Path) -> Result<PriceTable> {
    let mut rdr = csv_reader(path)?;
    let h = headers(path, &mut rdr)?;
    if h.len() < 2 || h[0] != "date" {
        return Err(CliError::parse(path, 1, "expected header `date,<ticker>,...`"));
    }
    let tickers: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::parse(path, 1, e.to_string()))?
        .iter()
        .skip(1)
        .map(str::to_string)
        .collect();
    let mut dates = Vec::new();
    let mut closes = Vec::new();
    let mut last: Option<NaiveDate> = None;
    for (line, rec) in records(path, &mut rdr, tickers.len() + 1)? {
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d")
            .map_err(|_| CliError::parse(path, line, format!("bad date `{}`", &rec[0])))?;
        if last.is_some_and(|d| d >= date) {
            return Err(CliError::parse(path, line, "dates must be strictly increasing"));
        }
        last = Some(date);
        let row = rec
            .iter()
            .skip(1)
            .map(|cell| {
                if cell.is_empty() {
                    return Ok(None);
                }
                let p = parse_f64(path, line, cell, "price")?;
                if p <= 0.0 {
                    return Err(CliError::parse(path, line, format!("non-positive price {p}")));
                }
                Ok(Some(p))
            })
            .collect::<Result<Vec<_>>>()?;
        dates.push(date.format("%Y-%m-%d").to_string());
        closes.push(row);
    }
    PriceTable::new(tickers, dates, closes).map_err(|e| CliError::format(path, e.to_string()))
}

/// Reads one label per line, ignoring blank lines. Repeated labels are an
/// error.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out: Vec<String> = Vec::new();
    for (n, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        if out.iter().any(|x| x == l) {
            return Err(CliError::parse(path, n as u64 + 1, format!("repeated label `{l}`")));
        }
        out.push(l.to_string());
    }
    Ok(out)
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    let mut s = String::new();
    for l in lines {
        s.push_str(l);
        s.push('\n');
    }
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

/// Writes the nonzero entries of `t`, values with 17 significant digits so
/// they read back exactly.
pub fn write_tensor(path: &Path, t: &Tensor3) -> Result<()> {
    let (i, j, k) = t.dims();
    let mut out = Vec::new();
    let mut emit = || -> std::io::Result<()> {
        writeln!(out, "{i} {j} {k}")?;
        for (a, b, c, v) in t.nonzeros() {
            writeln!(out, "{a} {b} {c} {v:.16e}")?;
        }
        Ok(())
    };
    emit().map_err(|e| CliError::io(path, e))?;
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn read_tensor(path: &Path) -> Result<Tensor3> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n as u64 + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| CliError::format(path, "empty tensor file"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| CliError::parse(path, hline, "bad dimension")))
        .collect::<Result<_>>()?;
    let [ni, nj, nk] = dims[..] else {
        return Err(CliError::parse(path, hline, "expected `I J K`"));
    };
    let mut t = Tensor3::zeros(ni, nj, nk);
    let mut seen = std::collections::HashSet::new();
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 4 {
            return Err(CliError::parse(path, line, "expected `i j k value`"));
        }
        let idx: Vec<usize> = f[..3]
            .iter()
            .map(|x| {
                x.parse()
                    .map_err(|_| CliError::parse(path, line, format!("bad index `{x}`")))
            })
            .collect::<Result<_>>()?;
        let v = parse_f64(path, line, f[3], "value")?;
        if idx[0] >= ni || idx[1] >= nj || idx[2] >= nk {
            return Err(CliError::parse(path, line, "index out of range"));
        }
        if !seen.insert((idx[0], idx[1], idx[2])) {
            return Err(CliError::parse(path, line, "repeated entry"));
        }
        t.set(idx[0], idx[1], idx[2], v);
    }
    Ok(t)
}

/// JSON form of a [`CpModel`]: factor matrices as row-major nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub rank: usize,
    pub lambdas: Vec<f64>,
    pub hubs: Vec<Vec<f64>>,
    pub authorities: Vec<Vec<f64>>,
    pub topics: Vec<Vec<f64>>,
    pub fit: f64,
    pub iterations: usize,
    pub converged: bool,
    pub settings: CpOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<String>>,
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

impl ModelDocument {
    pub fn new(m: &CpModel, settings: CpOptions) -> Self {
        Self {
            rank: m.rank,
            lambdas: m.lambdas.clone(),
            hubs: rows_of(&m.hubs),
            authorities: rows_of(&m.authorities),
            topics: rows_of(&m.topics),
            fit: m.fit,
            iterations: m.iterations,
            converged: m.converged,
            settings,
            labels: None,
            layers: None,
        }
    }

    pub fn to_model(&self) -> std::result::Result<CpModel, multinet_core::Error> {
        let hubs = Matrix::from_rows(&self.hubs)?;
        let authorities = Matrix::from_rows(&self.authorities)?;
        let topics = Matrix::from_rows(&self.topics)?;
        for m in [&hubs, &authorities, &topics] {
            if m.cols() != self.rank {
                return Err(multinet_core::Error::DimensionMismatch {
                    expected: self.rank,
                    found: m.cols(),
                });
            }
        }
        Ok(CpModel {
            rank: self.rank,
            lambdas: self.lambdas.clone(),
            hubs,
            authorities,
            topics,
            fit: self.fit,
            iterations: self.iterations,
            converged: self.converged,
            diagnostics: Default::default(),
        })
    }
}

pub fn write_model(path: &Path, doc: &ModelDocument) -> Result<()> {
    let s = serde_json::to_string_pretty(doc)?;
    fs::write(path, s + "\n").map_err(|e| CliError::io(path, e))
}

pub fn read_model(path: &Path) -> Result<ModelDocument> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.line() as u64, e.to_string()))
}

/// Hex SHA-256 of a file's bytes.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
