// SPDX-License-Identifier: Apache-2.0

//! Loading single layers and whole data directories.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use multinet_core::pipeline::{
    assemble, board_layer_from_counts, board_layer_from_memberships, correlation_layer, shareholding_layer,
    AssembleReport, PipelineConfig, ShareholdingStats,
};
use multinet_core::{LayerGraph, Matrix, Tensor3};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io::{self, BoardFile};

pub const SHAREHOLDING_FILE: &str = "shareholding.csv";
pub const BOARD_FILE: &str = "board.csv";
pub const PRICES_FILE: &str = "prices.csv";
pub const ROSTER_FILE: &str = "roster.txt";
pub const TENSOR_FILE: &str = "tensor.txt";
pub const LABELS_FILE: &str = "labels.txt";
pub const LAYERS_FILE: &str = "layers.txt";
pub const REPORT_FILE: &str = "report.json";

/// Reads an edge-list file as one layer. Labels are numbered in order of
/// first appearance. Self-loops are dropped. With `undirected`, each row
/// stands for both orientations and a pair listed both ways must carry the
/// same weight.
pub fn load_layer(path: &Path, undirected: bool) -> Result<LayerGraph> {
    let edges = io::read_edge_rows(path)?;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut id = |l: &str, labels: &mut Vec<String>| {
        *index.entry(l.to_string()).or_insert_with(|| {
            labels.push(l.to_string());
            labels.len() - 1
        })
    };
    // undirected pairs are keyed by (min, max); the stored orientation lets
    // a reversed repeat with the same weight through
    // weight, orientation as read, source line
    type Entry = (f64, (usize, usize), u64);
    let mut entries: HashMap<(usize, usize), Entry> = HashMap::new();
    let mut dropped_loops = 0;
    for &(line, ref e) in &edges {
        let s = id(&e.src, &mut labels);
        let d = id(&e.dst, &mut labels);
        if s == d {
            dropped_loops += 1;
            continue;
        }
        let key = if undirected { (s.min(d), s.max(d)) } else { (s, d) };
        match entries.get(&key) {
            Some(&(w, orient, _)) if undirected && w == e.weight && orient != (s, d) => {}
            Some(&(_, _, first)) => {
                return Err(CliError::parse(
                    path,
                    line,
                    format!("edge {} -> {} conflicts with line {first}", e.src, e.dst),
                ))
            }
            None => {
                entries.insert(key, (e.weight, (s, d), line));
            }
        }
    }
    if dropped_loops > 0 {
        log::warn!("{}: dropped {dropped_loops} self-loop rows", path.display());
    }
    let n = labels.len();
    let mut w = Matrix::zeros(n, n);
    for ((s, d), (v, _, _)) in entries {
        w[(s, d)] = v;
        if undirected {
            w[(d, s)] = v;
        }
    }
    let name = path
        .file_stem()
        .map_or_else(|| "layer".to_string(), |s| s.to_string_lossy().into_owned());
    LayerGraph::new(name, labels, w, !undirected).map_err(|e| CliError::format(path, e.to_string()))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub pairs_defined: usize,
    pub edges: usize,
    /// Ticker pairs without enough overlapping returns (or variance).
    pub undefined_pairs: Vec<(String, String)>,
}

/// Per-source statistics gathered while reading raw files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestStats {
    pub shareholding: Option<ShareholdingStats>,
    pub correlation: Option<CorrelationSummary>,
    pub report: Option<AssembleReport>,
}

/// An analysis-ready tensor with its node and layer names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub labels: Vec<String>,
    pub layer_names: Vec<String>,
    pub tensor: Tensor3,
    pub stats: IngestStats,
    /// Every file that was read, for the run manifest.
    pub inputs: Vec<PathBuf>,
}

/// Loads a data directory.
///
/// A directory holding `tensor.txt` and `labels.txt` (optionally
/// `layers.txt`) is taken as already assembled and used as is. Otherwise
/// any of `shareholding.csv`, `board.csv` and `prices.csv` are read (layers
/// in that order), with `roster.txt` fixing the node order when present,
/// and assembled under `cfg`.
pub fn load_dataset(dir: &Path, cfg: &PipelineConfig) -> Result<Dataset> {
    if !dir.is_dir() {
        return Err(CliError::format(dir, "not a directory"));
    }
    if dir.join(TENSOR_FILE).exists() {
        return load_assembled(dir);
    }
    cfg.validate()?;
    let mut inputs = Vec::new();
    let roster_path = dir.join(ROSTER_FILE);
    let roster = if roster_path.exists() {
        inputs.push(roster_path.clone());
        Some(io::read_lines(&roster_path)?)
    } else {
        None
    };
    let roster = roster.as_deref();
    let mut layers = Vec::new();
    let mut stats = IngestStats::default();

    let sh = dir.join(SHAREHOLDING_FILE);
    if sh.exists() {
        let edges = io::read_edges(&sh)?;
        let (g, st) = shareholding_layer(&edges, roster, cfg).map_err(|e| CliError::format(&sh, e.to_string()))?;
        inputs.push(sh);
        stats.shareholding = Some(st);
        layers.push(g);
    }
    let bd = dir.join(BOARD_FILE);
    if bd.exists() {
        let g = match io::read_board(&bd)? {
            BoardFile::Memberships(m) => board_layer_from_memberships(&m, roster),
            BoardFile::Counts(c) => board_layer_from_counts(&c, roster),
        }
        .map_err(|e| CliError::format(&bd, e.to_string()))?;
        inputs.push(bd);
        layers.push(g);
    }
    let px = dir.join(PRICES_FILE);
    if px.exists() {
        let table = io::read_prices(&px)?;
        let (g, st) = correlation_layer(&table, cfg).map_err(|e| CliError::format(&px, e.to_string()))?;
        let t = table.tickers();
        if !st.undefined_pairs.is_empty() {
            log::warn!(
                "{}: {} ticker pairs have no defined correlation",
                px.display(),
                st.undefined_pairs.len()
            );
        }
        stats.correlation = Some(CorrelationSummary {
            pairs_defined: st.correlations.len(),
            edges: g.edge_count(),
            undefined_pairs: st
                .undefined_pairs
                .iter()
                .map(|&(a, b)| (t[a].clone(), t[b].clone()))
                .collect(),
        });
        inputs.push(px);
        layers.push(g);
    }
    if layers.is_empty() {
        return Err(CliError::format(
            dir,
            format!("no {SHAREHOLDING_FILE}, {BOARD_FILE}, {PRICES_FILE} or {TENSOR_FILE} found"),
        ));
    }
    let out = assemble(&layers, roster, cfg)?;
    stats.report = Some(out.report);
    Ok(Dataset {
        labels: out.multinet.labels().to_vec(),
        layer_names: out.multinet.layers().iter().map(|l| l.name().to_string()).collect(),
        tensor: out.tensor,
        stats,
        inputs,
    })
}

fn load_assembled(dir: &Path) -> Result<Dataset> {
    let tpath = dir.join(TENSOR_FILE);
    let lpath = dir.join(LABELS_FILE);
    let tensor = io::read_tensor(&tpath)?;
    let labels = io::read_lines(&lpath)?;
    let (ni, nj, nk) = tensor.dims();
    if ni != nj || labels.len() != ni {
        return Err(CliError::format(
            &tpath,
            format!("tensor is {ni}×{nj}×{nk} but {} labels were given", labels.len()),
        ));
    }
    let mut inputs = vec![tpath, lpath];
    let layer_path = dir.join(LAYERS_FILE);
    let layer_names = if layer_path.exists() {
        let names = io::read_lines(&layer_path)?;
        if names.len() != nk {
            return Err(CliError::format(
                &layer_path,
                format!("{} layer names for {nk} layers", names.len()),
            ));
        }
        inputs.push(layer_path);
        names
    } else {
        (1..=nk).map(|k| format!("L{k}")).collect()
    };
    Ok(Dataset {
        labels,
        layer_names,
        tensor,
        stats: IngestStats::default(),
        inputs,
    })
}

/// Writes `tensor.txt`, `labels.txt`, `layers.txt` and `report.json` into
/// `out`, which [`load_dataset`] reads back as an assembled directory.
pub fn write_dataset(out: &Path, d: &Dataset) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let files = [
        out.join(TENSOR_FILE),
        out.join(LABELS_FILE),
        out.join(LAYERS_FILE),
        out.join(REPORT_FILE),
    ];
    io::write_tensor(&files[0], &d.tensor)?;
    io::write_lines(&files[1], &d.labels)?;
    io::write_lines(&files[2], &d.layer_names)?;
    let report = serde_json::to_string_pretty(&d.stats)?;
    std::fs::write(&files[3], report + "\n").map_err(|e| CliError::io(&files[3], e))?;
    Ok(files.to_vec())
}
