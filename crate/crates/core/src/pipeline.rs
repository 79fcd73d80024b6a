// SPDX-License-Identifier: Apache-2.0

//! Turning parsed shareholding, board and price records into layers, and
//! assembling layers into an analysis-ready [`MultiNet`] / [`Tensor3`].
//!
//! Parsing files is left to the caller; everything here works on in-memory
//! records. Assembly runs, in order: label-union alignment, diagonal
//! clearing, restriction to the largest strongly connected component of the
//! union network, and per-layer Frobenius normalisation. Restriction comes
//! before normalisation so every surviving slice ends with unit norm.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::math;
use crate::netcore::{LayerGraph, MultiNet};
use crate::tensor::Tensor3;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    /// `p_t / p_{t−1} − 1`
    Simple,
    /// `ln(p_t / p_{t−1})`
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Holdings below this fraction are dropped; equal is kept.
    pub sh_threshold: f64,
    /// Pairs need a return correlation strictly above this for an edge.
    pub corr_threshold: f64,
    pub normalize_layers: bool,
    pub zero_diagonal: bool,
    pub restrict_to_union_scc: bool,
    pub return_kind: ReturnKind,
    pub rank: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            sh_threshold: 0.02,
            corr_threshold: 0.65,
            normalize_layers: true,
            zero_diagonal: true,
            restrict_to_union_scc: true,
            return_kind: ReturnKind::Simple,
            rank: 30,
            tol: 1e-8,
            max_iter: 500,
            restarts: 3,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.sh_threshold) {
            return Err(Error::InvalidConfig(format!(
                "sh_threshold {} outside [0, 1)",
                self.sh_threshold
            )));
        }
        if !(self.corr_threshold > -1.0 && self.corr_threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "corr_threshold {} outside (-1, 1)",
                self.corr_threshold
            )));
        }
        if self.rank == 0 {
            return Err(Error::InvalidConfig("rank must be positive".to_string()));
        }
        if self.tol.is_nan() || self.tol < 0.0 || self.max_iter == 0 {
            return Err(Error::InvalidConfig(
                "tolerance must be nonnegative and max_iter positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// A `src,dst,weight` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub src: String,
    pub dst: String,
    pub weight: f64,
}

impl WeightedEdge {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, weight: f64) -> Self {
        Self {
            src: src.into(),
            dst: dst.into(),
            weight,
        }
    }
}

/// Ordered label set: either fixed by a roster or grown in first-appearance
/// order.
#[derive(Debug, Clone, Default)]
pub struct LabelSpace {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    fixed: bool,
}

impl LabelSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fixed label set; lookups of labels outside it fail.
    pub fn from_roster(roster: &[String]) -> Result<Self> {
        let mut s = Self::new();
        for l in roster {
            if s.index.contains_key(l) {
                return Err(Error::InvalidInput(format!("label `{l}` repeated in roster")));
            }
            s.insert(l);
        }
        s.fixed = true;
        Ok(s)
    }

    fn maybe_roster(roster: Option<&[String]>) -> Result<Self> {
        roster.map_or_else(|| Ok(Self::new()), Self::from_roster)
    }

    fn insert(&mut self, label: &str) -> usize {
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn intern(&mut self, label: &str) -> Result<usize> {
        if let Some(&i) = self.index.get(label) {
            return Ok(i);
        }
        if self.fixed {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        Ok(self.insert(label))
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn into_labels(self) -> Vec<String> {
        self.labels
    }
}

/// What the shareholding loader dropped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ShareholdingStats {
    pub kept: usize,
    pub below_threshold: Vec<WeightedEdge>,
    pub self_holdings: Vec<WeightedEdge>,
}

/// Directed shareholding layer `SH`: weight `(i, j)` is the fraction of `j`
/// held by `i`. Holdings below `cfg.sh_threshold` and self-holdings are
/// dropped; every label seen in a row becomes a node.
pub fn shareholding_layer(
    edges: &[WeightedEdge],
    roster: Option<&[String]>,
    cfg: &PipelineConfig,
) -> Result<(LayerGraph, ShareholdingStats)> {
    cfg.validate()?;
    let mut space = LabelSpace::maybe_roster(roster)?;
    let mut seen = BTreeSet::new();
    let mut resolved = Vec::with_capacity(edges.len());
    for e in edges {
        if !(0.0..=1.0).contains(&e.weight) {
            return Err(Error::InvalidInput(format!(
                "holding {} -> {} has weight {} outside [0, 1]",
                e.src, e.dst, e.weight
            )));
        }
        if !seen.insert((e.src.clone(), e.dst.clone())) {
            return Err(Error::DuplicateEdge {
                src: e.src.clone(),
                dst: e.dst.clone(),
            });
        }
        let s = space.intern(&e.src)?;
        let d = space.intern(&e.dst)?;
        resolved.push((s, d, e));
    }
    let n = space.len();
    let mut w = Matrix::zeros(n, n);
    let mut stats = ShareholdingStats::default();
    for (s, d, e) in resolved {
        if s == d {
            stats.self_holdings.push(e.clone());
        } else if e.weight < cfg.sh_threshold {
            stats.below_threshold.push(e.clone());
        } else {
            w[(s, d)] = e.weight;
            if e.weight != 0.0 {
                stats.kept += 1;
            }
        }
    }
    let g = LayerGraph::new("SH", space.into_labels(), w, true)?;
    Ok((g, stats))
}

/// Undirected board-interlock layer `BD` from `(company, director)`
/// memberships: the weight between two companies is the number of directors
/// sitting on both boards. Repeated membership rows count once.
pub fn board_layer_from_memberships(memberships: &[(String, String)], roster: Option<&[String]>) -> Result<LayerGraph> {
    let mut space = LabelSpace::maybe_roster(roster)?;
    let mut boards: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
    for (company, director) in memberships {
        let c = space.intern(company)?;
        boards.entry(c).or_default().insert(director.as_str());
    }
    let n = space.len();
    let mut w = Matrix::zeros(n, n);
    let keys: Vec<usize> = boards.keys().copied().collect();
    for (x, &a) in keys.iter().enumerate() {
        for &b in &keys[x + 1..] {
            let shared = boards[&a].intersection(&boards[&b]).count() as f64;
            w[(a, b)] = shared;
            w[(b, a)] = shared;
        }
    }
    LayerGraph::new("BD", space.into_labels(), w, false)
}

/// Undirected board-interlock layer from precomputed `src,dst,count`
/// records. A pair may appear in both orientations only with equal counts;
/// self pairs are ignored.
pub fn board_layer_from_counts(edges: &[WeightedEdge], roster: Option<&[String]>) -> Result<LayerGraph> {
    let mut space = LabelSpace::maybe_roster(roster)?;
    let mut counts: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in edges {
        if !e.weight.is_finite() || e.weight < 0.0 {
            return Err(Error::InvalidInput(format!(
                "board count {} -> {} is {}",
                e.src, e.dst, e.weight
            )));
        }
        let s = space.intern(&e.src)?;
        let d = space.intern(&e.dst)?;
        if s == d {
            continue;
        }
        let key = (s.min(d), s.max(d));
        match counts.get(&key) {
            Some(&c) if c != e.weight => {
                return Err(Error::DuplicateEdge {
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                })
            }
            _ => {
                counts.insert(key, e.weight);
            }
        }
    }
    let n = space.len();
    let mut w = Matrix::zeros(n, n);
    for ((a, b), c) in counts {
        w[(a, b)] = c;
        w[(b, a)] = c;
    }
    LayerGraph::new("BD", space.into_labels(), w, false)
}

/// Daily closing prices, one row per date and one column per ticker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceTable {
    tickers: Vec<String>,
    dates: Vec<String>,
    closes: Vec<Vec<Option<f64>>>,
}

impl PriceTable {
    /// `dates` must be strictly increasing (ISO-8601 strings compare
    /// correctly as text) and every observed price positive and finite.
    pub fn new(tickers: Vec<String>, dates: Vec<String>, closes: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::InvalidInput("need at least two dates".to_string()));
        }
        if closes.len() != dates.len() {
            return Err(Error::DimensionMismatch {
                expected: dates.len(),
                found: closes.len(),
            });
        }
        for w in dates.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidInput(format!(
                    "dates not strictly increasing at {}",
                    w[1]
                )));
            }
        }
        for (row, date) in closes.iter().zip(&dates) {
            if row.len() != tickers.len() {
                return Err(Error::DimensionMismatch {
                    expected: tickers.len(),
                    found: row.len(),
                });
            }
            for (p, t) in row.iter().zip(&tickers) {
                if let Some(p) = p {
                    if !(p.is_finite() && *p > 0.0) {
                        return Err(Error::InvalidInput(format!("non-positive price {p} for {t} on {date}")));
                    }
                }
            }
        }
        Ok(Self { tickers, dates, closes })
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn dates(&self) -> &[String] {
        &self.dates
    }

    pub fn closes(&self) -> &[Vec<Option<f64>>] {
        &self.closes
    }

    /// Per-ticker return series (`dates − 1` entries). A return is missing
    /// when either of its two prices is.
    pub fn returns(&self, kind: ReturnKind) -> Vec<Vec<Option<f64>>> {
        (0..self.tickers.len())
            .map(|t| {
                self.closes
                    .windows(2)
                    .map(|w| match (w[0][t], w[1][t]) {
                        (Some(a), Some(b)) => Some(match kind {
                            ReturnKind::Simple => b / a - 1.0,
                            ReturnKind::Log => math::ln(b / a),
                        }),
                        _ => None,
                    })
                    .collect()
            })
            .collect()
    }
}

/// Pearson correlation over the positions where both series are present.
/// `None` with fewer than two such positions or zero variance.
pub fn pairwise_pearson(x: &[Option<f64>], y: &[Option<f64>]) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = x.iter().zip(y).filter_map(|(a, b)| Some(((*a)?, (*b)?))).collect();
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / math::sqrt(sxx * syy))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationStats {
    /// Upper-triangular correlations `(i, j, ρ)` for every pair with a
    /// defined correlation.
    pub correlations: Vec<(usize, usize, f64)>,
    /// Pairs left without an edge for lack of data or variance.
    pub undefined_pairs: Vec<(usize, usize)>,
}

/// Binary undirected layer `CORR`: an edge wherever the pairwise-complete
/// correlation of returns is strictly above `cfg.corr_threshold`.
pub fn correlation_layer(p: &PriceTable, cfg: &PipelineConfig) -> Result<(LayerGraph, CorrelationStats)> {
    cfg.validate()?;
    let returns = p.returns(cfg.return_kind);
    let n = p.tickers.len();
    let mut w = Matrix::zeros(n, n);
    let mut stats = CorrelationStats {
        correlations: Vec::new(),
        undefined_pairs: Vec::new(),
    };
    for i in 0..n {
        for j in (i + 1)..n {
            match pairwise_pearson(&returns[i], &returns[j]) {
                Some(rho) => {
                    stats.correlations.push((i, j, rho));
                    if rho > cfg.corr_threshold {
                        w[(i, j)] = 1.0;
                        w[(j, i)] = 1.0;
                    }
                }
                None => stats.undefined_pairs.push((i, j)),
            }
        }
    }
    let g = LayerGraph::new("CORR", p.tickers.clone(), w, false)?;
    Ok((g, stats))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerReport {
    pub name: String,
    pub directed: bool,
    /// Off-diagonal arcs after label alignment (undirected edges once).
    pub edges_aligned: usize,
    pub diagonal_cleared: usize,
    pub edges_dropped_by_restriction: usize,
    pub edges_final: usize,
    pub density_final: f64,
    /// Frobenius norm just before normalisation.
    pub frobenius_norm: f64,
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssembleReport {
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub dropped_labels: Vec<String>,
    pub layers: Vec<LayerReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembled {
    pub multinet: MultiNet,
    pub tensor: Tensor3,
    pub report: AssembleReport,
}

fn density(g: &LayerGraph) -> f64 {
    let n = g.len() as f64;
    let pairs = if g.is_directed() {
        n * (n - 1.0)
    } else {
        n * (n - 1.0) / 2.0
    };
    if pairs > 0.0 {
        g.edge_count() as f64 / pairs
    } else {
        0.0
    }
}

/// Re-indexes a layer onto `labels`; nodes it does not mention get zero
/// rows and columns.
fn align(layer: &LayerGraph, space: &LabelSpace) -> Result<LayerGraph> {
    let n = space.len();
    let map: Vec<usize> = layer
        .labels()
        .iter()
        .map(|l| space.get(l).ok_or_else(|| Error::UnknownLabel(l.clone())))
        .collect::<Result<_>>()?;
    let mut w = Matrix::zeros(n, n);
    let src = layer.weights();
    for (a, &ia) in map.iter().enumerate() {
        for (b, &ib) in map.iter().enumerate() {
            w[(ia, ib)] = src[(a, b)];
        }
    }
    let labels = (0..n).map(|i| space.labels[i].clone()).collect();
    LayerGraph::with_loops(layer.name(), labels, w, layer.is_directed())
}

/// Aligns, cleans, restricts and normalises `layers`, then stacks them.
pub fn assemble(layers: &[LayerGraph], roster: Option<&[String]>, cfg: &PipelineConfig) -> Result<Assembled> {
    cfg.validate()?;
    if layers.is_empty() {
        return Err(Error::EmptyLayers);
    }
    let mut space = LabelSpace::maybe_roster(roster)?;
    for l in layers {
        for label in l.labels() {
            space.intern(label)?;
        }
    }
    let nodes_before = space.len();

    let mut reports = Vec::with_capacity(layers.len());
    let mut aligned = Vec::with_capacity(layers.len());
    for l in layers {
        let a = align(l, &space)?;
        let (a, cleared) = if cfg.zero_diagonal { a.zero_diagonal() } else { (a, 0) };
        reports.push(LayerReport {
            name: a.name().to_string(),
            directed: a.is_directed(),
            edges_aligned: a.edge_count(),
            diagonal_cleared: cleared,
            edges_dropped_by_restriction: 0,
            edges_final: 0,
            density_final: 0.0,
            frobenius_norm: 0.0,
            normalized: false,
        });
        aligned.push(a);
    }
    let mut net = MultiNet::new(aligned)?;
    let all_labels = net.labels().to_vec();

    if cfg.restrict_to_union_scc {
        let scc = net.union_network().strongly_connected_components();
        let keep = scc.largest().unwrap_or(&[]);
        if keep.len() < 2 {
            return Err(Error::EmptyUnionScc);
        }
        net = net.restrict(keep)?;
    }
    let kept: BTreeSet<&str> = net.labels().iter().map(String::as_str).collect();
    let dropped_labels = all_labels
        .iter()
        .filter(|l| !kept.contains(l.as_str()))
        .cloned()
        .collect();

    let mut finished = Vec::with_capacity(net.layer_count());
    for (l, rep) in net.layers().iter().zip(reports.iter_mut()) {
        let norm = l.weights().frobenius_norm();
        rep.frobenius_norm = norm;
        rep.edges_final = l.edge_count();
        rep.edges_dropped_by_restriction = rep.edges_aligned - rep.edges_final;
        rep.density_final = density(l);
        let out = if cfg.normalize_layers && norm > 0.0 {
            rep.normalized = true;
            l.scaled(norm)
        } else {
            l.clone()
        };
        finished.push(out);
    }
    let multinet = MultiNet::new(finished)?;
    let tensor = Tensor3::from_multinet(&multinet);
    Ok(Assembled {
        report: AssembleReport {
            nodes_before,
            nodes_after: multinet.node_count(),
            dropped_labels,
            layers: reports,
        },
        multinet,
        tensor,
    })
}

/// All labels mentioned by a set of edges, first-appearance order.
pub fn labels_of(edges: &[WeightedEdge]) -> Vec<String> {
    let mut space = LabelSpace::new();
    for e in edges {
        let _ = space.intern(&e.src);
        let _ = space.intern(&e.dst);
    }
    space.into_labels()
}

/// Convenience for tests and callers holding plain tuples.
pub fn edges_from_tuples(rows: &[(&str, &str, f64)]) -> Vec<WeightedEdge> {
    rows.iter().map(|(s, d, w)| WeightedEdge::new(*s, *d, *w)).collect()
}
