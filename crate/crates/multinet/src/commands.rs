// SPDX-License-Identifier: Apache-2.0

//! The subcommands as library functions. Each returns the rendered primary
//! output together with its [`RunManifest`]; writing them is left to the
//! caller.

use std::path::{Path, PathBuf};

use multinet_core::decomp::{cp_als, fit_sweep, tophits_rank1, triplets, CpModel, CpOptions, SweepMode, SweepRow};
use multinet_core::netcore::DegreeMode;
use multinet_core::pipeline::PipelineConfig;
use multinet_core::spectral::{eigencentrality, hits, PowerOptions};
use multinet_core::Tensor3;
use serde::Serialize;

use crate::dataset::{self, Dataset};
use crate::error::{CliError, Result};
use crate::format::{self, fixed, OutputFormat, Scored};
use crate::io::{self, ModelDocument};
use crate::manifest::RunManifest;

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub command: &'static str,
    pub format: OutputFormat,
    pub text: String,
    /// `false` when an iterative solver stopped at its iteration limit; the
    /// output is still complete but should be treated with care.
    pub converged: bool,
    pub manifest: RunManifest,
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

#[derive(Debug, Clone, Serialize)]
pub struct HitsArgs {
    pub top: usize,
    pub undirected: bool,
    pub power: PowerOptions,
    pub format: OutputFormat,
}

#[derive(Serialize)]
struct HitsJson<'a> {
    hubs: &'a [Scored],
    authorities: &'a [Scored],
    sigma: f64,
    iterations: usize,
    converged: bool,
    gap_ok: bool,
}

/// Hub and authority rankings of one layer.
pub fn cmd_hits(layer: &Path, args: &HitsArgs) -> Result<CommandOutput> {
    let g = dataset::load_layer(layer, args.undirected)?;
    let r = hits(&g, &args.power)?;
    if !r.gap_ok {
        log::warn!("leading singular value is (nearly) repeated; scores are not unique");
    }
    let hubs = format::rank(g.labels(), &r.hubs, args.top);
    let auth = format::rank(g.labels(), &r.authorities, args.top);
    let text = match args.format {
        OutputFormat::Json => json(&HitsJson {
            hubs: &hubs,
            authorities: &auth,
            sigma: r.sigma,
            iterations: r.iterations,
            converged: r.converged,
            gap_ok: r.gap_ok,
        })?,
        f => format::hub_authority(f, &hubs, &auth),
    };
    Ok(CommandOutput {
        command: "hits",
        format: args.format,
        text,
        converged: r.converged,
        manifest: RunManifest::new("hits", args, &[layer.to_path_buf()])?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenArgs {
    pub top: usize,
    pub power: PowerOptions,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityRow {
    pub label: String,
    pub score: f64,
    pub degree: usize,
}

/// Eigenvector centrality of an undirected layer, with node degrees.
pub fn cmd_eigencentrality(layer: &Path, args: &EigenArgs) -> Result<CommandOutput> {
    let g = dataset::load_layer(layer, true)?;
    let r = eigencentrality(&g, &args.power)?;
    let ranked = format::rank(g.labels(), &r.scores, args.top);
    let rows: Vec<CentralityRow> = ranked
        .into_iter()
        .map(|s| {
            let node = g
                .labels()
                .iter()
                .position(|l| *l == s.label)
                .expect("ranked label exists");
            let degree = g.degree(node, DegreeMode::Total)?;
            Ok(CentralityRow {
                label: s.label,
                score: s.score,
                degree,
            })
        })
        .collect::<std::result::Result<_, multinet_core::Error>>()?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                (i + 1).to_string(),
                r.label.clone(),
                fixed(r.score),
                r.degree.to_string(),
            ]
        })
        .collect();
    let text = match args.format {
        OutputFormat::Table => format::table(&["#", "company", "eigencentrality", "degree"], &cells),
        OutputFormat::Tsv => format::tsv(&["rank", "company", "eigencentrality", "degree"], &cells),
        OutputFormat::Json => json(&serde_json::json!({
            "nodes": rows,
            "eigenvalue": r.eigenvalue,
            "iterations": r.iterations,
            "converged": r.converged,
        }))?,
    };
    Ok(CommandOutput {
        command: "eigencentrality",
        format: args.format,
        text,
        converged: r.converged,
        manifest: RunManifest::new("eigencentrality", args, &[layer.to_path_buf()])?,
    })
}

/// Settings shared by the tensor commands.
#[derive(Debug, Clone, Serialize)]
pub struct TensorArgs {
    pub pipeline: PipelineConfig,
    /// Stopping tolerance for the rank-1 power iteration.
    pub power_tol: f64,
    pub format: OutputFormat,
}

impl TensorArgs {
    pub fn cp_options(&self, rank: usize) -> CpOptions {
        let p = &self.pipeline;
        CpOptions {
            rank,
            tol: p.tol,
            max_iter: p.max_iter,
            restarts: p.restarts,
            seed: p.seed,
        }
    }
}

/// Rank 1 runs the TOPHITS power iteration; higher ranks run CP-ALS.
pub fn fit_model(t: &Tensor3, args: &TensorArgs, rank: usize) -> Result<CpModel> {
    if rank == 1 {
        let opts = PowerOptions {
            tol: args.power_tol,
            max_iter: args.pipeline.max_iter.max(1000),
        };
        let (tr, info) = tophits_rank1(t, &opts)?;
        let col = |v: &[f64]| multinet_core::Matrix::from_columns(&[v.to_vec()]);
        let mut m = CpModel::from_factors(
            t,
            &[tr.weight],
            &col(&tr.hubs)?,
            &col(&tr.authorities)?,
            &col(&tr.topics)?,
        )?;
        m.iterations = info.iterations;
        m.converged = info.converged;
        return Ok(m);
    }
    let m = cp_als(t, &args.cp_options(rank))?;
    if m.diagnostics.rank_exceeds_dims {
        log::warn!("rank {rank} exceeds the smallest tensor extent");
    }
    if m.diagnostics.ridge_applied {
        log::warn!("ill-conditioned least-squares systems were regularised");
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize)]
pub struct TophitsArgs {
    pub tensor: TensorArgs,
    pub rank: usize,
    /// 1-based factor to report.
    pub factor: usize,
    pub top: usize,
    pub save_model: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerScore {
    pub layer: String,
    pub score: f64,
}

#[derive(Serialize)]
struct TophitsJson<'a> {
    rank: usize,
    factor: usize,
    weight: f64,
    fit: f64,
    iterations: usize,
    converged: bool,
    hubs: &'a [Scored],
    authorities: &'a [Scored],
    topics: Vec<LayerScore>,
    topics_l1: Vec<LayerScore>,
}

fn topic_line(names: &[String], scores: &[f64]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(scores)
        .map(|(n, s)| format!("{n} {}", fixed(*s)))
        .collect();
    format!("topic scores: {}\n", parts.join("  "))
}

/// Hub, authority and layer scores of one TOPHITS / CP factor.
pub fn cmd_tophits(data_dir: &Path, args: &TophitsArgs) -> Result<CommandOutput> {
    let d = dataset::load_dataset(data_dir, &args.tensor.pipeline)?;
    check_factor(args.factor, args.rank)?;
    let m = fit_model(&d.tensor, &args.tensor, args.rank)?;
    if let Some(path) = &args.save_model {
        let mut doc = ModelDocument::new(&m, args.tensor.cp_options(args.rank));
        doc.labels = Some(d.labels.clone());
        doc.layers = Some(d.layer_names.clone());
        io::write_model(path, &doc)?;
    }
    let tr = &triplets(&m)[args.factor - 1];
    let hubs = format::rank(&d.labels, &tr.hubs, args.top);
    let auth = format::rank(&d.labels, &tr.authorities, args.top);
    let scores = |v: &[f64]| {
        d.layer_names
            .iter()
            .zip(v)
            .map(|(l, s)| LayerScore {
                layer: l.clone(),
                score: *s,
            })
            .collect::<Vec<_>>()
    };
    let text = match args.tensor.format {
        OutputFormat::Json => json(&TophitsJson {
            rank: m.rank,
            factor: args.factor,
            weight: tr.weight,
            fit: m.fit,
            iterations: m.iterations,
            converged: m.converged,
            hubs: &hubs,
            authorities: &auth,
            topics: scores(&tr.topics),
            topics_l1: scores(&tr.topics_l1),
        })?,
        OutputFormat::Table => format!(
            "factor {} of {}, weight {}, fit {}\n{}{}",
            args.factor,
            m.rank,
            fixed(tr.weight),
            fixed(m.fit),
            format::hub_authority(OutputFormat::Table, &hubs, &auth),
            topic_line(&d.layer_names, &tr.topics_l1)
        ),
        OutputFormat::Tsv => {
            let rows: Vec<Vec<String>> = d
                .layer_names
                .iter()
                .zip(&tr.topics_l1)
                .map(|(l, s)| vec![l.clone(), fixed(*s)])
                .collect();
            format!(
                "{}\n{}",
                format::hub_authority(OutputFormat::Tsv, &hubs, &auth),
                format::tsv(&["layer", "topic_score"], &rows)
            )
        }
    };
    Ok(CommandOutput {
        command: "tophits",
        format: args.tensor.format,
        text,
        converged: m.converged,
        manifest: RunManifest::new("tophits", args, &d.inputs)?,
    })
}

fn check_factor(factor: usize, rank: usize) -> Result<()> {
    if factor == 0 || factor > rank {
        return Err(multinet_core::Error::FactorIndex { index: factor, rank }.into());
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SubgroupArgs {
    pub tensor: TensorArgs,
    pub rank: usize,
    pub factor: usize,
    pub top: usize,
    /// Previously saved model to read instead of fitting.
    pub model: Option<PathBuf>,
}

/// Top hubs and authorities of one factor.
pub fn cmd_subgroup(data_dir: &Path, args: &SubgroupArgs) -> Result<CommandOutput> {
    let d = dataset::load_dataset(data_dir, &args.tensor.pipeline)?;
    let mut inputs = d.inputs.clone();
    let m = match &args.model {
        Some(path) => {
            let doc = io::read_model(path)?;
            if doc.labels.as_ref().is_some_and(|l| *l != d.labels) {
                return Err(CliError::format(path, "model labels differ from the data set"));
            }
            inputs.push(path.clone());
            let m = doc.to_model().map_err(|e| CliError::format(path, e.to_string()))?;
            if m.dims() != d.tensor.dims() {
                return Err(CliError::format(path, "model shape differs from the data set"));
            }
            m
        }
        None => fit_model(&d.tensor, &args.tensor, args.rank)?,
    };
    check_factor(args.factor, m.rank)?;
    // ranked like every other table: by printed score, ties by label
    let tr = &triplets(&m)[args.factor - 1];
    let hubs = format::rank(&d.labels, &tr.hubs, args.top);
    let auth = format::rank(&d.labels, &tr.authorities, args.top);
    let text = match args.tensor.format {
        OutputFormat::Json => json(&serde_json::json!({
            "factor": args.factor,
            "rank": m.rank,
            "weight": tr.weight,
            "hubs": hubs,
            "authorities": auth,
        }))?,
        OutputFormat::Table => format!(
            "factor {} of {}, weight {}\n{}",
            args.factor,
            m.rank,
            fixed(tr.weight),
            format::hub_authority(OutputFormat::Table, &hubs, &auth)
        ),
        OutputFormat::Tsv => format::hub_authority(OutputFormat::Tsv, &hubs, &auth),
    };
    Ok(CommandOutput {
        command: "subgroup",
        format: args.tensor.format,
        text,
        converged: m.converged,
        manifest: RunManifest::new("subgroup", args, &inputs)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepArgs {
    pub tensor: TensorArgs,
    pub ranks: Vec<usize>,
    pub warm_start: bool,
}

/// Parses `a..b` (inclusive) or a comma-separated list of ranks.
pub fn parse_ranks(s: &str) -> Result<Vec<usize>> {
    let bad = || CliError::Usage(format!("bad rank list `{s}`"));
    let ranks: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if ranks.is_empty() || ranks.contains(&0) {
        return Err(bad());
    }
    Ok(ranks)
}

/// Fit, core consistency and hub stability for each rank.
pub fn cmd_rank_sweep(data_dir: &Path, args: &SweepArgs) -> Result<CommandOutput> {
    let d = dataset::load_dataset(data_dir, &args.tensor.pipeline)?;
    let mode = if args.warm_start {
        SweepMode::WarmStart
    } else {
        SweepMode::Independent
    };
    let rows = fit_sweep(&d.tensor, &args.ranks, &args.tensor.cp_options(1), mode)?;
    let converged = rows.iter().all(|r| r.converged);
    let text = render_sweep(&rows, args.tensor.format)?;
    Ok(CommandOutput {
        command: "rank-sweep",
        format: args.tensor.format,
        text,
        converged,
        manifest: RunManifest::new("rank-sweep", args, &d.inputs)?,
    })
}

fn render_sweep(rows: &[SweepRow], f: OutputFormat) -> Result<String> {
    if f == OutputFormat::Json {
        return json(&rows);
    }
    let opt = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), fixed);
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.rank.to_string(),
                fixed(r.fit),
                opt(r.corcondia),
                opt(r.hub_stability),
                if r.converged { "yes" } else { "no" }.to_string(),
            ]
        })
        .collect();
    Ok(match f {
        OutputFormat::Tsv => format::tsv(&["rank", "fit", "corcondia", "hub_stability", "converged"], &cells),
        _ => format::table(&["rank", "fit", "corcondia", "hub stability", "converged"], &cells),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestArgs {
    pub pipeline: PipelineConfig,
    pub out: PathBuf,
    pub format: OutputFormat,
}

/// Assembles a raw data directory and writes the result to `args.out`.
pub fn cmd_ingest(data_dir: &Path, args: &IngestArgs) -> Result<(CommandOutput, Dataset)> {
    let d = dataset::load_dataset(data_dir, &args.pipeline)?;
    dataset::write_dataset(&args.out, &d)?;
    let text = match args.format {
        OutputFormat::Json => json(&d.stats)?,
        f => {
            let mut cells = Vec::new();
            if let Some(r) = &d.stats.report {
                for l in &r.layers {
                    cells.push(vec![
                        l.name.clone(),
                        l.edges_aligned.to_string(),
                        l.edges_dropped_by_restriction.to_string(),
                        l.edges_final.to_string(),
                        fixed(l.density_final),
                        fixed(l.frobenius_norm),
                    ]);
                }
            }
            let headers = ["layer", "edges", "dropped", "kept", "density", "norm"];
            let (ni, _, nk) = d.tensor.dims();
            let mut s = format!("{ni} nodes, {nk} layers\n");
            if let Some(r) = &d.stats.report {
                s = format!("{} nodes before restriction, {}", r.nodes_before, s);
            }
            s + &match f {
                OutputFormat::Tsv => format::tsv(&headers, &cells),
                _ => format::table(&headers, &cells),
            }
        }
    };
    let manifest = RunManifest::new("ingest", args, &d.inputs)?;
    Ok((
        CommandOutput {
            command: "ingest",
            format: args.format,
            text,
            converged: true,
            manifest,
        },
        d,
    ))
}

/// Writes `<command>.<ext>` and `<command>.manifest.json` into `dir`.
pub fn write_output(dir: &Path, out: &CommandOutput) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let main = dir.join(format!("{}.{}", out.command, out.format.extension()));
    std::fs::write(&main, &out.text).map_err(|e| CliError::io(&main, e))?;
    let manifest = dir.join(format!("{}.manifest.json", out.command));
    out.manifest.write(&manifest)?;
    Ok((main, manifest))
}
