// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multinet::commands::{
    self, parse_ranks, CommandOutput, EigenArgs, HitsArgs, IngestArgs, SubgroupArgs, SweepArgs, TensorArgs, TophitsArgs,
};
use multinet::error::{EXIT_INPUT, EXIT_NOT_CONVERGED};
use multinet::format::OutputFormat;
use multinet::multinet_core::pipeline::{PipelineConfig, ReturnKind};
use multinet::multinet_core::spectral::PowerOptions;

#[derive(Parser)]
#[command(
    name = "multinet",
    version,
    about = "Hub, authority and TOPHITS analysis of multilayer company networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble raw shareholding/board/price files into a tensor directory.
    Ingest {
        data_dir: PathBuf,
        #[command(flatten)]
        pipeline: PipelineFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Hub and authority scores of a single layer (`src,dst,weight` CSV).
    Hits {
        layer: PathBuf,
        /// Treat each row as an undirected edge.
        #[arg(long)]
        undirected: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvector centrality of an undirected layer.
    Eigencentrality {
        layer: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Hub/authority/topic scores of one factor of the multilayer tensor.
    Tophits {
        data_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        factor: usize,
        /// Also write the fitted model as JSON.
        #[arg(long)]
        save_model: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Fit and core consistency over a range of ranks.
    RankSweep {
        data_dir: PathBuf,
        /// `a..b` (inclusive) or a comma-separated list.
        #[arg(long, default_value = "1..10")]
        ranks: String,
        /// Seed each rank from the previous rank's solution.
        #[arg(long)]
        warm_start: bool,
        #[command(flatten)]
        pipeline: PipelineFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Top hubs and authorities of one factor.
    Subgroup {
        data_dir: PathBuf,
        #[arg(long)]
        factor: usize,
        /// Read a model saved by `tophits --save-model` instead of fitting.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineFlags,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Rows per ranked table.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Convergence tolerance (power iterations default 1e-10, CP-ALS 1e-8).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Directory for the output file and run manifest.
    #[arg(long, default_value = "multinet-out")]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineFlags {
    #[arg(long, default_value_t = 0.02)]
    sh_threshold: f64,
    #[arg(long, default_value_t = 0.65)]
    corr_threshold: f64,
    #[arg(long, default_value_t = 30)]
    rank: usize,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    #[arg(long, env = "MULTINET_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_normalize: bool,
    #[arg(long)]
    no_scc_restrict: bool,
    /// Correlate log returns instead of simple returns.
    #[arg(long)]
    log_returns: bool,
}

impl PipelineFlags {
    fn config(&self, common: &Common) -> PipelineConfig {
        let d = PipelineConfig::default();
        PipelineConfig {
            sh_threshold: self.sh_threshold,
            corr_threshold: self.corr_threshold,
            normalize_layers: !self.no_normalize,
            zero_diagonal: true,
            restrict_to_union_scc: !self.no_scc_restrict,
            return_kind: if self.log_returns {
                ReturnKind::Log
            } else {
                ReturnKind::Simple
            },
            rank: self.rank,
            tol: common.tol.unwrap_or(d.tol),
            max_iter: common.max_iter.unwrap_or(d.max_iter),
            restarts: self.restarts,
            seed: self.seed,
        }
    }

    fn tensor_args(&self, common: &Common) -> TensorArgs {
        TensorArgs {
            pipeline: self.config(common),
            power_tol: common.tol.unwrap_or(PowerOptions::default().tol),
            format: common.format,
        }
    }
}

fn power(common: &Common) -> PowerOptions {
    let d = PowerOptions::default();
    PowerOptions {
        tol: common.tol.unwrap_or(d.tol),
        max_iter: common.max_iter.unwrap_or(d.max_iter),
    }
}

fn run(cmd: Command) -> multinet::Result<(CommandOutput, PathBuf)> {
    Ok(match cmd {
        Command::Ingest {
            data_dir,
            pipeline,
            common,
        } => {
            let args = IngestArgs {
                pipeline: pipeline.config(&common),
                out: common.out.clone(),
                format: common.format,
            };
            (commands::cmd_ingest(&data_dir, &args)?.0, common.out)
        }
        Command::Hits {
            layer,
            undirected,
            common,
        } => {
            let args = HitsArgs {
                top: common.top,
                undirected,
                power: power(&common),
                format: common.format,
            };
            (commands::cmd_hits(&layer, &args)?, common.out)
        }
        Command::Eigencentrality { layer, common } => {
            let args = EigenArgs {
                top: common.top,
                power: power(&common),
                format: common.format,
            };
            (commands::cmd_eigencentrality(&layer, &args)?, common.out)
        }
        Command::Tophits {
            data_dir,
            factor,
            save_model,
            pipeline,
            common,
        } => {
            let args = TophitsArgs {
                tensor: pipeline.tensor_args(&common),
                rank: pipeline.rank,
                factor,
                top: common.top,
                save_model,
            };
            (commands::cmd_tophits(&data_dir, &args)?, common.out)
        }
        Command::RankSweep {
            data_dir,
            ranks,
            warm_start,
            pipeline,
            common,
        } => {
            let args = SweepArgs {
                tensor: pipeline.tensor_args(&common),
                ranks: parse_ranks(&ranks)?,
                warm_start,
            };
            (commands::cmd_rank_sweep(&data_dir, &args)?, common.out)
        }
        Command::Subgroup {
            data_dir,
            factor,
            model,
            pipeline,
            common,
        } => {
            let args = SubgroupArgs {
                tensor: pipeline.tensor_args(&common),
                rank: pipeline.rank,
                factor,
                top: common.top,
                model,
            };
            (commands::cmd_subgroup(&data_dir, &args)?, common.out)
        }
    })
}

fn emit(out: &CommandOutput, dir: &Path) -> multinet::Result<()> {
    print!("{}", out.text);
    commands::write_output(dir, out)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = run(cli.command).and_then(|(out, dir)| emit(&out, &dir).map(|_| out));
    match result {
        Ok(out) if out.converged => ExitCode::SUCCESS,
        Ok(out) => {
            eprintln!("warning: {} did not converge within the iteration limit", out.command);
            ExitCode::from(EXIT_NOT_CONVERGED as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
