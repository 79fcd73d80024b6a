// SPDX-License-Identifier: Apache-2.0

//! File formats, data-directory loading and the command implementations
//! behind the `multinet` binary. The numerical work lives in
//! [`multinet_core`].
//!
//! A data directory holds raw inputs (`shareholding.csv`, `board.csv`,
//! `prices.csv`, optional `roster.txt`) or an assembled tensor written by
//! `multinet ingest` (`tensor.txt`, `labels.txt`, `layers.txt`).

pub mod commands;
pub mod dataset;
pub mod error;
pub mod format;
pub mod io;
pub mod manifest;

pub use commands::{
    cmd_eigencentrality, cmd_hits, cmd_ingest, cmd_rank_sweep, cmd_subgroup, cmd_tophits, CommandOutput,
};
pub use error::{CliError, Result};
pub use multinet_core;
