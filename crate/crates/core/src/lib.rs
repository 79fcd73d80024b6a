// SPDX-License-Identifier: Apache-2.0

//! Multilayer network analysis on dense third-order adjacency tensors.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! - [`netcore`]: weighted directed layers, degrees, strongly connected
//!   components, union and intersection networks
//! - [`tensor`]: the dense [`Tensor3`] with slices, norms, outer products,
//!   contracted vector products and mode-n unfoldings
//! - [`spectral`]: eigencentrality, HITS and best rank-1 matrix approximation
//! - [`decomp`]: TOPHITS, CP-ALS, Tucker (HOOI) and the core consistency
//!   diagnostic
//! - [`pipeline`]: thresholding and assembly of shareholding, board and
//!   price-correlation layers into an analysis-ready tensor
//!
//! File formats, IO and the command-line front end live in the companion
//! `multinet` crate.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod decomp;
mod error;
pub mod linalg;
pub(crate) mod math;
pub mod netcore;
pub mod pipeline;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use netcore::{LayerGraph, MultiNet, SccPartition};
pub use tensor::Tensor3;
