// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("weight matrix is {rows}x{cols} but there are {labels} labels")]
    ShapeMismatch { rows: usize, cols: usize, labels: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("negative weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("self-loop with weight {value} at node {node}")]
    SelfLoop { node: usize, value: f64 },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("layer collection is empty")]
    EmptyLayers,

    #[error("layer `{layer}` does not share the node labels of the collection")]
    LabelMismatch { layer: String },

    #[error("node selection is empty")]
    EmptySelection,

    #[error("input is identically zero")]
    ZeroInput,

    #[error("invalid rank {rank}")]
    InvalidRank { rank: usize },

    #[error("invalid Tucker dimensions ({p}, {q}, {r}) for a {i}x{j}x{k} tensor")]
    InvalidDims {
        p: usize,
        q: usize,
        r: usize,
        i: usize,
        j: usize,
        k: usize,
    },

    #[error("invalid mode {0}, expected 1, 2 or 3")]
    InvalidMode(usize),

    #[error("factor index {index} exceeds rank {rank}")]
    FactorIndex { index: usize, rank: usize },

    #[error("core consistency system is underdetermined: rank {rank} needs {unknowns} unknowns but the tensor has {entries} entries")]
    UnderdeterminedCore {
        rank: usize,
        unknowns: usize,
        entries: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: String, dst: String },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("union network has no strongly connected component with at least two nodes")]
    EmptyUnionScc,
}
