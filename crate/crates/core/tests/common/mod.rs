// SPDX-License-Identifier: Apache-2.0
#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use multinet_core::{LayerGraph, Matrix, Tensor3};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i:02}")).collect()
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen::<f64>())
}

/// Random nonnegative weights with zero diagonal; each off-diagonal entry is
/// present with probability `p`.
pub fn random_layer(rng: &mut StdRng, n: usize, p: f64, directed: bool) -> LayerGraph {
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            if rng.gen::<f64>() < p {
                let v = rng.gen_range(0.1..1.0);
                w[(i, j)] = v;
                if !directed {
                    w[(j, i)] = v;
                }
            }
        }
    }
    LayerGraph::new("L", labels(n), w, directed).unwrap()
}

pub fn unit(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn random_tensor(rng: &mut StdRng, dims: (usize, usize, usize)) -> Tensor3 {
    Tensor3::from_fn(dims, |_, _, _| rng.gen::<f64>())
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Difference up to a global sign.
pub fn sign_aligned_diff(a: &[f64], b: &[f64]) -> f64 {
    let neg: Vec<f64> = b.iter().map(|x| -x).collect();
    max_diff(a, b).min(max_diff(a, &neg))
}

/// Transitive closure by Floyd–Warshall over a boolean adjacency.
pub fn reachability(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut r = adj.to_vec();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}
