// SPDX-License-Identifier: Apache-2.0

//! Univariate scores on a single layer: eigencentrality (the Perron vector
//! of a symmetric adjacency matrix), HITS hubs and authorities, and the
//! best rank-1 approximation of a matrix they are tied to.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Matrix};
use crate::math;
use crate::netcore::LayerGraph;
use crate::{Error, Result};

/// Relative eigenvalue gap `(λ₁ − λ₂) / λ₁` of `AᵀA` below which a HITS
/// result is reported with `gap_ok = false`.
pub const GAP_RELATIVE_THRESHOLD: f64 = 1e-6;

/// Stopping rule shared by the power iterations in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerOptions {
    /// Bound on the estimated Euclidean distance from the iterate to the
    /// fixed point (extrapolated from the shrinking successive steps).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityResult {
    pub scores: Vec<f64>,
    /// Rayleigh-quotient estimate of the spectral radius.
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitsResult {
    pub hubs: Vec<f64>,
    pub authorities: Vec<f64>,
    /// Common scale `σ` with `A·a = σ·h` and `Aᵀ·h = σ·a` at the fixed point.
    pub sigma: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Whether `λ₁(AᵀA)` is separated from `λ₂(AᵀA)` by more than
    /// [`GAP_RELATIVE_THRESHOLD`] (relative to `λ₁`).
    pub gap_ok: bool,
}

/// Best rank-1 approximation `σ·u·vᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank1Svd {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Principal eigenvector of a symmetric nonnegative adjacency matrix.
///
/// The iteration runs on `A + c·I` with `c` half the largest row sum. The
/// shift leaves the eigenvectors unchanged and keeps bipartite graphs (whose
/// spectrum contains `−ρ`) from oscillating.
pub fn eigencentrality(g: &LayerGraph, opts: &PowerOptions) -> Result<CentralityResult> {
    let a = g.weights();
    let n = a.rows();
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    let scale = a.max_abs();
    if let Some((row, col, d)) = a.asymmetry() {
        if d > 1e-12 * scale {
            return Err(Error::NotSymmetric { row, col });
        }
    }
    let shift = 0.5 * (0..n).map(|r| a.row(r).iter().sum::<f64>()).fold(0.0, f64::max);
    let a_norm = a.frobenius_norm();

    let mut x = math::uniform_unit(n);
    let mut iterations = 0;
    let mut converged = false;
    let mut eigenvalue = 0.0;
    let mut prev_step = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        let ax = a.matvec(&x)?;
        let mut next: Vec<f64> = ax.iter().zip(&x).map(|(y, xi)| y + shift * xi).collect();
        math::normalize(&mut next);
        let step = math::distance(&next, &x);
        let remaining = remaining_distance(step, prev_step);
        prev_step = step;
        x = next;

        let ax = a.matvec(&x)?;
        eigenvalue = math::dot(&x, &ax);
        let residual = math::sqrt(
            ax.iter()
                .zip(&x)
                .map(|(y, xi)| (y - eigenvalue * xi) * (y - eigenvalue * xi))
                .sum(),
        );
        if remaining <= opts.tol && residual <= opts.tol * a_norm {
            converged = true;
            break;
        }
    }
    math::fix_sign(&mut x);
    Ok(CentralityResult {
        scores: x,
        eigenvalue,
        iterations,
        converged,
    })
}

/// Estimated distance from the current iterate to the fixed point, assuming
/// the steps shrink geometrically at the observed ratio.
pub(crate) fn remaining_distance(step: f64, prev_step: f64) -> f64 {
    if step <= 16.0 * f64::EPSILON {
        return step;
    }
    let ratio = step / prev_step;
    if ratio < 1.0 {
        step / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Alternating power iteration `h ← A·a`, `a ← Aᵀ·h`, normalising after each
/// matrix application, from the uniform positive start vector.
fn alternating_power(a: &Matrix, opts: &PowerOptions) -> Result<Rank1Svd> {
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    let a_norm = a.frobenius_norm();
    let mut auth = math::uniform_unit(a.cols());
    let mut hub = a.matvec(&auth)?;
    if math::normalize(&mut hub) == 0.0 {
        // uniform start orthogonal to every row: restart from the row space
        hub = leading_row_space_start(a);
    }
    let mut sigma = 0.0;
    let mut prev_step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut next_auth = a.t_matvec(&hub)?;
        math::normalize(&mut next_auth);
        let mut next_hub = a.matvec(&next_auth)?;
        math::normalize(&mut next_hub);
        let step = math::distance(&next_auth, &auth).max(math::distance(&next_hub, &hub));
        let remaining = remaining_distance(step, prev_step);
        prev_step = step;
        auth = next_auth;
        hub = next_hub;

        // fixed-point residual: ‖A·a − σh‖ and ‖Aᵀ·h − σa‖
        let ah = a.matvec(&auth)?;
        sigma = math::dot(&hub, &ah);
        let res_h = math::sqrt(
            ah.iter()
                .zip(&hub)
                .map(|(y, h)| (y - sigma * h) * (y - sigma * h))
                .sum(),
        );
        let ath = a.t_matvec(&hub)?;
        let res_a = math::sqrt(
            ath.iter()
                .zip(&auth)
                .map(|(y, x)| (y - sigma * x) * (y - sigma * x))
                .sum(),
        );
        if remaining <= opts.tol && res_h.max(res_a) <= opts.tol * a_norm {
            converged = true;
            break;
        }
    }
    if math::fix_sign(&mut hub) < 0.0 {
        auth.iter_mut().for_each(|x| *x = -*x);
    }
    if sigma < 0.0 {
        sigma = -sigma;
        auth.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(Rank1Svd {
        sigma,
        u: hub,
        v: auth,
        iterations,
        converged,
    })
}

fn leading_row_space_start(a: &Matrix) -> Vec<f64> {
    // the row with the largest norm is a nonzero vector in range(A)
    let best = (0..a.rows())
        .max_by(|&x, &y| {
            math::norm2(a.row(x))
                .partial_cmp(&math::norm2(a.row(y)))
                .unwrap_or(core::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let mut v = a.matvec(a.row(best)).unwrap_or_default();
    math::normalize(&mut v);
    v
}

/// HITS hub and authority scores of a layer.
pub fn hits(g: &LayerGraph, opts: &PowerOptions) -> Result<HitsResult> {
    hits_matrix(g.weights(), opts)
}

/// [`hits`] on a bare square matrix.
pub fn hits_matrix(a: &Matrix, opts: &PowerOptions) -> Result<HitsResult> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let svd = alternating_power(a, opts)?;
    let gap_ok = spectral_gap_ok(a)?;
    Ok(HitsResult {
        hubs: svd.u,
        authorities: svd.v,
        sigma: svd.sigma,
        iterations: svd.iterations,
        converged: svd.converged,
        gap_ok,
    })
}

/// Relative gap between the two largest eigenvalues of `AᵀA`.
pub fn relative_gap(a: &Matrix) -> Result<f64> {
    let eig = linalg::sym_eigen(&a.gram())?;
    let l1 = eig.values.first().copied().unwrap_or(0.0);
    let l2 = eig.values.get(1).copied().unwrap_or(0.0);
    if l1 <= 0.0 {
        return Ok(0.0);
    }
    Ok((l1 - l2) / l1)
}

fn spectral_gap_ok(a: &Matrix) -> Result<bool> {
    Ok(relative_gap(a)? > GAP_RELATIVE_THRESHOLD)
}

/// Best rank-1 approximation of a (possibly rectangular) matrix: the
/// leading singular triplet. For a degenerate leading singular value the
/// returned pair is one valid choice among many.
pub fn rank1_svd(a: &Matrix, opts: &PowerOptions) -> Result<Rank1Svd> {
    alternating_power(a, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn graph(rows: &[&[f64]], directed: bool) -> LayerGraph {
        LayerGraph::new("g", labels(rows.len()), Matrix::from_rows(rows).unwrap(), directed).unwrap()
    }

    #[test]
    fn path_graph_centrality() {
        let g = graph(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]], false);
        let r = eigencentrality(&g, &PowerOptions::default()).unwrap();
        assert!(r.converged);
        let s = math::sqrt(0.5);
        for (x, e) in r.scores.iter().zip([0.5, s, 0.5]) {
            assert!((x - e).abs() < 1e-9, "{x} vs {e}");
        }
        assert!((r.eigenvalue - math::sqrt(2.0)).abs() < 1e-9);
    }

    #[test]
    fn complete_graph_centrality_is_uniform() {
        let w = Matrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 });
        let g = LayerGraph::new("k4", labels(4), w, false).unwrap();
        let r = eigencentrality(&g, &PowerOptions::default()).unwrap();
        assert!(r.scores.iter().all(|x| (x - 0.5).abs() < 1e-12));
        assert!((r.eigenvalue - 3.0).abs() < 1e-12);
    }

    #[test]
    fn centrality_rejects_directed_and_zero() {
        let g = graph(&[&[0.0, 1.0], &[0.0, 0.0]], true);
        assert!(matches!(
            eigencentrality(&g, &PowerOptions::default()),
            Err(Error::NotSymmetric { .. })
        ));
        let z = LayerGraph::new("z", labels(3), Matrix::zeros(3, 3), false).unwrap();
        assert_eq!(eigencentrality(&z, &PowerOptions::default()), Err(Error::ZeroInput));
        assert_eq!(hits(&z, &PowerOptions::default()), Err(Error::ZeroInput));
    }

    #[test]
    fn hits_on_small_dag() {
        let g = graph(&[&[0.0, 1.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]], true);
        let r = hits(&g, &PowerOptions::default()).unwrap();
        assert!(r.converged && r.gap_ok);
        // principal eigenvectors of AAᵀ and AᵀA, eigenvalue (3+√5)/2
        let big = 0.850_650_808_352_039_9;
        let small = 0.525_731_112_119_133_7;
        for (x, e) in r.hubs.iter().zip([big, small, 0.0]) {
            assert!((x - e).abs() < 1e-9);
        }
        for (x, e) in r.authorities.iter().zip([0.0, small, big]) {
            assert!((x - e).abs() < 1e-9);
        }
        let lambda = (3.0 + math::sqrt(5.0)) / 2.0;
        assert!((r.sigma * r.sigma - lambda).abs() < 1e-9);
    }

    #[test]
    fn hits_on_symmetric_layer_coincides() {
        let g = graph(
            &[
                &[0.0, 2.0, 1.0, 0.0],
                &[2.0, 0.0, 0.5, 1.0],
                &[1.0, 0.5, 0.0, 3.0],
                &[0.0, 1.0, 3.0, 0.0],
            ],
            false,
        );
        let r = hits(&g, &PowerOptions::default()).unwrap();
        for (h, a) in r.hubs.iter().zip(&r.authorities) {
            assert!((h - a).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_is_degenerate() {
        let a = Matrix::identity(2);
        let r = rank1_svd(&a, &PowerOptions::default()).unwrap();
        assert!((r.sigma - 1.0).abs() < 1e-12);
        assert!((math::norm2(&r.u) - 1.0).abs() < 1e-12);
        let h = hits_matrix(&a, &PowerOptions::default()).unwrap();
        assert!(!h.gap_ok);
    }

    #[test]
    fn rank1_of_exact_outer_product() {
        let u = [0.6, 0.0, -0.8];
        let v = [0.0, 1.0];
        let a = Matrix::from_fn(3, 2, |i, j| 2.5 * u[i] * v[j]);
        let r = rank1_svd(&a, &PowerOptions::default()).unwrap();
        assert!((r.sigma - 2.5).abs() < 1e-12);
        // sign convention puts the largest-magnitude entry of u positive
        for (x, e) in r.u.iter().zip([-0.6, 0.0, 0.8]) {
            assert!((x - e).abs() < 1e-12);
        }
        for (x, e) in r.v.iter().zip([0.0, -1.0]) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn start_orthogonal_to_rows_is_recovered() {
        // uniform start annihilated by every row
        let a = Matrix::from_rows(&[[1.0, -1.0], [2.0, -2.0]]).unwrap();
        let r = rank1_svd(&a, &PowerOptions::default()).unwrap();
        assert!((r.sigma - math::sqrt(10.0)).abs() < 1e-10);
        assert!(r.converged);
    }
}
