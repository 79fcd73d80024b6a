// SPDX-License-Identifier: Apache-2.0

//! Tensor decompositions of the adjacency tensor.
//!
//! - [`tophits_rank1`]: the rank-1 TOPHITS power iteration
//! - [`cp_als`]: rank-R CP/PARAFAC by alternating least squares, yielding a
//!   [`CpModel`] whose factors read as hub/authority/topic [`Triplet`]s
//! - [`tucker`]: Tucker decomposition by higher-order orthogonal iteration
//! - [`corcondia`]: core consistency of a fitted CP model
//! - [`fit_sweep`]: fit and core consistency across candidate ranks

mod corcondia;
mod cp;
mod tophits;
mod tucker;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::math;
use crate::tensor::Tensor3;
use crate::{Error, Result};

pub use corcondia::{corcondia, corcondia_core};
pub use cp::{cp_als, cp_als_warm, fit_sweep, CpOptions, SweepMode, SweepRow};
pub use tophits::{tophits_rank1, IterationInfo};
pub use tucker::{tucker, TuckerModel, TuckerOptions};

/// Diagnostics collected while fitting a [`CpModel`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CpDiagnostics {
    /// Final fit of every initialisation, in the order they were tried.
    pub restart_fits: Vec<f64>,
    /// Index into `restart_fits` of the returned solution.
    pub best_restart: usize,
    /// A least-squares system was ill-conditioned and got a ridge.
    pub ridge_applied: bool,
    /// The rank exceeds the smallest tensor extent.
    pub rank_exceeds_dims: bool,
}

/// Rank-R CP model `Σ_r λ_r · u_r ∘ v_r ∘ w_r`.
///
/// Columns of `hubs`, `authorities` and `topics` have unit Euclidean norm
/// (a column whose weight collapsed to zero keeps an arbitrary unit
/// vector), `lambdas` are nonnegative and sorted descending, and for each
/// component the largest-magnitude entry of the hub column and of the
/// authority column is positive; the topic column absorbs the sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpModel {
    pub rank: usize,
    pub lambdas: Vec<f64>,
    /// `n × R` hub factors.
    pub hubs: Matrix,
    /// `n × R` authority factors.
    pub authorities: Matrix,
    /// `l × R` topic (layer) factors.
    pub topics: Matrix,
    /// `1 − ‖𝒜 − 𝒜̂‖_F / ‖𝒜‖_F`.
    pub fit: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default)]
    pub diagnostics: CpDiagnostics,
}

impl CpModel {
    /// Dense reconstruction `𝒜̂`.
    pub fn reconstruct(&self) -> Tensor3 {
        reconstruct(&self.lambdas, &self.hubs, &self.authorities, &self.topics)
    }

    /// Recomputes the fit against `t` from the stored factors.
    pub fn fit_to(&self, t: &Tensor3) -> Result<f64> {
        relative_fit(t, &self.reconstruct())
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.hubs.rows(), self.authorities.rows(), self.topics.rows())
    }

    /// Builds a model from raw factors and weights: columns are normalised
    /// into the weights, components sorted by weight and signs fixed. The
    /// fit is evaluated against `t`.
    pub fn from_factors(
        t: &Tensor3,
        lambdas: &[f64],
        hubs: &Matrix,
        authorities: &Matrix,
        topics: &Matrix,
    ) -> Result<Self> {
        let rank = lambdas.len();
        if rank == 0 {
            return Err(Error::InvalidRank { rank });
        }
        let (ni, nj, nk) = t.dims();
        for (m, rows) in [(hubs, ni), (authorities, nj), (topics, nk)] {
            if m.rows() != rows || m.cols() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rows * rank,
                    found: m.rows() * m.cols(),
                });
            }
        }
        let mut lam = lambdas.to_vec();
        let mut u = hubs.clone();
        let mut v = authorities.clone();
        let mut w = topics.clone();
        for m in [&mut u, &mut v, &mut w] {
            let norms = normalize_columns(m);
            for (l, n) in lam.iter_mut().zip(norms) {
                *l *= n;
            }
        }
        canonicalize(&mut lam, &mut u, &mut v, &mut w);
        let fit = relative_fit(t, &reconstruct(&lam, &u, &v, &w))?;
        Ok(Self {
            rank,
            lambdas: lam,
            hubs: u,
            authorities: v,
            topics: w,
            fit,
            iterations: 0,
            converged: true,
            diagnostics: CpDiagnostics::default(),
        })
    }
}

/// One CP component read as a hub/authority/topic grouping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    /// 1-based; factor 1 is the dominant grouping.
    pub factor_index: usize,
    pub weight: f64,
    pub hubs: Vec<f64>,
    pub authorities: Vec<f64>,
    /// Unit Euclidean norm.
    pub topics: Vec<f64>,
    /// `topics / Σ|topics|`: the normalised layer scores.
    pub topics_l1: Vec<f64>,
}

/// Triplets ordered by descending weight.
pub fn triplets(m: &CpModel) -> Vec<Triplet> {
    let mut order: Vec<usize> = (0..m.rank).collect();
    order.sort_by(|&a, &b| {
        m.lambdas[b]
            .partial_cmp(&m.lambdas[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(pos, r)| {
            let topics = m.topics.column(r);
            Triplet {
                factor_index: pos + 1,
                weight: m.lambdas[r],
                hubs: m.hubs.column(r),
                authorities: m.authorities.column(r),
                topics_l1: l1_normalized(&topics),
                topics,
            }
        })
        .collect()
}

/// `v / Σ|v|`; a zero vector is returned unchanged.
pub fn l1_normalized(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().map(|x| math::abs(*x)).sum();
    if s == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / s).collect()
}

/// Top-k hubs and authorities of one factor as `(node, score)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subgroup {
    pub factor_index: usize,
    pub hubs: Vec<(usize, f64)>,
    pub authorities: Vec<(usize, f64)>,
}

/// The `k` highest-scoring hubs and authorities of factor `factor`
/// (1-based, in [`triplets`] order). Ties go to the lower node index.
pub fn subgroup(m: &CpModel, factor: usize, k: usize) -> Result<Subgroup> {
    if factor == 0 || factor > m.rank {
        return Err(Error::FactorIndex {
            index: factor,
            rank: m.rank,
        });
    }
    let t = &triplets(m)[factor - 1];
    Ok(Subgroup {
        factor_index: factor,
        hubs: top_k(&t.hubs, k),
        authorities: top_k(&t.authorities, k),
    })
}

/// Indices of the `k` largest scores, descending, ties by index.
pub fn top_k(scores: &[f64], k: usize) -> Vec<(usize, f64)> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx.into_iter().take(k).map(|i| (i, scores[i])).collect()
}

/// Greedy best-cosine assignment of the columns of `a` to distinct columns
/// of `b`. Returns `(column of a, column of b, |cosine|)` for every column of
/// `a` that found a partner, strongest pairs first.
pub fn match_columns(a: &Matrix, b: &Matrix) -> Vec<(usize, usize, f64)> {
    let mut pairs = Vec::new();
    for i in 0..a.cols() {
        let ca = a.column(i);
        let na = math::norm2(&ca);
        for j in 0..b.cols() {
            let cb = b.column(j);
            let nb = math::norm2(&cb);
            let cos = if na > 0.0 && nb > 0.0 {
                math::abs(math::dot(&ca, &cb)) / (na * nb)
            } else {
                0.0
            };
            pairs.push((i, j, cos));
        }
    }
    pairs.sort_by(|x, y| y.2.partial_cmp(&x.2).unwrap_or(core::cmp::Ordering::Equal));
    let mut used_a = alloc::vec![false; a.cols()];
    let mut used_b = alloc::vec![false; b.cols()];
    let mut out = Vec::new();
    for (i, j, c) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j, c));
        }
    }
    out
}

pub(crate) fn reconstruct(lambdas: &[f64], a: &Matrix, b: &Matrix, c: &Matrix) -> Tensor3 {
    let (ni, nj, nk) = (a.rows(), b.rows(), c.rows());
    let rank = lambdas.len();
    let mut data = alloc::vec![0.0; ni * nj * nk];
    for k in 0..nk {
        for j in 0..nj {
            let base = ni * (j + nj * k);
            for r in 0..rank {
                let s = lambdas[r] * b[(j, r)] * c[(k, r)];
                if s == 0.0 {
                    continue;
                }
                for i in 0..ni {
                    data[base + i] += s * a[(i, r)];
                }
            }
        }
    }
    Tensor3::from_vec((ni, nj, nk), data).expect("consistent dims")
}

pub(crate) fn relative_fit(t: &Tensor3, approx: &Tensor3) -> Result<f64> {
    let norm = t.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroInput);
    }
    Ok(1.0 - t.distance(approx)? / norm)
}

/// Normalises columns to unit norm and returns the original norms. A zero
/// column becomes the uniform unit vector with norm 0.
pub(crate) fn normalize_columns(m: &mut Matrix) -> Vec<f64> {
    let rows = m.rows();
    (0..m.cols())
        .map(|c| {
            let mut col = m.column(c);
            let n = math::normalize(&mut col);
            if n == 0.0 {
                col = math::uniform_unit(rows);
            }
            m.set_column(c, &col);
            n
        })
        .collect()
}

/// Sorts components by descending weight and applies the sign convention.
pub(crate) fn canonicalize(lambdas: &mut Vec<f64>, u: &mut Matrix, v: &mut Matrix, w: &mut Matrix) {
    let rank = lambdas.len();
    for r in 0..rank {
        let mut cu = u.column(r);
        let mut cv = v.column(r);
        let mut cw = w.column(r);
        if lambdas[r] < 0.0 {
            lambdas[r] = -lambdas[r];
            cw.iter_mut().for_each(|x| *x = -*x);
        }
        if math::fix_sign(&mut cu) < 0.0 {
            cv.iter_mut().for_each(|x| *x = -*x);
        }
        if math::fix_sign(&mut cv) < 0.0 {
            cw.iter_mut().for_each(|x| *x = -*x);
        }
        u.set_column(r, &cu);
        v.set_column(r, &cv);
        w.set_column(r, &cw);
    }
    let mut order: Vec<usize> = (0..rank).collect();
    order.sort_by(|&a, &b| {
        lambdas[b]
            .partial_cmp(&lambdas[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let permute = |m: &Matrix| Matrix::from_fn(m.rows(), rank, |r, c| m[(r, order[c])]);
    *u = permute(u);
    *v = permute(v);
    *w = permute(w);
    *lambdas = order.iter().map(|&r| lambdas[r]).collect();
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn model(lambdas: Vec<f64>, u: &[&[f64]], v: &[&[f64]], w: &[&[f64]]) -> CpModel {
        CpModel {
            rank: lambdas.len(),
            lambdas,
            hubs: Matrix::from_rows(u).unwrap(),
            authorities: Matrix::from_rows(v).unwrap(),
            topics: Matrix::from_rows(w).unwrap(),
            fit: 1.0,
            iterations: 0,
            converged: true,
            diagnostics: CpDiagnostics::default(),
        }
    }

    #[test]
    fn triplets_follow_weight_order() {
        let m = model(
            vec![1.0, 3.0],
            &[&[1.0, 0.0], &[0.0, 1.0]],
            &[&[1.0, 0.0], &[0.0, 1.0]],
            &[&[0.6, 1.0], &[0.8, 0.0]],
        );
        let t = triplets(&m);
        assert_eq!(t[0].weight, 3.0);
        assert_eq!(t[0].factor_index, 1);
        assert_eq!(t[0].hubs, vec![0.0, 1.0]);
        assert_eq!(t[1].topics, vec![0.6, 0.8]);
        let s: f64 = t[1].topics_l1.iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_triplet_equals_columns() {
        let m = model(vec![2.0], &[&[0.6], &[0.8]], &[&[1.0], &[0.0]], &[&[1.0]]);
        let t = triplets(&m);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].hubs, vec![0.6, 0.8]);
        assert_eq!(t[0].authorities, vec![1.0, 0.0]);
        assert_eq!(t[0].topics_l1, vec![1.0]);
    }

    #[test]
    fn subgroup_ranks_and_errors() {
        let m = model(
            vec![2.0],
            &[&[0.0], &[1.0], &[0.0]],
            &[&[0.5], &[0.5], &[0.7]],
            &[&[1.0]],
        );
        let s = subgroup(&m, 1, 3).unwrap();
        assert_eq!(s.hubs[0], (1, 1.0));
        assert_eq!(s.hubs[1].0, 0);
        assert_eq!(s.authorities.iter().map(|p| p.0).collect::<Vec<_>>(), vec![2, 0, 1]);
        assert_eq!(subgroup(&m, 1, 10).unwrap().hubs.len(), 3);
        assert_eq!(subgroup(&m, 2, 3), Err(Error::FactorIndex { index: 2, rank: 1 }));
        assert!(subgroup(&m, 0, 3).is_err());
    }

    #[test]
    fn canonical_signs() {
        let t = crate::tensor::outer3(&[1.0, 2.0], &[3.0, 1.0], &[1.0]);
        let m = CpModel::from_factors(
            &t,
            &[1.0],
            &Matrix::from_rows(&[[-1.0], [-2.0]]).unwrap(),
            &Matrix::from_rows(&[[-3.0], [-1.0]]).unwrap(),
            &Matrix::from_rows(&[[1.0]]).unwrap(),
        )
        .unwrap();
        assert!(m.hubs[(1, 0)] > 0.0 && m.authorities[(0, 0)] > 0.0 && m.topics[(0, 0)] > 0.0);
        assert!((m.lambdas[0] - t.frobenius_norm()).abs() < 1e-12);
        assert!((m.fit - 1.0).abs() < 1e-15);
    }

    #[test]
    fn column_matching_is_greedy_and_sign_blind() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let b = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let m = match_columns(&a, &b);
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|p| (p.2 - 1.0).abs() < 1e-15));
        assert!(m.contains(&(0, 1, 1.0)));
    }
}
