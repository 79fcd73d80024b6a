// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{canonicalize, corcondia, match_columns, normalize_columns, reconstruct, relative_fit};
use super::{CpDiagnostics, CpModel};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::tensor::Tensor3;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpOptions {
    pub rank: usize,
    /// Stop when the fit changes by at most this much between sweeps.
    pub tol: f64,
    /// Maximum number of ALS sweeps per initialisation.
    pub max_iter: usize,
    /// Number of initialisations; the first uses leading singular vectors,
    /// the rest seeded random nonnegative factors.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CpOptions {
    fn default() -> Self {
        Self {
            rank: 1,
            tol: 1e-8,
            max_iter: 500,
            restarts: 3,
            seed: 0,
        }
    }
}

struct Run {
    lambdas: Vec<f64>,
    a: Matrix,
    b: Matrix,
    c: Matrix,
    fit: f64,
    iterations: usize,
    converged: bool,
    ridged: bool,
}

/// `M[i, r] = Σ_{j,k} X[i,j,k]·B[j,r]·C[k,r]` (mode-1 MTTKRP).
fn mttkrp1(t: &Tensor3, b: &Matrix, c: &Matrix) -> Matrix {
    let (ni, nj, nk) = t.dims();
    let rank = b.cols();
    let x = t.as_slice();
    let mut m = Matrix::zeros(ni, rank);
    let mut w = alloc::vec![0.0; rank];
    for k in 0..nk {
        for j in 0..nj {
            for r in 0..rank {
                w[r] = b[(j, r)] * c[(k, r)];
            }
            let fibre = &x[ni * (j + nj * k)..ni * (j + nj * k) + ni];
            for (i, &v) in fibre.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                for r in 0..rank {
                    m[(i, r)] += v * w[r];
                }
            }
        }
    }
    m
}

/// `M[j, r] = Σ_{i,k} X[i,j,k]·A[i,r]·C[k,r]`.
fn mttkrp2(t: &Tensor3, a: &Matrix, c: &Matrix) -> Matrix {
    let (ni, nj, nk) = t.dims();
    let rank = a.cols();
    let x = t.as_slice();
    let mut m = Matrix::zeros(nj, rank);
    for k in 0..nk {
        for j in 0..nj {
            let fibre = &x[ni * (j + nj * k)..ni * (j + nj * k) + ni];
            for r in 0..rank {
                let s: f64 = fibre.iter().enumerate().map(|(i, &v)| v * a[(i, r)]).sum();
                m[(j, r)] += s * c[(k, r)];
            }
        }
    }
    m
}

/// `M[k, r] = Σ_{i,j} X[i,j,k]·A[i,r]·B[j,r]`.
fn mttkrp3(t: &Tensor3, a: &Matrix, b: &Matrix) -> Matrix {
    let (ni, nj, nk) = t.dims();
    let rank = a.cols();
    let x = t.as_slice();
    let mut m = Matrix::zeros(nk, rank);
    for k in 0..nk {
        for j in 0..nj {
            let fibre = &x[ni * (j + nj * k)..ni * (j + nj * k) + ni];
            for r in 0..rank {
                let s: f64 = fibre.iter().enumerate().map(|(i, &v)| v * a[(i, r)]).sum();
                m[(k, r)] += s * b[(j, r)];
            }
        }
    }
    m
}

fn random_factor(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen::<f64>())
}

/// Leading left singular vectors of an unfolding, padded with random
/// columns when the rank exceeds the mode extent.
fn svd_factor(unfolded: &Matrix, rank: usize, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let rows = unfolded.rows();
    let k = rank.min(rows);
    let lead = linalg::leading_left_singular_vectors(unfolded, k)?;
    Ok(Matrix::from_fn(rows, rank, |r, c| {
        if c < k {
            lead[(r, c)]
        } else {
            rng.gen::<f64>()
        }
    }))
}

fn als(t: &Tensor3, mut b: Matrix, mut c: Matrix, opts: &CpOptions) -> Result<Run> {
    let rank = b.cols();
    let mut a;
    let mut lambdas;
    let mut fit = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut ridged = false;
    normalize_columns(&mut b);
    normalize_columns(&mut c);
    loop {
        iterations += 1;
        let g = b.gram().hadamard(&c.gram())?;
        let s = linalg::solve_right_spd(&mttkrp1(t, &b, &c), &g)?;
        ridged |= s.ridged;
        a = s.solution;
        normalize_columns(&mut a);

        let g = a.gram().hadamard(&c.gram())?;
        let s = linalg::solve_right_spd(&mttkrp2(t, &a, &c), &g)?;
        ridged |= s.ridged;
        b = s.solution;
        normalize_columns(&mut b);

        let g = a.gram().hadamard(&b.gram())?;
        let s = linalg::solve_right_spd(&mttkrp3(t, &a, &b), &g)?;
        ridged |= s.ridged;
        c = s.solution;
        lambdas = normalize_columns(&mut c);

        let new_fit = relative_fit(t, &reconstruct(&lambdas, &a, &b, &c))?;
        let delta = math::abs(new_fit - fit);
        fit = new_fit;
        if delta <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
    }
    debug_assert_eq!(lambdas.len(), rank);
    Ok(Run {
        lambdas,
        a,
        b,
        c,
        fit,
        iterations,
        converged,
        ridged,
    })
}

fn validate(t: &Tensor3, opts: &CpOptions) -> Result<()> {
    if opts.rank == 0 {
        return Err(Error::InvalidRank { rank: 0 });
    }
    if opts.tol.is_nan() || opts.tol < 0.0 || opts.max_iter == 0 {
        return Err(Error::InvalidConfig(alloc::string::String::from(
            "tolerance must be nonnegative and max_iter positive",
        )));
    }
    if t.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(())
}

fn finish(t: &Tensor3, runs: Vec<Run>, opts: &CpOptions) -> Result<CpModel> {
    let (ni, nj, nk) = t.dims();
    let restart_fits: Vec<f64> = runs.iter().map(|r| r.fit).collect();
    let ridge_applied = runs.iter().any(|r| r.ridged);
    let mut best = 0;
    for (i, f) in restart_fits.iter().enumerate() {
        if *f > restart_fits[best] {
            best = i;
        }
    }
    let Run {
        mut lambdas,
        mut a,
        mut b,
        mut c,
        iterations,
        converged,
        ..
    } = runs.into_iter().nth(best).expect("at least one run");
    canonicalize(&mut lambdas, &mut a, &mut b, &mut c);
    let fit = relative_fit(t, &reconstruct(&lambdas, &a, &b, &c))?;
    Ok(CpModel {
        rank: opts.rank,
        lambdas,
        hubs: a,
        authorities: b,
        topics: c,
        fit,
        iterations,
        converged,
        diagnostics: CpDiagnostics {
            restart_fits,
            best_restart: best,
            ridge_applied,
            rank_exceeds_dims: opts.rank > ni.min(nj).min(nk),
        },
    })
}

/// Rank-R CP decomposition by alternating least squares.
///
/// Each sweep solves for the hub, authority and topic factors in turn
/// (normal equations with the Hadamard product of the other factors'
/// Gram matrices; a ridge of `1e-12·trace` is added when that system's
/// condition number exceeds `1e12`), normalises the columns and absorbs
/// their norms into the weights. Sweeps stop when the fit changes by at
/// most `tol`. The best of `restarts` initialisations is returned; the
/// output is deterministic for a fixed seed.
pub fn cp_als(t: &Tensor3, opts: &CpOptions) -> Result<CpModel> {
    validate(t, opts)?;
    let runs = (0..opts.restarts.max(1))
        .map(|restart| {
            let mut rng = rng_for(opts.seed, restart as u64);
            let (b, c) = initial_factors(t, opts.rank, restart, &mut rng)?;
            als(t, b, c, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    finish(t, runs, opts)
}

/// CP-ALS whose first initialisation reuses `previous` (a model of lower
/// rank on the same tensor) and pads it with fresh random components. The
/// result fits at least as well as `previous` up to ridge effects.
pub fn cp_als_warm(t: &Tensor3, opts: &CpOptions, previous: &CpModel) -> Result<CpModel> {
    validate(t, opts)?;
    if previous.rank > opts.rank || previous.dims() != t.dims() {
        return Err(Error::InvalidRank { rank: opts.rank });
    }
    let mut runs = Vec::with_capacity(opts.restarts.max(1));
    for restart in 0..opts.restarts.max(1) {
        let mut rng = rng_for(opts.seed, restart as u64);
        let (b, c) = if restart == 0 {
            let pad = |m: &Matrix, rng: &mut ChaCha8Rng| {
                Matrix::from_fn(m.rows(), opts.rank, |r, col| {
                    if col < previous.rank {
                        m[(r, col)]
                    } else {
                        rng.gen::<f64>()
                    }
                })
            };
            let b = pad(&previous.authorities, &mut rng);
            let c = pad(&previous.topics, &mut rng);
            (b, c)
        } else {
            initial_factors(t, opts.rank, restart, &mut rng)?
        };
        runs.push(als(t, b, c, opts)?);
    }
    finish(t, runs, opts)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn initial_factors(t: &Tensor3, rank: usize, restart: usize, rng: &mut ChaCha8Rng) -> Result<(Matrix, Matrix)> {
    let (_, nj, nk) = t.dims();
    if restart == 0 {
        let b = svd_factor(&t.mode_unfold(2)?, rank, rng)?;
        let c = svd_factor(&t.mode_unfold(3)?, rank, rng)?;
        Ok((b, c))
    } else {
        Ok((random_factor(nj, rank, rng), random_factor(nk, rank, rng)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMode {
    /// Every rank is fitted from scratch.
    Independent,
    /// Each rank starts from the previous rank's solution plus one fresh
    /// component, which makes the fit non-decreasing in the rank.
    WarmStart,
}

/// One row of a rank sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rank: usize,
    pub fit: f64,
    /// Core consistency in percent; `None` when the core system is
    /// underdetermined for this rank.
    pub corcondia: Option<f64>,
    /// Mean absolute cosine between the hub factors of this rank and the
    /// previous row's, after greedy matching.
    pub hub_stability: Option<f64>,
    pub converged: bool,
}

/// Fits CP models for each rank in `ranks` with shared settings and
/// reports fit and core consistency per rank.
pub fn fit_sweep(t: &Tensor3, ranks: &[usize], opts: &CpOptions, mode: SweepMode) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(ranks.len());
    let mut previous: Option<CpModel> = None;
    for &rank in ranks {
        let o = CpOptions { rank, ..*opts };
        let model = match (&previous, mode) {
            (Some(p), SweepMode::WarmStart) if p.rank <= rank => cp_als_warm(t, &o, p)?,
            _ => cp_als(t, &o)?,
        };
        let cc = match corcondia(t, &model) {
            Ok(v) => Some(v),
            Err(Error::UnderdeterminedCore { .. }) => None,
            Err(e) => return Err(e),
        };
        let hub_stability = previous.as_ref().map(|p| {
            let (small, large) = if p.rank <= model.rank {
                (&p.hubs, &model.hubs)
            } else {
                (&model.hubs, &p.hubs)
            };
            let m = match_columns(small, large);
            m.iter().map(|x| x.2).sum::<f64>() / m.len().max(1) as f64
        });
        rows.push(SweepRow {
            rank,
            fit: model.fit,
            corcondia: cc,
            hub_stability,
            converged: model.converged,
        });
        previous = Some(model);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::outer3;

    #[test]
    fn mttkrp_matches_unfolding_times_khatri_rao() {
        let t = Tensor3::from_fn((3, 2, 2), |i, j, k| (1 + i + 2 * j + 5 * k) as f64);
        let a = Matrix::from_fn(3, 2, |i, r| (i + r) as f64 * 0.5);
        let b = Matrix::from_fn(2, 2, |j, r| 1.0 + (j * r) as f64);
        let c = Matrix::from_fn(2, 2, |k, r| (k + 2 * r) as f64 - 0.5);
        let kr = crate::tensor::khatri_rao(&c, &b).unwrap();
        let expect = t.mode_unfold(1).unwrap().matmul(&kr).unwrap();
        assert_eq!(mttkrp1(&t, &b, &c), expect);
        let kr = crate::tensor::khatri_rao(&c, &a).unwrap();
        let expect = t.mode_unfold(2).unwrap().matmul(&kr).unwrap();
        assert_eq!(mttkrp2(&t, &a, &c), expect);
        let kr = crate::tensor::khatri_rao(&b, &a).unwrap();
        let expect = t.mode_unfold(3).unwrap().matmul(&kr).unwrap();
        assert_eq!(mttkrp3(&t, &a, &b), expect);
    }

    #[test]
    fn rank_one_exact() {
        let t = outer3(&[1.0, 2.0, 2.0], &[0.0, 3.0, 4.0], &[1.0, 1.0]);
        let m = cp_als(
            &t,
            &CpOptions {
                rank: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.fit > 1.0 - 1e-12);
        assert!((m.lambdas[0] - t.frobenius_norm()).abs() < 1e-10);
        assert!((m.fit_to(&t).unwrap() - m.fit).abs() <= 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let t = outer3(&[1.0], &[1.0], &[1.0]);
        assert_eq!(
            cp_als(
                &t,
                &CpOptions {
                    rank: 0,
                    ..Default::default()
                }
            ),
            Err(Error::InvalidRank { rank: 0 })
        );
        assert_eq!(
            cp_als(&Tensor3::zeros(2, 2, 2), &CpOptions::default()),
            Err(Error::ZeroInput)
        );
    }

    #[test]
    fn same_seed_same_model() {
        let t = Tensor3::from_fn((4, 4, 2), |i, j, k| ((i * 7 + j * 3 + k * 5) % 4) as f64);
        let o = CpOptions {
            rank: 2,
            restarts: 3,
            seed: 11,
            ..Default::default()
        };
        assert_eq!(cp_als(&t, &o).unwrap(), cp_als(&t, &o).unwrap());
    }

    #[test]
    fn rank_above_extent_is_flagged() {
        let t = Tensor3::from_fn((3, 3, 2), |i, j, k| ((i + 2 * j + k) % 3) as f64);
        let m = cp_als(
            &t,
            &CpOptions {
                rank: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.diagnostics.rank_exceeds_dims);
        assert_eq!(m.topics.cols(), 3);
    }
}
