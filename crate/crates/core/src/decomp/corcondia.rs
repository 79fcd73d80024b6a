// SPDX-License-Identifier: Apache-2.0

use super::CpModel;
use crate::linalg::{self, Matrix};
use crate::tensor::Tensor3;
use crate::{Error, Result};

/// Relative eigenvalue cut-off used by the factor pseudo-inverses.
const PINV_RCOND: f64 = 1e-12;

/// Least-squares Tucker core of `t` for the model's factor matrices, with the
/// weights absorbed into the hub factor:
/// `𝒢 = 𝒜 ×₁ (UΛ)⁺ ×₂ V⁺ ×₃ W⁺`.
///
/// Because `(W ⊗ V ⊗ UΛ)⁺ = W⁺ ⊗ V⁺ ⊗ (UΛ)⁺`, this is the minimum-norm
/// solution of the full Kronecker least-squares system.
pub fn corcondia_core(t: &Tensor3, m: &CpModel) -> Result<Tensor3> {
    let (ni, nj, nk) = t.dims();
    if m.dims() != (ni, nj, nk) {
        return Err(Error::DimensionMismatch {
            expected: ni * nj * nk,
            found: m.dims().0 * m.dims().1 * m.dims().2,
        });
    }
    let rank = m.rank;
    let unknowns = rank * rank * rank;
    let entries = ni * nj * nk;
    if unknowns > entries {
        return Err(Error::UnderdeterminedCore {
            rank,
            unknowns,
            entries,
        });
    }
    let weighted = Matrix::from_fn(ni, rank, |i, r| m.hubs[(i, r)] * m.lambdas[r]);
    let pa = linalg::pinv(&weighted, PINV_RCOND)?;
    let pb = linalg::pinv(&m.authorities, PINV_RCOND)?;
    let pc = linalg::pinv(&m.topics, PINV_RCOND)?;
    t.mode_product(1, &pa)?.mode_product(2, &pb)?.mode_product(3, &pc)
}

/// Core consistency diagnostic in percent:
/// `100·(1 − Σ_pqr (g_pqr − i_pqr)² / R)` where `𝓘` is the superdiagonal
/// identity core. 100 means the CP model is fully consistent; values can be
/// negative for badly inconsistent models.
///
/// Errors with [`Error::UnderdeterminedCore`] when `R³` exceeds the number
/// of tensor entries. When a factor is rank-deficient (for example `R`
/// larger than the number of layers) the minimum-norm core is used.
pub fn corcondia(t: &Tensor3, m: &CpModel) -> Result<f64> {
    let core = corcondia_core(t, m)?;
    let rank = m.rank;
    let mut ss = 0.0;
    for r in 0..rank {
        for q in 0..rank {
            for p in 0..rank {
                let target = if p == q && q == r { 1.0 } else { 0.0 };
                let d = core.at(p, q, r) - target;
                ss += d * d;
            }
        }
    }
    Ok(100.0 * (1.0 - ss / rank as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{cp_als, CpOptions};
    use crate::tensor::outer3;

    #[test]
    fn exact_rank_one_is_fully_consistent() {
        let t = outer3(&[1.0, 2.0, 0.5], &[0.3, 1.0, 1.0], &[2.0, 1.0]);
        let m = cp_als(
            &t,
            &CpOptions {
                rank: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((corcondia(&t, &m).unwrap() - 100.0).abs() < 1e-8);
    }

    #[test]
    fn underdetermined_core_errors() {
        let t = Tensor3::from_fn((2, 2, 1), |i, j, _| (i + j) as f64 + 1.0);
        let m = cp_als(
            &t,
            &CpOptions {
                rank: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            corcondia(&t, &m),
            Err(Error::UnderdeterminedCore {
                rank: 2,
                unknowns: 8,
                entries: 4
            })
        ));
    }
}
