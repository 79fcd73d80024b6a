// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::relative_fit;
use crate::linalg::{self, Matrix};
use crate::math;
use crate::tensor::Tensor3;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuckerOptions {
    /// Core extents `(P, Q, R)`.
    pub dims: (usize, usize, usize),
    pub tol: f64,
    pub max_iter: usize,
}

/// `𝒜 ≈ 𝒢 ×₁ U ×₂ V ×₃ W` with orthonormal factor columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuckerModel {
    pub core: Tensor3,
    pub u: Matrix,
    pub v: Matrix,
    pub w: Matrix,
    pub fit: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl TuckerModel {
    pub fn reconstruct(&self) -> Tensor3 {
        reconstruct(&self.core, &self.u, &self.v, &self.w)
    }
}

fn reconstruct(core: &Tensor3, u: &Matrix, v: &Matrix, w: &Matrix) -> Tensor3 {
    core.mode_product(1, u)
        .and_then(|x| x.mode_product(2, v))
        .and_then(|x| x.mode_product(3, w))
        .expect("factor shapes match the core")
}

/// Tucker decomposition by higher-order orthogonal iteration, started from
/// the leading left singular subspaces of the three unfoldings.
pub fn tucker(t: &Tensor3, opts: &TuckerOptions) -> Result<TuckerModel> {
    let (ni, nj, nk) = t.dims();
    let (p, q, r) = opts.dims;
    if p == 0 || q == 0 || r == 0 || p > ni || q > nj || r > nk {
        return Err(Error::InvalidDims {
            p,
            q,
            r,
            i: ni,
            j: nj,
            k: nk,
        });
    }
    if t.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut u = linalg::leading_left_singular_vectors(&t.mode_unfold(1)?, p)?;
    let mut v = linalg::leading_left_singular_vectors(&t.mode_unfold(2)?, q)?;
    let mut w = linalg::leading_left_singular_vectors(&t.mode_unfold(3)?, r)?;

    let mut core = project(t, &u, &v, &w)?;
    let mut fit = relative_fit(t, &reconstruct(&core, &u, &v, &w))?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let y = t.mode_product(2, &v.transpose())?.mode_product(3, &w.transpose())?;
        u = linalg::leading_left_singular_vectors(&y.mode_unfold(1)?, p)?;
        let y = t.mode_product(1, &u.transpose())?.mode_product(3, &w.transpose())?;
        v = linalg::leading_left_singular_vectors(&y.mode_unfold(2)?, q)?;
        let y = t.mode_product(1, &u.transpose())?.mode_product(2, &v.transpose())?;
        w = linalg::leading_left_singular_vectors(&y.mode_unfold(3)?, r)?;

        core = project(t, &u, &v, &w)?;
        let new_fit = relative_fit(t, &reconstruct(&core, &u, &v, &w))?;
        let delta = math::abs(new_fit - fit);
        fit = new_fit;
        if delta <= opts.tol {
            converged = true;
            break;
        }
    }
    Ok(TuckerModel {
        core,
        u,
        v,
        w,
        fit,
        iterations,
        converged,
    })
}

fn project(t: &Tensor3, u: &Matrix, v: &Matrix, w: &Matrix) -> Result<Tensor3> {
    t.mode_product(1, &u.transpose())?
        .mode_product(2, &v.transpose())?
        .mode_product(3, &w.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::outer3;

    fn opts(dims: (usize, usize, usize)) -> TuckerOptions {
        TuckerOptions {
            dims,
            tol: 1e-12,
            max_iter: 100,
        }
    }

    #[test]
    fn full_dims_are_lossless() {
        let t = Tensor3::from_fn((3, 4, 2), |i, j, k| ((i * 5 + j * 3 + k * 7) % 6) as f64 - 2.0);
        let m = tucker(&t, &opts((3, 4, 2))).unwrap();
        assert!((m.fit - 1.0).abs() < 1e-10, "{}", m.fit);
    }

    #[test]
    fn rank_one_core() {
        let t = outer3(&[0.6, 0.8], &[1.0, 0.0, 0.0], &[0.0, 1.0]).scaled(2.5);
        let m = tucker(&t, &opts((1, 1, 1))).unwrap();
        assert!((math::abs(m.core.at(0, 0, 0)) - 2.5).abs() < 1e-12);
        assert!((m.fit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_dims() {
        let t = Tensor3::from_fn((2, 2, 2), |_, _, _| 1.0);
        assert!(matches!(tucker(&t, &opts((3, 1, 1))), Err(Error::InvalidDims { .. })));
        assert!(matches!(tucker(&t, &opts((0, 1, 1))), Err(Error::InvalidDims { .. })));
    }
}
