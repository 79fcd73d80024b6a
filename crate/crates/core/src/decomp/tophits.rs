// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use super::Triplet;
use crate::linalg;
use crate::math;
use crate::spectral::{self, PowerOptions};
use crate::tensor::Tensor3;
use crate::{Error, Result};

/// Rank-1 TOPHITS: repeats
///
/// ```text
/// h ← 𝒜 ×̄₂ a ×̄₃ t
/// a ← 𝒜 ×̄₁ h ×̄₃ t
/// t ← 𝒜 ×̄₁ h ×̄₂ a
/// ```
///
/// normalising each vector right after its update, from uniform positive
/// start vectors. The weight is `𝒜 ×̄₁ h ×̄₂ a ×̄₃ t` at the fixed point,
/// which is then the dominant rank-1 CP component.
///
/// The returned triplet has `factor_index` 1. Signs follow the CP model
/// convention (hub and authority lead entries positive, the topic vector
/// absorbs the rest).
pub fn tophits_rank1(t: &Tensor3, opts: &PowerOptions) -> Result<(Triplet, IterationInfo)> {
    if t.is_zero() {
        return Err(Error::ZeroInput);
    }
    let (ni, nj, nk) = t.dims();
    let mut a = math::uniform_unit(nj);
    let mut topics = math::uniform_unit(nk);
    let mut h = math::uniform_unit(ni);

    let probe = t.contract2(&a, &topics)?;
    if math::norm2(&probe) == 0.0 {
        // uniform start annihilated by the tensor: start from the leading
        // singular vectors of the unfoldings instead
        a = linalg::leading_left_singular_vectors(&t.mode_unfold(2)?, 1)?.column(0);
        topics = linalg::leading_left_singular_vectors(&t.mode_unfold(3)?, 1)?.column(0);
    }

    let mut weight = 0.0;
    let mut prev_step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut nh = t.contract2(&a, &topics)?;
        math::normalize(&mut nh);
        let mut na = t.contract1(&nh, &topics)?;
        math::normalize(&mut na);
        let mut nt = t.contract12(&nh, &na)?;
        weight = math::normalize(&mut nt);

        let step = math::distance(&nh, &h)
            .max(math::distance(&na, &a))
            .max(math::distance(&nt, &topics));
        let remaining = spectral::remaining_distance(step, prev_step);
        prev_step = step;
        h = nh;
        a = na;
        topics = nt;
        if remaining <= opts.tol {
            converged = true;
            break;
        }
    }

    if math::fix_sign(&mut h) < 0.0 {
        a.iter_mut().for_each(|x| *x = -*x);
    }
    if math::fix_sign(&mut a) < 0.0 {
        topics.iter_mut().for_each(|x| *x = -*x);
    }
    // weight = ⟨𝒜, h∘a∘t⟩ with the final signs
    let w: f64 = math::dot(&t.contract12(&h, &a)?, &topics);
    if w < 0.0 {
        topics.iter_mut().for_each(|x| *x = -*x);
    }
    weight = if w != 0.0 { math::abs(w) } else { weight };

    let topics_l1: Vec<f64> = super::l1_normalized(&topics);
    Ok((
        Triplet {
            factor_index: 1,
            weight,
            hubs: h,
            authorities: a,
            topics,
            topics_l1,
        },
        IterationInfo { iterations, converged },
    ))
}

/// Iteration count and convergence flag of a power-type iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IterationInfo {
    pub iterations: usize,
    pub converged: bool,
}
