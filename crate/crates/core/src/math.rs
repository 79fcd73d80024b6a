// SPDX-License-Identifier: Apache-2.0

//! Float helpers backed by `libm` so the crate builds without `std`.

use alloc::vec::Vec;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    sqrt(dot(v, v))
}

/// Euclidean distance between two equal-length vectors.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Scales `v` to unit Euclidean norm and returns the original norm.
/// A zero vector is left untouched and 0 is returned.
pub fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Index of the entry with the largest magnitude; the first one wins ties.
pub fn argmax_abs(v: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in v.iter().enumerate() {
        let m = abs(x);
        match best {
            Some((_, b)) if m <= b => {}
            _ => best = Some((i, m)),
        }
    }
    best.map(|(i, _)| i)
}

/// Flips `v` so that its largest-magnitude entry is positive. Returns the
/// applied sign.
pub fn fix_sign(v: &mut [f64]) -> f64 {
    match argmax_abs(v) {
        Some(i) if v[i] < 0.0 => {
            v.iter_mut().for_each(|x| *x = -*x);
            -1.0
        }
        _ => 1.0,
    }
}

pub fn uniform_unit(n: usize) -> Vec<f64> {
    let x = 1.0 / sqrt(n as f64);
    alloc::vec![x; n]
}
