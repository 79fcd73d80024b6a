// SPDX-License-Identifier: Apache-2.0

//! Dense third-order tensors.
//!
//! # Layout
//!
//! Entry `(i, j, k)` of an `I × J × K` tensor lives at offset
//! `i + I·(j + J·k)`: `i` varies fastest, so every frontal slice is a
//! contiguous column-major `I × J` block.
//!
//! # Unfoldings
//!
//! [`Tensor3::mode_unfold`] follows the Kolda–Bader convention, in which the
//! remaining indices enumerate columns with the lower-numbered mode varying
//! fastest:
//!
//! | mode | shape       | column of entry `(i, j, k)` |
//! |------|-------------|-----------------------------|
//! | 1    | `I × (J·K)` | `j + J·k`                   |
//! | 2    | `J × (I·K)` | `i + I·k`                   |
//! | 3    | `K × (I·J)` | `i + I·j`                   |
//!
//! With this ordering a CP tensor with factors `A, B, C` unfolds as
//! `X₍₁₎ = A·(C ⊙ B)ᵀ`, `X₍₂₎ = B·(C ⊙ A)ᵀ` and `X₍₃₎ = C·(B ⊙ A)ᵀ`,
//! where `⊙` is [`khatri_rao`].

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::math;
use crate::netcore::MultiNet;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(i: usize, j: usize, k: usize) -> Self {
        Self {
            dims: (i, j, k),
            data: vec![0.0; i * j * k],
        }
    }

    pub fn from_fn((ni, nj, nk): (usize, usize, usize), mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(ni * nj * nk);
        for k in 0..nk {
            for j in 0..nj {
                for i in 0..ni {
                    data.push(f(i, j, k));
                }
            }
        }
        Self {
            dims: (ni, nj, nk),
            data,
        }
    }

    /// Takes ownership of data already in the documented layout.
    pub fn from_vec(dims: (usize, usize, usize), data: Vec<f64>) -> Result<Self> {
        let expected = dims.0 * dims.1 * dims.2;
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    /// Stacks equally shaped matrices as frontal slices.
    pub fn from_slices(slices: &[Matrix]) -> Result<Self> {
        let first = slices.first().ok_or(Error::EmptyLayers)?;
        let (ni, nj) = (first.rows(), first.cols());
        for s in slices {
            if s.rows() != ni || s.cols() != nj {
                return Err(Error::DimensionMismatch {
                    expected: ni * nj,
                    found: s.rows() * s.cols(),
                });
            }
        }
        Ok(Self::from_fn((ni, nj, slices.len()), |i, j, k| slices[k][(i, j)]))
    }

    /// Adjacency tensor of a multilayer network: `A[i, j, k]` is the weight
    /// of arc `i → j` in layer `k`.
    pub fn from_multinet(m: &MultiNet) -> Self {
        let slices: Vec<Matrix> = m.layers().iter().map(|l| l.weights().clone()).collect();
        Self::from_slices(&slices).expect("a MultiNet has at least one layer of uniform shape")
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Backing storage in the documented layout.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims.0 * (j + self.dims.1 * k)
    }

    /// Entry `(i, j, k)`; `None` when out of range.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Option<f64> {
        let (ni, nj, nk) = self.dims;
        (i < ni && j < nj && k < nk).then(|| self.data[self.offset(i, j, k)])
    }

    /// Entry `(i, j, k)`. Panics when out of range.
    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        let (ni, nj, nk) = self.dims;
        assert!(i < ni && j < nj && k < nk, "tensor index out of range");
        self.data[self.offset(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let (ni, nj, nk) = self.dims;
        assert!(i < ni && j < nj && k < nk, "tensor index out of range");
        let o = self.offset(i, j, k);
        self.data[o] = value;
    }

    /// Nonzero entries as `(i, j, k, value)` in storage order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let (ni, nj, _) = self.dims;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(move |(o, &v)| {
                let i = o % ni;
                let j = (o / ni) % nj;
                let k = o / (ni * nj);
                (i, j, k, v)
            })
    }

    pub fn frontal_slice(&self, k: usize) -> Result<Matrix> {
        let (ni, nj, nk) = self.dims;
        if k >= nk {
            return Err(Error::IndexOutOfRange { index: k, len: nk });
        }
        Ok(Matrix::from_fn(ni, nj, |i, j| self.at(i, j, k)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm2(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Frobenius norm of `self − other`.
    pub fn distance(&self, other: &Tensor3) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(math::distance(&self.data, &other.data))
    }

    pub fn inner(&self, other: &Tensor3) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(math::dot(&self.data, &other.data))
    }

    /// Returns a copy with the frontal slices reordered: new slice `k` is
    /// old slice `perm[k]`.
    pub fn permute_layers(&self, perm: &[usize]) -> Result<Self> {
        let (ni, nj, nk) = self.dims;
        if perm.len() != nk || perm.iter().any(|&p| p >= nk) {
            return Err(Error::DimensionMismatch {
                expected: nk,
                found: perm.len(),
            });
        }
        Ok(Self::from_fn((ni, nj, nk), |i, j, k| self.at(i, j, perm[k])))
    }

    fn check_len(expected: usize, v: &[f64]) -> Result<()> {
        if v.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `𝒜 ×̄₂ a ×̄₃ t`: `out_i = Σ_j Σ_k A[i,j,k]·a_j·t_k`.
    pub fn contract2(&self, a: &[f64], t: &[f64]) -> Result<Vec<f64>> {
        let (ni, nj, nk) = self.dims;
        Self::check_len(nj, a)?;
        Self::check_len(nk, t)?;
        let mut out = vec![0.0; ni];
        for k in 0..nk {
            if t[k] == 0.0 {
                continue;
            }
            for j in 0..nj {
                let c = a[j] * t[k];
                if c == 0.0 {
                    continue;
                }
                let col = &self.data[self.offset(0, j, k)..self.offset(0, j, k) + ni];
                for (o, &x) in out.iter_mut().zip(col) {
                    *o += x * c;
                }
            }
        }
        Ok(out)
    }

    /// `𝒜 ×̄₁ h ×̄₃ t`: `out_j = Σ_i Σ_k A[i,j,k]·h_i·t_k`.
    pub fn contract1(&self, h: &[f64], t: &[f64]) -> Result<Vec<f64>> {
        let (ni, nj, nk) = self.dims;
        Self::check_len(ni, h)?;
        Self::check_len(nk, t)?;
        let mut out = vec![0.0; nj];
        for k in 0..nk {
            if t[k] == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let start = self.offset(0, j, k);
                *o += t[k] * math::dot(&self.data[start..start + ni], h);
            }
        }
        Ok(out)
    }

    /// `𝒜 ×̄₁ h ×̄₂ a`: `out_k = Σ_i Σ_j A[i,j,k]·h_i·a_j`.
    pub fn contract12(&self, h: &[f64], a: &[f64]) -> Result<Vec<f64>> {
        let (ni, nj, nk) = self.dims;
        Self::check_len(ni, h)?;
        Self::check_len(nj, a)?;
        let out = (0..nk)
            .map(|k| {
                (0..nj)
                    .map(|j| {
                        let start = self.offset(0, j, k);
                        a[j] * math::dot(&self.data[start..start + ni], h)
                    })
                    .sum()
            })
            .collect();
        Ok(out)
    }

    /// Mode-`n` matricization (`mode` ∈ {1, 2, 3}); see the module docs for
    /// the column ordering.
    pub fn mode_unfold(&self, mode: usize) -> Result<Matrix> {
        let (ni, nj, nk) = self.dims;
        match mode {
            1 => Ok(Matrix::from_fn(ni, nj * nk, |i, c| self.at(i, c % nj, c / nj))),
            2 => Ok(Matrix::from_fn(nj, ni * nk, |j, c| self.at(c % ni, j, c / ni))),
            3 => Ok(Matrix::from_fn(nk, ni * nj, |k, c| self.at(c % ni, c / ni, k))),
            m => Err(Error::InvalidMode(m)),
        }
    }

    /// Inverse of [`Tensor3::mode_unfold`].
    pub fn refold(m: &Matrix, mode: usize, dims: (usize, usize, usize)) -> Result<Self> {
        let (ni, nj, nk) = dims;
        let (rows, cols) = match mode {
            1 => (ni, nj * nk),
            2 => (nj, ni * nk),
            3 => (nk, ni * nj),
            m => return Err(Error::InvalidMode(m)),
        };
        if m.rows() != rows || m.cols() != cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: m.rows() * m.cols(),
            });
        }
        Ok(Self::from_fn(dims, |i, j, k| match mode {
            1 => m[(i, j + nj * k)],
            2 => m[(j, i + ni * k)],
            _ => m[(k, i + ni * j)],
        }))
    }

    /// n-mode product `𝒜 ×ₙ M` with `M` of shape `P × Iₙ`; mode `n` of the
    /// result has extent `P`.
    pub fn mode_product(&self, mode: usize, m: &Matrix) -> Result<Self> {
        let (ni, nj, nk) = self.dims;
        let extent = match mode {
            1 => ni,
            2 => nj,
            3 => nk,
            x => return Err(Error::InvalidMode(x)),
        };
        if m.cols() != extent {
            return Err(Error::DimensionMismatch {
                expected: extent,
                found: m.cols(),
            });
        }
        let p = m.rows();
        let dims = match mode {
            1 => (p, nj, nk),
            2 => (ni, p, nk),
            _ => (ni, nj, p),
        };
        let mut out = Self::zeros(dims.0, dims.1, dims.2);
        for k in 0..nk {
            for j in 0..nj {
                for i in 0..ni {
                    let x = self.at(i, j, k);
                    if x == 0.0 {
                        continue;
                    }
                    for q in 0..p {
                        let w = m[(
                            q,
                            match mode {
                                1 => i,
                                2 => j,
                                _ => k,
                            },
                        )];
                        let (a, b, c) = match mode {
                            1 => (q, j, k),
                            2 => (i, q, k),
                            _ => (i, j, q),
                        };
                        let o = out.offset(a, b, c);
                        out.data[o] += w * x;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Rank-one tensor `u ∘ v ∘ w` with entries `u_i·v_j·w_k`.
pub fn outer3(u: &[f64], v: &[f64], w: &[f64]) -> Tensor3 {
    Tensor3::from_fn((u.len(), v.len(), w.len()), |i, j, k| u[i] * v[j] * w[k])
}

/// Column-wise Kronecker product. For `A` (`I × R`) and `B` (`J × R`) the
/// result is `(I·J) × R` and column `r` is `a_r ⊗ b_r`: entry `(j + J·i, r)`
/// equals `A[i, r]·B[j, r]`.
pub fn khatri_rao(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            found: b.cols(),
        });
    }
    let nb = b.rows();
    Ok(Matrix::from_fn(a.rows() * nb, a.cols(), |row, r| {
        a[(row / nb, r)] * b[(row % nb, r)]
    }))
}

/// Kronecker product of two column vectors (`u ⊗ v`, `u`'s index slowest).
pub fn kron(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().flat_map(|&x| v.iter().map(move |&y| x * y)).collect()
}
