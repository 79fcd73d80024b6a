// SPDX-License-Identifier: Apache-2.0

//! Small dense linear algebra kernel: a row-major [`Matrix`], a symmetric
//! eigensolver (Householder tridiagonalisation followed by implicit QL),
//! and the solves built on top of it.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::math;
use crate::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| columns[c][r]))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[f64]) {
        for (r, &v) in values.iter().enumerate().take(self.rows) {
            self[(r, c)] = v;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm2(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(math::abs(x)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows).map(|r| math::dot(self.row(r), x)).collect())
    }

    /// `selfᵀ · x`
    pub fn t_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o += a * xr;
            }
        }
        Ok(out)
    }

    /// `selfᵀ · self`
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            for a in 0..self.cols {
                let x = row[a];
                if x == 0.0 {
                    continue;
                }
                for b in a..self.cols {
                    g.data[a * self.cols + b] += x * row[b];
                }
            }
        }
        for a in 0..self.cols {
            for b in 0..a {
                g.data[a * self.cols + b] = g.data[b * self.cols + a];
            }
        }
        g
    }

    /// `self · selfᵀ`
    pub fn outer_gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.rows, self.rows);
        for a in 0..self.rows {
            for b in a..self.rows {
                let v = math::dot(self.row(a), self.row(b));
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        g
    }

    /// Elementwise product.
    pub fn hadamard(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    /// Largest absolute asymmetry `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> Option<(usize, usize, f64)> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = math::abs(self[(i, j)] - self[(j, i)]);
                if d > worst.map_or(0.0, |w| w.2) {
                    worst = Some((i, j, d));
                }
            }
        }
        worst
    }

    /// Keeps the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.rows, k, |r, c| self[(r, c)])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, matching `values`.
    pub vectors: Matrix,
}

/// Symmetric eigendecomposition. Only the lower triangle is trusted to be
/// consistent with the upper one; callers pass symmetric matrices.
pub fn sym_eigen(a: &Matrix) -> Result<SymEigen> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e);

    // tql2 leaves ascending order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).unwrap_or(core::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}

fn tred2(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += math::abs(*dk);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = math::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql2(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(math::abs(d[l]) + math::abs(e[l]));
        let mut m = l;
        while m < n {
            if math::abs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] is zero so m < n always holds here
        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = math::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = math::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if math::abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// The `k` leading left singular vectors of `a` (columns of the result),
/// taken from the eigenvectors of `a·aᵀ`. Signs follow the largest-magnitude
/// entry convention.
pub fn leading_left_singular_vectors(a: &Matrix, k: usize) -> Result<Matrix> {
    if k > a.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            found: k,
        });
    }
    let eig = sym_eigen(&a.outer_gram())?;
    let mut out = eig.vectors.leading_columns(k);
    for c in 0..k {
        let mut col = out.column(c);
        math::fix_sign(&mut col);
        out.set_column(c, &col);
    }
    Ok(out)
}

/// Moore–Penrose pseudo-inverse through the eigendecomposition of `aᵀa`.
/// Eigenvalues below `rcond · λ_max` are treated as zero.
pub fn pinv(a: &Matrix, rcond: f64) -> Result<Matrix> {
    let g = a.gram();
    let eig = sym_eigen(&g)?;
    let lmax = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let n = g.rows();
    // (aᵀa)⁺ = Q diag(1/λ) Qᵀ
    let mut ginv = Matrix::zeros(n, n);
    for (idx, &l) in eig.values.iter().enumerate() {
        if l <= rcond * lmax || l <= 0.0 {
            continue;
        }
        for r in 0..n {
            let qr = eig.vectors[(r, idx)] / l;
            if qr == 0.0 {
                continue;
            }
            for c in 0..n {
                ginv[(r, c)] += qr * eig.vectors[(c, idx)];
            }
        }
    }
    ginv.matmul(&a.transpose())
}

/// Outcome of a regularised symmetric solve.
#[derive(Debug, Clone)]
pub struct SpdSolve {
    /// Solution `X` of `X · G = M`.
    pub solution: Matrix,
    /// Condition number estimate of `G` before regularisation.
    pub condition: f64,
    /// True when the ridge had to be added.
    pub ridged: bool,
}

/// Condition number above which [`solve_right_spd`] adds a ridge.
pub const RIDGE_CONDITION_LIMIT: f64 = 1e12;
/// Ridge size relative to the trace of the system matrix.
pub const RIDGE_RELATIVE: f64 = 1e-12;

/// Solves `X · G = M` for a symmetric positive semi-definite `G`. When the
/// condition number of `G` exceeds [`RIDGE_CONDITION_LIMIT`], the system is
/// regularised with `RIDGE_RELATIVE · trace(G)` on the diagonal.
pub fn solve_right_spd(m: &Matrix, g: &Matrix) -> Result<SpdSolve> {
    if !g.is_square() || m.cols() != g.rows() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            found: m.cols(),
        });
    }
    let n = g.rows();
    let eig = sym_eigen(g)?;
    let lmax = eig.values.first().copied().unwrap_or(0.0);
    let lmin = eig.values.last().copied().unwrap_or(0.0);
    let condition = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
    let ridged = condition > RIDGE_CONDITION_LIMIT;
    let ridge = if ridged { RIDGE_RELATIVE * g.trace() } else { 0.0 };
    // X = M Q diag(1/(λ+ridge)) Qᵀ
    let mq = m.matmul(&eig.vectors)?;
    let mut scaled = mq;
    for c in 0..n {
        let l = eig.values[c] + ridge;
        let inv = if l > 0.0 { 1.0 / l } else { 0.0 };
        for r in 0..scaled.rows() {
            scaled[(r, c)] *= inv;
        }
    }
    let solution = scaled.matmul(&eig.vectors.transpose())?;
    Ok(SpdSolve {
        solution,
        condition,
        ridged,
    })
}

/// Gram–Schmidt orthonormalisation of the columns (twice, for stability).
/// Dependent columns are replaced by zero.
pub fn orthonormalize_columns(a: &Matrix) -> Matrix {
    let mut cols: Vec<Vec<f64>> = (0..a.cols()).map(|c| a.column(c)).collect();
    for c in 0..cols.len() {
        for _ in 0..2 {
            for p in 0..c {
                let proj = math::dot(&cols[p], &cols[c]);
                let (head, tail) = cols.split_at_mut(c);
                for (x, y) in tail[0].iter_mut().zip(&head[p]) {
                    *x -= proj * y;
                }
            }
        }
        let n = math::norm2(&cols[c]);
        if n > 1e-12 {
            cols[c].iter_mut().for_each(|x| *x /= n);
        } else {
            cols[c].iter_mut().for_each(|x| *x = 0.0);
        }
    }
    Matrix::from_fn(a.rows(), a.cols(), |r, c| cols[c][r])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        math::abs(a - b) <= tol
    }

    #[test]
    fn eigen_of_diagonal_is_sorted_descending() {
        let a = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 2.0]]).unwrap();
        let e = sym_eigen(&a).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert!(close(math::abs(e.vectors[(1, 0)]), 1.0, 1e-15));
    }

    #[test]
    fn eigen_of_path_graph() {
        let a = Matrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        let e = sym_eigen(&a).unwrap();
        let s2 = math::sqrt(2.0);
        assert!(close(e.values[0], s2, 1e-14));
        assert!(close(e.values[1], 0.0, 1e-14));
        assert!(close(e.values[2], -s2, 1e-14));
        // A v = λ v for every pair
        for k in 0..3 {
            let v = e.vectors.column(k);
            let av = a.matvec(&v).unwrap();
            for i in 0..3 {
                assert!(close(av[i], e.values[k] * v[i], 1e-13));
            }
        }
    }

    #[test]
    fn eigen_one_by_one_and_empty() {
        let e = sym_eigen(&Matrix::from_rows(&[[4.5]]).unwrap()).unwrap();
        assert_eq!(e.values, vec![4.5]);
        assert!(sym_eigen(&Matrix::zeros(0, 0)).unwrap().values.is_empty());
        assert!(sym_eigen(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn pinv_of_tall_full_rank_is_left_inverse() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 7.0]]).unwrap();
        let p = pinv(&a, 1e-12).unwrap();
        let i = p.matmul(&a).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!(close(i[(r, c)], if r == c { 1.0 } else { 0.0 }, 1e-10));
            }
        }
    }

    #[test]
    fn spd_solve_recovers_solution() {
        let g = Matrix::from_rows(&[[4.0, 1.0], [1.0, 3.0]]).unwrap();
        let x = Matrix::from_rows(&[[1.0, -2.0], [0.5, 0.25]]).unwrap();
        let m = x.matmul(&g).unwrap();
        let s = solve_right_spd(&m, &g).unwrap();
        assert!(!s.ridged);
        for r in 0..2 {
            for c in 0..2 {
                assert!(close(s.solution[(r, c)], x[(r, c)], 1e-13));
            }
        }
    }

    #[test]
    fn singular_system_is_ridged() {
        let g = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let m = Matrix::from_rows(&[[2.0, 2.0]]).unwrap();
        let s = solve_right_spd(&m, &g).unwrap();
        assert!(s.ridged);
        assert!(s.solution.as_slice().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let q = orthonormalize_columns(&a);
        assert!(close(math::norm2(&q.column(0)), 1.0, 1e-15));
        assert!(q.column(1).iter().all(|&x| x == 0.0));
        assert!(close(math::norm2(&q.column(2)), 1.0, 1e-15));
    }
}
