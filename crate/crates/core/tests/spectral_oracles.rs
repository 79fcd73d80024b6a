// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use multinet_core::spectral::{eigencentrality, hits, hits_matrix, rank1_svd, PowerOptions};
use multinet_core::{Error, LayerGraph, Matrix};
use nalgebra::SymmetricEigen;
use rand::Rng;

/// Principal singular triplet from a dense SVD, with singular values sorted.
fn dense_leading(a: &Matrix) -> (f64, f64, Vec<f64>, Vec<f64>) {
    let svd = to_na(a).svd(true, true);
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| svd.singular_values[y].partial_cmp(&svd.singular_values[x]).unwrap());
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let s1 = svd.singular_values[idx[0]];
    let s2 = svd.singular_values[idx[1]];
    let gap = (s1 * s1 - s2 * s2) / (s1 * s1);
    (
        s1,
        gap,
        u.column(idx[0]).iter().copied().collect(),
        vt.row(idx[0]).iter().copied().collect(),
    )
}

#[test]
fn hits_matches_dense_svd() {
    let mut r = rng(21);
    let mut checked = 0;
    while checked < 40 {
        let n = r.gen_range(10..=30);
        let a = random_matrix(&mut r, n, n);
        let (s1, gap, u, v) = dense_leading(&a);
        if gap < 1e-3 {
            continue;
        }
        let h = hits_matrix(&a, &PowerOptions::default()).unwrap();
        assert!(h.converged && h.gap_ok);
        assert!(sign_aligned_diff(&h.hubs, &u) < 1e-8);
        assert!(sign_aligned_diff(&h.authorities, &v) < 1e-8);
        assert!((h.sigma - s1).abs() < 1e-8 * s1);
        checked += 1;
    }
}

#[test]
fn rank1_of_rectangular_matches_dense_svd() {
    let mut r = rng(22);
    for _ in 0..20 {
        let (rows, cols) = (r.gen_range(2..9), r.gen_range(2..9));
        let a = random_matrix(&mut r, rows, cols);
        let (s1, gap, u, v) = dense_leading(&a);
        if gap < 1e-3 {
            continue;
        }
        let x = rank1_svd(&a, &PowerOptions::default()).unwrap();
        assert!((x.sigma - s1).abs() < 1e-9 * s1);
        assert!(sign_aligned_diff(&x.u, &u) < 1e-8);
        assert!(sign_aligned_diff(&x.v, &v) < 1e-8);
    }
}

fn dense_symmetric(r: &mut rand::rngs::StdRng, n: usize) -> LayerGraph {
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x = r.gen_range(0.05..1.0);
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
    }
    LayerGraph::new("S", labels(n), w, false).unwrap()
}

#[test]
fn eigencentrality_matches_dense_eigenvector() {
    let mut r = rng(23);
    for _ in 0..30 {
        let n = r.gen_range(3..=25);
        let g = if r.gen_bool(0.5) {
            dense_symmetric(&mut r, n)
        } else {
            random_layer(&mut r, n, 0.5, false)
        };
        let eig = SymmetricEigen::new(to_na(g.weights()));
        let (top, _) =
            eig.eigenvalues.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
        let mut sorted: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // skip disconnected graphs whose leading eigenvalue is repeated
        if g.weights().is_zero() || (sorted[0] - sorted[1]) < 1e-6 * sorted[0].abs() {
            continue;
        }
        let oracle: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
        let c = eigencentrality(&g, &PowerOptions::default()).unwrap();
        assert!(c.converged);
        assert!(sign_aligned_diff(&c.scores, &oracle) < 1e-8);
        assert!((c.eigenvalue - sorted[0]).abs() < 1e-8 * sorted[0]);
    }
}

#[test]
fn star_centre_dominates() {
    let n = 5;
    let w = Matrix::from_fn(n, n, |i, j| if (i == 0) != (j == 0) { 1.0 } else { 0.0 });
    let g = LayerGraph::new("S5", labels(n), w, false).unwrap();
    let c = eigencentrality(&g, &PowerOptions::default()).unwrap();
    // centre 1/√2, leaves 1/(2√(n−1)) · √2
    assert!((c.scores[0] - 0.5f64.sqrt()).abs() < 1e-9);
    for x in &c.scores[1..] {
        assert!((x - (0.5f64 / 4.0).sqrt()).abs() < 1e-9);
    }
    assert!((c.eigenvalue - 2.0).abs() < 1e-9);
}

#[test]
fn symmetric_layers_give_equal_hubs_and_authorities() {
    let mut r = rng(24);
    for _ in 0..20 {
        let n = r.gen_range(3..20);
        let g = dense_symmetric(&mut r, n);
        let h = hits(&g, &PowerOptions::default()).unwrap();
        assert!(max_diff(&h.hubs, &h.authorities) <= 1e-10);
        let c = eigencentrality(&g, &PowerOptions::default()).unwrap();
        assert!(max_diff(&h.hubs, &c.scores) <= 1e-9);
    }
}

#[test]
fn scores_are_scale_invariant() {
    let mut r = rng(25);
    for _ in 0..20 {
        let g = random_layer(&mut r, 12, 0.4, true);
        if g.weights().is_zero() {
            continue;
        }
        let c = r.gen_range(0.01..100.0);
        let h1 = hits(&g, &PowerOptions::default()).unwrap();
        let h2 = hits(&g.scaled(1.0 / c), &PowerOptions::default()).unwrap();
        if !h1.gap_ok {
            continue;
        }
        assert!(max_diff(&h1.hubs, &h2.hubs) <= 1e-10);
        assert!(max_diff(&h1.authorities, &h2.authorities) <= 1e-10);
        assert!((h2.sigma - c * h1.sigma).abs() <= 1e-9 * h2.sigma);
    }
}

#[test]
fn errors_are_reported() {
    let z = LayerGraph::new("z", labels(3), Matrix::zeros(3, 3), true).unwrap();
    assert_eq!(hits(&z, &PowerOptions::default()).unwrap_err(), Error::ZeroInput);
    let d = LayerGraph::new(
        "d",
        labels(2),
        Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap(),
        true,
    )
    .unwrap();
    assert!(matches!(
        eigencentrality(&d, &PowerOptions::default()),
        Err(Error::NotSymmetric { .. })
    ));
}
