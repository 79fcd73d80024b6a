// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use multinet_core::decomp::{
    corcondia, corcondia_core, cp_als, fit_sweep, match_columns, subgroup, tophits_rank1, triplets, tucker, CpModel,
    CpOptions, SweepMode, TuckerOptions,
};
use multinet_core::spectral::{hits, PowerOptions};
use multinet_core::tensor::outer3;
use multinet_core::{Error, LayerGraph, Matrix, MultiNet, Tensor3};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::Rng;

/// Factor with a distinct block of heavy entries per column, unit columns.
fn separated_factor(r: &mut StdRng, rows: usize, rank: usize) -> Matrix {
    let mut m = Matrix::from_fn(rows, rank, |i, c| {
        r.gen::<f64>() * 0.5 + if i % rank == c { 2.0 } else { 0.0 }
    });
    for c in 0..rank {
        let col = m.column(c);
        let n = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scaled: Vec<f64> = col.iter().map(|x| x / n).collect();
        m.set_column(c, &scaled);
    }
    m
}

fn build(lambdas: &[f64], a: &Matrix, b: &Matrix, c: &Matrix) -> Tensor3 {
    Tensor3::from_fn((a.rows(), b.rows(), c.rows()), |i, j, k| {
        (0..lambdas.len())
            .map(|r| lambdas[r] * a[(i, r)] * b[(j, r)] * c[(k, r)])
            .sum()
    })
}

struct Exact {
    t: Tensor3,
    lambdas: Vec<f64>,
    a: Matrix,
}

fn exact_tensor(r: &mut StdRng, rank: usize) -> Exact {
    let n = r.gen_range(rank.max(4)..=9);
    let l = r.gen_range(rank..=4);
    let a = separated_factor(r, n, rank);
    let b = separated_factor(r, n, rank);
    let c = separated_factor(r, l, rank);
    let lambdas: Vec<f64> = (0..rank).map(|q| (rank - q) as f64 * 2.0 + r.gen::<f64>()).collect();
    Exact {
        t: build(&lambdas, &a, &b, &c),
        lambdas,
        a,
    }
}

fn tight(rank: usize) -> CpOptions {
    CpOptions {
        rank,
        tol: 1e-14,
        max_iter: 3000,
        restarts: 5,
        seed: 7,
    }
}

#[test]
fn cp_recovers_exact_low_rank_tensors() {
    let mut r = rng(31);
    for case in 0..10 {
        let rank = 2 + case % 2;
        let e = exact_tensor(&mut r, rank);
        let m = cp_als(&e.t, &tight(rank)).unwrap();
        assert!(m.fit >= 1.0 - 1e-8, "case {case}: fit {}", m.fit);
        let mut want = e.lambdas.clone();
        want.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (got, w) in m.lambdas.iter().zip(&want) {
            assert!((got - w).abs() <= 1e-6 * w, "case {case}: {got} vs {w}");
        }
        let matched = match_columns(&e.a, &m.hubs);
        assert_eq!(matched.len(), rank);
        assert!(matched.iter().all(|x| x.2 > 1.0 - 1e-8));
    }
}

#[test]
fn rank_one_cp_agrees_with_tophits() {
    let mut r = rng(32);
    for _ in 0..10 {
        let t = random_tensor(&mut r, (6, 6, 3));
        let m = cp_als(
            &t,
            &CpOptions {
                rank: 1,
                tol: 1e-14,
                max_iter: 2000,
                ..Default::default()
            },
        )
        .unwrap();
        let (tr, info) = tophits_rank1(&t, &PowerOptions::default()).unwrap();
        assert!(info.converged);
        assert!((m.lambdas[0] - tr.weight).abs() < 1e-6 * tr.weight);
        assert!(max_diff(&m.hubs.column(0), &tr.hubs) < 1e-6);
        assert!(max_diff(&m.authorities.column(0), &tr.authorities) < 1e-6);
        assert!(max_diff(&m.topics.column(0), &tr.topics) < 1e-6);
    }
}

#[test]
fn zero_slice_padding_changes_nothing() {
    let mut r = rng(33);
    let e = exact_tensor(&mut r, 2);
    let (ni, nj, nk) = e.t.dims();
    let padded = Tensor3::from_fn((ni, nj, nk + 1), |i, j, k| if k < nk { e.t.at(i, j, k) } else { 0.0 });
    let opts = CpOptions {
        restarts: 1,
        ..tight(2)
    };
    let a = cp_als(&e.t, &opts).unwrap();
    let b = cp_als(&padded, &opts).unwrap();
    assert!(max_diff(&a.lambdas, &b.lambdas) < 1e-8);
    assert!(max_diff(a.hubs.as_slice(), b.hubs.as_slice()) < 1e-8);
    for q in 0..2 {
        assert_eq!(b.topics[(nk, q)], 0.0);
    }
}

#[test]
fn proportional_layers_split_topics() {
    let mut r = rng(34);
    let g = random_layer(&mut r, 8, 0.5, true);
    let c = 3.0;
    let t = Tensor3::from_slices(&[g.weights().scaled(c), g.weights().clone()]).unwrap();
    let m = cp_als(
        &t,
        &CpOptions {
            rank: 1,
            ..Default::default()
        },
    )
    .unwrap();
    let tr = &triplets(&m)[0];
    assert!((tr.topics_l1[0] - c / (c + 1.0)).abs() < 1e-9);
    assert!((tr.topics_l1[1] - 1.0 / (c + 1.0)).abs() < 1e-9);
}

#[test]
fn heavier_block_leads_the_first_subgroup() {
    // nodes 0..4 form a clique in layer 0, nodes 4..8 a lighter one in layer 1
    let n = 8;
    let block = |lo: usize, w: f64| {
        Matrix::from_fn(n, n, |i, j| {
            if i != j && (lo..lo + 4).contains(&i) && (lo..lo + 4).contains(&j) {
                w
            } else {
                0.0
            }
        })
    };
    let t = Tensor3::from_slices(&[block(0, 2.0), block(4, 1.0)]).unwrap();
    let m = cp_als(
        &t,
        &CpOptions {
            rank: 2,
            ..Default::default()
        },
    )
    .unwrap();
    let s = subgroup(&m, 1, 4).unwrap();
    let mut hubs: Vec<usize> = s.hubs.iter().map(|x| x.0).collect();
    hubs.sort();
    assert_eq!(hubs, vec![0, 1, 2, 3]);
    let s2 = subgroup(&m, 2, 4).unwrap();
    let mut auth: Vec<usize> = s2.authorities.iter().map(|x| x.0).collect();
    auth.sort();
    assert_eq!(auth, vec![4, 5, 6, 7]);
    assert_eq!(subgroup(&m, 2, n).unwrap().hubs.len(), n);
    assert!(matches!(
        subgroup(&m, 3, 4),
        Err(Error::FactorIndex { index: 3, rank: 2 })
    ));
}

#[test]
fn tophits_beats_random_rank_one_probes() {
    let mut r = rng(35);
    for _ in 0..5 {
        let t = random_tensor(&mut r, (6, 6, 2));
        let (tr, _) = tophits_rank1(&t, &PowerOptions::default()).unwrap();
        let best = t
            .distance(&outer3(&tr.hubs, &tr.authorities, &tr.topics).scaled(tr.weight))
            .unwrap();
        for _ in 0..100 {
            let (h, a, w) = (unit(&mut r, 6), unit(&mut r, 6), unit(&mut r, 2));
            let probe = outer3(&h, &a, &w);
            let lam = t.inner(&probe).unwrap();
            assert!(best <= t.distance(&probe.scaled(lam)).unwrap() + 1e-12);
        }
    }
}

fn random_orthonormal(r: &mut StdRng, rows: usize, cols: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(rows, cols, |_, _| r.gen_range(-1.0..1.0));
    m.qr().q()
}

#[test]
fn tucker_beats_random_orthonormal_probes() {
    let mut r = rng(36);
    let t = random_tensor(&mut r, (5, 5, 3));
    let m = tucker(
        &t,
        &TuckerOptions {
            dims: (2, 2, 2),
            tol: 1e-12,
            max_iter: 200,
        },
    )
    .unwrap();
    for f in [&m.u, &m.v, &m.w] {
        let g = to_na(f).transpose() * to_na(f);
        assert!((g - DMatrix::identity(2, 2)).abs().max() < 1e-10);
    }
    assert!(m.core.frobenius_norm() <= t.frobenius_norm() + 1e-12);
    let from_na = |x: &DMatrix<f64>| Matrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)]);
    for _ in 0..50 {
        let u = from_na(&random_orthonormal(&mut r, 5, 2));
        let v = from_na(&random_orthonormal(&mut r, 5, 2));
        let w = from_na(&random_orthonormal(&mut r, 3, 2));
        let core = t
            .mode_product(1, &u.transpose())
            .and_then(|x| x.mode_product(2, &v.transpose()))
            .and_then(|x| x.mode_product(3, &w.transpose()))
            .unwrap();
        let approx = core
            .mode_product(1, &u)
            .and_then(|x| x.mode_product(2, &v))
            .and_then(|x| x.mode_product(3, &w))
            .unwrap();
        let probe_fit = 1.0 - t.distance(&approx).unwrap() / t.frobenius_norm();
        assert!(m.fit >= probe_fit - 1e-12);
    }
}

/// Least-squares core from the normal equations of the full Kronecker
/// system `vec(𝒜) ≈ (W ⊗ V ⊗ UΛ)·vec(𝒢)`, with a few rounds of iterative
/// refinement on the true residual (the plain normal equations square the
/// condition number).
fn dense_core(t: &Tensor3, m: &CpModel) -> Vec<f64> {
    let (ni, nj, nk) = t.dims();
    let rank = m.rank;
    let z = DMatrix::from_fn(ni * nj * nk, rank * rank * rank, |row, col| {
        let (i, j, k) = (row % ni, (row / ni) % nj, row / (ni * nj));
        let (p, q, s) = (col % rank, (col / rank) % rank, col / (rank * rank));
        m.lambdas[p] * m.hubs[(i, p)] * m.authorities[(j, q)] * m.topics[(k, s)]
    });
    let y = DVector::from_column_slice(t.as_slice());
    let normal = (z.transpose() * &z).lu();
    let mut g = normal.solve(&(z.transpose() * &y)).unwrap();
    for _ in 0..3 {
        let residual = &y - &z * &g;
        g += normal.solve(&(z.transpose() * residual)).unwrap();
    }
    g.iter().copied().collect()
}

fn percent(core: &[f64], rank: usize) -> f64 {
    let mut ss = 0.0;
    for (idx, g) in core.iter().enumerate() {
        let (p, q, s) = (idx % rank, (idx / rank) % rank, idx / (rank * rank));
        let target = if p == q && q == s { 1.0 } else { 0.0 };
        ss += (g - target).powi(2);
    }
    100.0 * (1.0 - ss / rank as f64)
}

#[test]
fn corcondia_matches_dense_normal_equations() {
    let mut r = rng(37);
    for _ in 0..5 {
        let t = random_tensor(&mut r, (6, 6, 3));
        let m = cp_als(
            &t,
            &CpOptions {
                rank: 3,
                ..Default::default()
            },
        )
        .unwrap();
        let core = corcondia_core(&t, &m).unwrap();
        let oracle = dense_core(&t, &m);
        assert!(max_diff(core.as_slice(), &oracle) < 1e-8);
        let cc = corcondia(&t, &m).unwrap();
        let want = percent(&oracle, 3);
        assert!((cc - want).abs() <= 1e-6 * want.abs().max(100.0), "{cc} vs {want}");
        assert!(cc < 100.0);
    }
}

#[test]
fn corcondia_is_full_for_exact_models() {
    let mut r = rng(38);
    for rank in [1, 2, 3] {
        let e = exact_tensor(&mut r, rank);
        let m = cp_als(&e.t, &tight(rank)).unwrap();
        assert!((corcondia(&e.t, &m).unwrap() - 100.0).abs() < 1e-6);
    }
}

#[test]
fn fit_sweep_plateaus_at_the_true_rank() {
    let mut r = rng(39);
    let e = exact_tensor(&mut r, 3);
    let rows = fit_sweep(&e.t, &[1, 2, 3, 4], &tight(1), SweepMode::Independent).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].fit < rows[1].fit && rows[1].fit < rows[2].fit);
    assert!(rows[2].fit >= 1.0 - 1e-8);
    assert!((rows[3].fit - rows[2].fit).abs() < 1e-6);
    assert!((rows[2].corcondia.unwrap() - 100.0).abs() < 1e-6);
    assert!(rows[0].hub_stability.is_none() && rows[1].hub_stability.is_some());

    let one = fit_sweep(&e.t, &[1], &CpOptions::default(), SweepMode::Independent).unwrap();
    let (tr, _) = tophits_rank1(&e.t, &PowerOptions::default()).unwrap();
    let m1 = cp_als(&e.t, &CpOptions::default()).unwrap();
    assert!((one[0].fit - m1.fit).abs() < 1e-12);
    assert!((m1.lambdas[0] - tr.weight).abs() < 1e-6 * tr.weight);
}

#[test]
fn warm_started_sweep_never_loses_fit() {
    let mut r = rng(40);
    for _ in 0..3 {
        let t = random_tensor(&mut r, (6, 5, 3));
        let opts = CpOptions {
            restarts: 2,
            ..Default::default()
        };
        let rows = fit_sweep(&t, &[1, 2, 3, 4, 5], &opts, SweepMode::WarmStart).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].fit >= w[0].fit - 1e-9, "{} then {}", w[0].fit, w[1].fit);
        }
    }
}

#[test]
fn cp_is_scale_equivariant() {
    let mut r = rng(41);
    let t = random_tensor(&mut r, (5, 5, 2));
    let opts = CpOptions {
        rank: 2,
        ..Default::default()
    };
    let a = cp_als(&t, &opts).unwrap();
    let b = cp_als(&t.scaled(4.0), &opts).unwrap();
    assert!(max_diff(a.hubs.as_slice(), b.hubs.as_slice()) < 1e-8);
    assert!(max_diff(a.topics.as_slice(), b.topics.as_slice()) < 1e-8);
    for (x, y) in a.lambdas.iter().zip(&b.lambdas) {
        assert!((4.0 * x - y).abs() < 1e-8 * y);
    }
}

#[test]
fn model_invariants_hold() {
    let mut r = rng(42);
    let t = random_tensor(&mut r, (6, 5, 3));
    let m = cp_als(
        &t,
        &CpOptions {
            rank: 3,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((m.fit_to(&t).unwrap() - m.fit).abs() < 1e-12);
    assert!(m.lambdas.windows(2).all(|w| w[0] >= w[1]));
    for f in [&m.hubs, &m.authorities, &m.topics] {
        for c in 0..3 {
            let n: f64 = f.column(c).iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
    let tr = triplets(&m);
    assert_eq!(tr.len(), 3);
    assert_eq!(tr[0].factor_index, 1);
    let l1: f64 = tr[0].topics_l1.iter().map(|x| x.abs()).sum();
    assert!((l1 - 1.0).abs() < 1e-12);
}

#[test]
fn tophits_permutation_and_symmetry() {
    let mut r = rng(43);
    let layers = vec![random_layer(&mut r, 9, 0.5, true), random_layer(&mut r, 9, 0.5, true)];
    let net = MultiNet::new(layers).unwrap();
    let t = Tensor3::from_multinet(&net);
    let (tr, _) = tophits_rank1(&t, &PowerOptions::default()).unwrap();
    let perm = [3, 0, 8, 1, 7, 2, 6, 4, 5];
    let pt = Tensor3::from_multinet(&net.permuted(&perm).unwrap())
        .permute_layers(&[1, 0])
        .unwrap();
    let (ptr, _) = tophits_rank1(&pt, &PowerOptions::default()).unwrap();
    for (a, &p) in perm.iter().enumerate() {
        assert!((ptr.hubs[a] - tr.hubs[p]).abs() < 1e-9);
        assert!((ptr.authorities[a] - tr.authorities[p]).abs() < 1e-9);
    }
    assert!((ptr.topics[0] - tr.topics[1]).abs() < 1e-9);

    // every slice symmetric → hubs equal authorities
    let sym: Vec<LayerGraph> = (0..3).map(|_| random_layer(&mut r, 7, 0.6, false)).collect();
    let t = Tensor3::from_multinet(&MultiNet::new(sym).unwrap());
    let (s, _) = tophits_rank1(&t, &PowerOptions::default()).unwrap();
    assert!(max_diff(&s.hubs, &s.authorities) < 1e-9);
}

#[test]
fn single_layer_tophits_is_hits() {
    let mut r = rng(44);
    for _ in 0..10 {
        let g = random_layer(&mut r, 10, 0.4, true);
        let h = hits(&g, &PowerOptions::default()).unwrap();
        if !h.gap_ok {
            continue;
        }
        let t = Tensor3::from_slices(&[g.weights().clone()]).unwrap();
        let (tr, _) = tophits_rank1(&t, &PowerOptions::default()).unwrap();
        assert_eq!(tr.topics, vec![1.0]);
        assert!(max_diff(&tr.hubs, &h.hubs) < 1e-8);
        assert!(max_diff(&tr.authorities, &h.authorities) < 1e-8);
    }
}
