mod common;

use common::{rel, rng, sign_distance};
use kronten::decomp::{self, CpOptions, Flavor, OdecoOptions};
use kronten::kron::kron;
use kronten::linalg;
use kronten::tensor::StructureKind;
use kronten::{samples, DenseTensor};
use nalgebra::{DMatrix, DVector};

fn rank_one(vs: &[Vec<f64>]) -> DenseTensor {
    vs.iter()
        .map(|v| DenseTensor::from_vector(v))
        .reduce(|a, b| a.outer(&b))
        .unwrap()
}

fn column(m: &DMatrix<f64>, j: usize) -> Vec<f64> {
    m.column(j).iter().copied().collect()
}

#[test]
fn hosvd_ranks_match_unfolding_ranks() {
    let mut r = rng(21);
    let t = samples::uniform(&[3, 4, 2], -1.0, 1.0, &mut r);
    let h = decomp::hosvd(&t).unwrap();
    assert!(rel(&decomp::reconstruct_tucker(&h).unwrap(), &t) <= 1e-10);
    for p in 0..3 {
        assert_eq!(h.factors[p].ncols(), t.unfold(p).unwrap().rank(1e-10));
    }
    assert_eq!(h.core.dims(), &[3, 4, 2]);
    assert!(decomp::validate_hosvd(&h, 1e-8).unwrap());

    // a 2×2×2 tensor of multilinear rank (1, 2, 2)
    let low = rank_one(&[vec![1.0, 2.0], vec![1.0, 0.0], vec![0.5, 1.0]])
        .add(&rank_one(&[vec![1.0, 2.0], vec![0.0, 1.0], vec![1.0, -1.0]]))
        .unwrap();
    let h = decomp::hosvd(&low).unwrap();
    let ranks: Vec<usize> = h.factors.iter().map(|f| f.ncols()).collect();
    assert_eq!(ranks, vec![1, 2, 2]);
    assert!(rel(&decomp::reconstruct_tucker(&h).unwrap(), &low) <= 1e-10);
}

#[test]
fn hosvd_singular_values_of_a_diagonal_tensor() {
    let t = DenseTensor::diagonal(3, &[1.0, -4.0, 2.0]);
    let h = decomp::hosvd(&t).unwrap();
    for sv in &h.mode_singular_values {
        for (a, b) in sv.iter().zip([4.0, 2.0, 1.0]) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
    assert!(h.core.structure_check(StructureKind::Diagonal, 1e-12).unwrap());
}

#[test]
fn cp_recovers_planted_rank_one() {
    let t = rank_one(&[vec![1.0, -2.0, 0.5], vec![0.3, 0.4], vec![2.0, 1.0, -1.0]]);
    let res = decomp::cpd_als(&t, 1, &CpOptions::default()).unwrap();
    assert!(res.fit >= 1.0 - 1e-8);
    assert!(res.decomp.core.structure_check(StructureKind::Diagonal, 0.0).unwrap());
    assert_eq!(res.decomp.flavor, Flavor::Cp);
}

#[test]
fn cp_recovers_planted_rank_two_weights() {
    let mut r = rng(22);
    let qs: Vec<DMatrix<f64>> = (0..3).map(|_| samples::orthogonal_matrix(3, &mut r)).collect();
    let (w1, w2) = (5.0, 1.0);
    let comp = |j: usize| rank_one(&qs.iter().map(|q| column(q, j)).collect::<Vec<_>>());
    let t = comp(0).scaled(w1).add(&comp(1).scaled(w2)).unwrap();
    let res = decomp::cpd_als(&t, 2, &CpOptions { trials: 3, ..CpOptions::default() }).unwrap();
    assert!(res.fit >= 1.0 - 1e-8, "fit {}", res.fit);
    let mut weights: Vec<f64> = (0..2).map(|j| res.decomp.core.at(&[j, j, j]).abs()).collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    assert!((weights[0] - w1).abs() <= 1e-6 && (weights[1] - w2).abs() <= 1e-6, "{weights:?}");
    for (p, q) in qs.iter().enumerate() {
        let f = &res.decomp.factors[p];
        for j in 0..2 {
            let found = (0..2).any(|c| sign_distance(&column(f, c), &column(q, j)) <= 1e-6);
            assert!(found);
        }
    }
}

#[test]
fn cp_errors_never_increase() {
    let mut r = rng(23);
    let t = samples::uniform(&[3, 3, 3], 0.0, 1.0, &mut r);
    let res = decomp::cpd_als(&t, 2, &CpOptions::default()).unwrap();
    assert!(res.errors.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", res.errors);
    assert!((1.0 - res.fit - res.errors.last().unwrap()).abs() <= 1e-12);
}

#[test]
fn kron_of_planted_cp_tensors_fits_at_product_rank() {
    let mut r = rng(24);
    let planted = |r: &mut rand_chacha::ChaCha8Rng| {
        let qs: Vec<DMatrix<f64>> = (0..3).map(|_| samples::orthogonal_matrix(2, r)).collect();
        let comp = |j: usize| rank_one(&qs.iter().map(|q| column(q, j)).collect::<Vec<_>>());
        comp(0).scaled(3.0).add(&comp(1)).unwrap()
    };
    let (b, c) = (planted(&mut r), planted(&mut r));
    let opts = CpOptions { trials: 3, ..CpOptions::default() };
    let (db, dc) = (decomp::cpd_als(&b, 2, &opts).unwrap(), decomp::cpd_als(&c, 2, &opts).unwrap());
    let composed = decomp::kron_compose_tucker(&db.decomp, &dc.decomp, false).unwrap();
    let a = kron(&b, &c).unwrap();
    assert!(rel(&decomp::reconstruct_tucker(&composed).unwrap(), &a) <= 1e-6);
    assert!(composed.core.structure_check(StructureKind::Diagonal, 0.0).unwrap());

    let wb: Vec<f64> = (0..2).map(|j| db.decomp.core.at(&[j, j, j])).collect();
    let wc: Vec<f64> = (0..2).map(|j| dc.decomp.core.at(&[j, j, j])).collect();
    for i in 0..2 {
        for j in 0..2 {
            let d = i * 2 + j;
            assert_eq!(composed.core.at(&[d, d, d]), wb[i] * wc[j]);
        }
    }

    let direct = decomp::cpd_als(&a, 4, &CpOptions { trials: 5, ..CpOptions::default() }).unwrap();
    assert!(direct.fit >= 1.0 - 1e-6, "fit {}", direct.fit);
}

#[test]
fn planted_odeco_is_recovered() {
    let mut r = rng(25);
    for k in [3, 4] {
        let u = samples::orthogonal_matrix(2, &mut r);
        let t = samples::odeco_tensor(&[1.0, -2.0], &u, k);
        let d = decomp::odeco(&t, &OdecoOptions::default()).unwrap();
        assert!(d.is_odeco && d.residual <= 1e-8, "residual {}", d.residual);
        for (j, lambda) in [1.0, -2.0].into_iter().enumerate() {
            let hit = (0..d.values.len()).any(|i| {
                let v = column(&d.vectors, i);
                let flip = if sign_distance(&v, &column(&u, j)) < 1e-6 { 1.0 } else { return false };
                let dot: f64 = v.iter().zip(column(&u, j)).map(|(a, b)| a * b).sum();
                let s = dot.signum() * flip;
                (d.values[i] - lambda * s.powi(k as i32)).abs() <= 1e-8
            });
            assert!(hit, "k={k}: missing planted component {j}");
        }
        assert!(rel(&decomp::reconstruct_odeco(&d), &t) <= 1e-8);
    }
}

#[test]
fn cubic_system_is_odeco_with_negative_values() {
    let b = samples::cubic_system_tensor();
    let d = decomp::odeco(&b, &OdecoOptions::default()).unwrap();
    assert!(d.is_odeco && d.residual <= 1e-6);
    assert_eq!(d.values.len(), 2);
    assert!(d.values.iter().all(|&v| v < 0.0));

    let bb = decomp::kron_compose_odeco(&d, &d).unwrap();
    let mut got = bb.values.clone();
    got.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = d.values.iter().flat_map(|a| d.values.iter().map(move |b| a * b)).collect();
    want.sort_by(f64::total_cmp);
    assert_eq!(got, want);
    assert!(got.iter().all(|&v| v > 0.0));
    let product = kron(&b, &b).unwrap();
    assert!(rel(&decomp::reconstruct_odeco(&bb), &product) <= 1e-6);
    let direct = decomp::odeco(&product, &OdecoOptions::default()).unwrap();
    assert!(direct.is_odeco);

    // the printed 4-decimal coefficients are close to, but not exactly, odeco
    let rounded = decomp::odeco(&samples::cubic_system_tensor_rounded(), &OdecoOptions::default()).unwrap();
    assert!(rounded.residual < 1e-4 && rounded.values.iter().all(|&v| v < 0.0));
}

#[test]
fn tt_of_small_tensors() {
    let mut r = rng(26);
    let t = samples::uniform(&[2, 2, 2], -1.0, 1.0, &mut r);
    let d = decomp::ttd(&t, 0.0).unwrap();
    assert!(rel(&decomp::reconstruct_tt(&d).unwrap(), &t) <= 1e-12);
    assert_eq!((d.ranks[0], d.ranks[3]), (1, 1));

    let one = rank_one(&[vec![1.0, 2.0], vec![3.0, -1.0, 0.5], vec![1.0, 1.0]]);
    let d1 = decomp::ttd(&one, 0.0).unwrap();
    assert_eq!(d1.ranks, vec![1, 1, 1, 1]);

    let c = samples::uniform(&[2, 2, 2], -1.0, 1.0, &mut r);
    let dc = decomp::ttd(&c, 0.0).unwrap();
    let composed = decomp::kron_compose_tt(&d, &dc).unwrap();
    let product = kron(&t, &c).unwrap();
    assert!(rel(&decomp::reconstruct_tt(&composed).unwrap(), &product) <= 1e-12);
    let rank_one_pair = decomp::kron_compose_tt(&d1, &decomp::ttd(&one, 0.0).unwrap()).unwrap();
    assert_eq!(rank_one_pair.ranks, vec![1, 1, 1, 1]);

    // TT of the materialized product never needs more than the product ranks
    let direct = decomp::ttd(&product, 0.0).unwrap();
    assert!(direct.ranks.iter().zip(&composed.ranks).all(|(a, b)| a <= b));
}

#[test]
fn tt_truncation_respects_the_tolerance() {
    let mut r = rng(27);
    let t = samples::uniform(&[4, 4, 4, 4], -1.0, 1.0, &mut r);
    for tol in [0.1, 0.3, 0.6] {
        let d = decomp::ttd(&t, tol).unwrap();
        assert!(rel(&decomp::reconstruct_tt(&d).unwrap(), &t) <= tol + 1e-12);
    }
}

#[test]
fn hosvd_composition_needs_and_gets_a_reorder() {
    let mut r = rng(28);
    let spread = |r: &mut rand_chacha::ChaCha8Rng, hi: f64, lo: f64| {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![hi, lo]));
        let mut t = samples::uniform(&[2, 2, 2], -1.0, 1.0, r);
        for p in 0..3 {
            t = t.mode_product(&(samples::orthogonal_matrix(2, r) * &d), p).unwrap();
        }
        t
    };
    let b = spread(&mut r, 2.0, 1.0);
    let c = spread(&mut r, 10.0, 0.1);
    let (hb, hc) = (decomp::hosvd(&b).unwrap(), decomp::hosvd(&c).unwrap());
    let plain = decomp::kron_compose_tucker(&hb, &hc, false).unwrap();
    assert!(!decomp::is_ordered(&plain.core).unwrap());
    let sorted = decomp::kron_compose_tucker(&hb, &hc, true).unwrap();
    assert!(decomp::validate_hosvd(&sorted, 1e-8).unwrap());
    for (p, sv) in sorted.mode_singular_values.iter().enumerate() {
        let norms = decomp::slice_norms(&sorted.core, p).unwrap();
        for (a, b) in sv.iter().zip(&norms) {
            assert!((a - b).abs() <= 1e-10 * norms[0]);
        }
    }
    let a = kron(&b, &c).unwrap();
    assert!(rel(&decomp::reconstruct_tucker(&sorted).unwrap(), &a) <= 1e-10);
    assert!(rel(&decomp::reconstruct_tucker(&plain).unwrap(), &a) <= 1e-10);
}

#[test]
fn composition_rejects_mixed_flavors() {
    let t = DenseTensor::diagonal(3, &[1.0, 2.0]);
    let h = decomp::hosvd(&t).unwrap();
    let cp = decomp::cpd_als(&t, 2, &CpOptions::default()).unwrap().decomp;
    assert!(decomp::kron_compose_tucker(&h, &cp, true).is_err());
}

#[test]
fn orthonormal_factors_throughout() {
    let mut r = rng(29);
    let t = samples::uniform(&[3, 2, 3], -1.0, 1.0, &mut r);
    for f in decomp::hosvd(&t).unwrap().factors {
        let g = f.transpose() * &f;
        assert!(linalg::max_abs(&(g - DMatrix::identity(f.ncols(), f.ncols()))) <= 1e-12);
    }
}
