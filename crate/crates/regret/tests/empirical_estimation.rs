mod common;

use common::{random_blocks, random_fir, unit_inf_disturbance, LoopDims};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regret::{empirical_regret, LoopBlocks, RegretError, RegretMethod, SignalNorm};
use sstf::FirTransferMatrix;

/// Test-local convolution: responses computed coefficient-by-coefficient
/// with explicit index arithmetic, independent of the library's routine.
fn convolve(f: &FirTransferMatrix, w: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let total = w.len() + f.order();
    (0..total)
        .map(|t| {
            let mut z = DVector::zeros(f.rows());
            for tau in 0..=f.order().min(t) {
                if t - tau < w.len() {
                    z += f.coeff(tau) * &w[t - tau];
                }
            }
            z
        })
        .collect()
}

#[test]
fn empty_set_reports_no_estimate() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let dims = LoopDims::small();
    let blocks = random_blocks(&mut rng, dims, 0.6);
    let q = random_fir(&mut rng, dims.n_u, dims.n_y, 3, 0.5);
    let q_hat = random_fir(&mut rng, dims.n_u, dims.n_y, 3, 0.5);

    let report = empirical_regret(&q, &q_hat, &blocks, SignalNorm::L2, &[], 30).unwrap();
    assert_eq!(report.value, f64::NEG_INFINITY);
    assert_eq!(report.method, RegretMethod::Empirical);
    assert!(report.achieving_omega.is_none());
    assert!(report.achieving_disturbance.is_none());
}

#[test]
fn gap_matches_direct_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let dims = LoopDims::small();
    let blocks = random_blocks(&mut rng, dims, 0.6);
    let q = random_fir(&mut rng, dims.n_u, dims.n_y, 4, 0.8);
    let q_hat = random_fir(&mut rng, dims.n_u, dims.n_y, 4, 0.8);
    let horizon = 50;
    let w = unit_inf_disturbance(&mut rng, 40, dims.n_w);

    let f = blocks.closed_loop_fir(&q, horizon).unwrap();
    let f_hat = blocks.closed_loop_fir(&q_hat, horizon).unwrap();
    let z = convolve(&f, &w);
    let z_hat = convolve(&f_hat, &w);

    let sq = |z: &[DVector<f64>]| z.iter().map(|v| v.norm_squared()).sum::<f64>();
    let peak = |z: &[DVector<f64>]| {
        z.iter()
            .flat_map(|v| v.iter().map(|x| x.abs()))
            .fold(0.0, f64::max)
    };

    let l2 = empirical_regret(
        &q,
        &q_hat,
        &blocks,
        SignalNorm::L2,
        &[w.clone()],
        horizon,
    )
    .unwrap();
    assert!((l2.value - (sq(&z) - sq(&z_hat))).abs() < 1e-12);

    let linf = empirical_regret(
        &q,
        &q_hat,
        &blocks,
        SignalNorm::LInf,
        &[w.clone()],
        horizon,
    )
    .unwrap();
    assert!((linf.value - (peak(&z) - peak(&z_hat))).abs() < 1e-12);
}

#[test]
fn argmax_disturbance_is_attached() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let dims = LoopDims::small();
    let blocks = random_blocks(&mut rng, dims, 0.6);
    let q = random_fir(&mut rng, dims.n_u, dims.n_y, 4, 0.9);
    let q_hat = random_fir(&mut rng, dims.n_u, dims.n_y, 4, 0.9);
    let horizon = 40;
    let set: Vec<_> = (0..8)
        .map(|_| unit_inf_disturbance(&mut rng, 30, dims.n_w))
        .collect();

    let report =
        empirical_regret(&q, &q_hat, &blocks, SignalNorm::L2, &set, horizon).unwrap();

    // Recompute each gap one disturbance at a time and find the best.
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 0;
    for (k, w) in set.iter().enumerate() {
        let single = empirical_regret(
            &q,
            &q_hat,
            &blocks,
            SignalNorm::L2,
            std::slice::from_ref(w),
            horizon,
        )
        .unwrap();
        if single.value > best {
            best = single.value;
            best_k = k;
        }
    }
    assert_eq!(report.value, best);
    let attached = report.achieving_disturbance.unwrap();
    for (t, w_t) in set[best_k].iter().enumerate() {
        for i in 0..w_t.len() {
            assert_eq!(attached[t][i], w_t[i]);
        }
    }
}

#[test]
fn sample_dimension_is_checked() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let dims = LoopDims::small();
    let blocks = random_blocks(&mut rng, dims, 0.6);
    let q = random_fir(&mut rng, dims.n_u, dims.n_y, 3, 0.5);
    let bad = vec![vec![DVector::from_element(dims.n_w + 1, 1.0)]];
    assert!(matches!(
        empirical_regret(&q, &q.clone(), &blocks, SignalNorm::L2, &bad, 20),
        Err(RegretError::DimensionMismatch(_))
    ));
}

#[test]
fn unstable_blocks_are_rejected_at_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let stable = common::random_stable_ss(&mut rng, 3, 2, 2, 0.5);
    let unstable = common::random_stable_ss(&mut rng, 3, 2, 2, 1.3);
    let err = LoopBlocks::new(unstable, stable.clone(), stable).unwrap_err();
    match err {
        RegretError::UnstableInput(radius) => assert!((radius - 1.3).abs() < 1e-6),
        other => panic!("expected UnstableInput, got {other}"),
    }
}
