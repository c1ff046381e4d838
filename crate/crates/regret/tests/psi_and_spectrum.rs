mod common;

use common::{random_blocks, random_complex, random_fir, LoopDims};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regret::{psi_at, psi_spectrum, RegretError};
use sstf::FrequencyGrid;

#[test]
fn psi_vanishes_when_responses_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_complex(&mut rng, 3, 2);
    let sample = psi_at(0.7, &f, &f.clone()).unwrap();
    assert_eq!(sample.omega, 0.7);
    assert!(sample.psi.iter().all(|v| v.norm() == 0.0));
    assert_eq!(sample.lambda_max, 0.0);
}

#[test]
fn psi_is_gramian_when_reference_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = random_complex(&mut rng, 4, 3);
    let zero = DMatrix::from_element(4, 3, Complex64::new(0.0, 0.0));
    let sample = psi_at(0.2, &f, &zero).unwrap();

    let gram = f.adjoint() * &f;
    assert!((&sample.psi - &gram).iter().all(|v| v.norm() < 1e-13));

    // Positive semidefinite: every quadratic form is nonnegative.
    for _ in 0..50 {
        let x = random_complex(&mut rng, 3, 1);
        let quad = (x.adjoint() * &sample.psi * &x)[(0, 0)].re;
        assert!(quad >= -1e-12, "Gramian quadratic form {quad} < 0");
    }

    // The top eigenvalue of F*F is the squared largest singular value.
    let sigma_max = f.svd(false, false).singular_values[0];
    assert!(
        (sample.lambda_max - sigma_max * sigma_max).abs() <= 1e-10 * sigma_max.powi(2).max(1.0),
        "lambda {} vs sigma^2 {}",
        sample.lambda_max,
        sigma_max * sigma_max
    );
}

#[test]
fn lambda_max_matches_complex_eigensolver_oracle() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let f = random_complex(&mut rng, 3, 2);
        let f_hat = random_complex(&mut rng, 3, 2);
        let sample = psi_at(1.1, &f, &f_hat).unwrap();

        // Independent route: nalgebra's Hermitian eigensolver in complex
        // arithmetic, rather than the real symmetric embedding.
        let oracle = sample
            .psi
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            (sample.lambda_max - oracle).abs() <= 1e-10 * oracle.abs().max(1.0),
            "seed {seed}: {} vs oracle {oracle}",
            sample.lambda_max
        );
    }
}

#[test]
fn mismatched_responses_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = random_complex(&mut rng, 2, 2);
    let g = random_complex(&mut rng, 3, 2);
    assert!(matches!(
        psi_at(0.0, &f, &g),
        Err(RegretError::DimensionMismatch(_))
    ));
}

#[test]
fn spectrum_follows_grid_and_closed_loop_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let dims = LoopDims::small();
    let blocks = random_blocks(&mut rng, dims, 0.6);
    let q = random_fir(&mut rng, dims.n_u, dims.n_y, 4, 0.5);
    let q_hat = random_fir(&mut rng, dims.n_u, dims.n_y, 4, 0.5);
    let grid = FrequencyGrid::uniform_half(33);

    let samples = psi_spectrum(&q, &q_hat, &blocks, &grid).unwrap();
    assert_eq!(samples.len(), grid.len());
    for (sample, omega) in samples.iter().zip(grid.iter()) {
        assert_eq!(sample.omega, omega);
        // Rebuild Ψ from the affine closed-loop formula at this frequency.
        let f = blocks.p11().freq_response(omega).unwrap()
            + blocks.p12().freq_response(omega).unwrap()
                * q.freq_response(omega)
                * blocks.p21().freq_response(omega).unwrap();
        let f_hat = blocks.p11().freq_response(omega).unwrap()
            + blocks.p12().freq_response(omega).unwrap()
                * q_hat.freq_response(omega)
                * blocks.p21().freq_response(omega).unwrap();
        let direct = f.adjoint() * &f - f_hat.adjoint() * &f_hat;
        assert!((&sample.psi - direct).iter().all(|v| v.norm() < 1e-11));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The stored gap matrix is Hermitian to the last bit.
    #[test]
    fn psi_output_is_exactly_hermitian(seed in 0u64..1000, rows in 1usize..4, cols in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_complex(&mut rng, rows, cols);
        let f_hat = random_complex(&mut rng, rows, cols);
        let sample = psi_at(0.3, &f, &f_hat).unwrap();
        for i in 0..cols {
            for j in 0..cols {
                prop_assert_eq!(sample.psi[(i, j)], sample.psi[(j, i)].conj());
            }
        }
        prop_assert!(sample.lambda_max.is_finite());
    }
}
