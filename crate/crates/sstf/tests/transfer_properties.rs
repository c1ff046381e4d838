use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use sstf::{fir_convolve, FirTransferMatrix, FrequencyGrid, StateSpace};

fn fir_strategy(rows: usize, cols: usize, max_order: usize) -> impl Strategy<Value = FirTransferMatrix> {
    proptest::collection::vec(
        proptest::collection::vec(-2.0f64..2.0, rows * cols),
        1..=max_order + 1,
    )
    .prop_map(move |taps| {
        let coeffs = taps
            .into_iter()
            .map(|flat| DMatrix::from_row_slice(rows, cols, &flat))
            .collect();
        FirTransferMatrix::from_coeffs(coeffs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_holds_on_fine_grid(fir in fir_strategy(2, 2, 5)) {
        let m = 512usize;
        let mut acc = 0.0;
        for k in 0..m {
            let omega = -PI + 2.0 * PI * k as f64 / m as f64;
            let f = fir.freq_response(omega);
            acc += f.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let quad = acc / m as f64;
        let exact = fir.h2_norm_sq();
        let scale = exact.max(1.0);
        prop_assert!((exact - quad).abs() <= 1e-6 * scale,
            "Parseval mismatch: sum {exact}, quadrature {quad}");
    }

    #[test]
    fn h2_norm_dominated_by_l1_and_dominates_nothing_negative(
        fir in fir_strategy(2, 3, 4)
    ) {
        let h2 = fir.h2_norm_sq();
        let l1 = fir.l1_norm();
        prop_assert!(h2 >= 0.0);
        prop_assert!(l1 >= 0.0);
        let zero = fir.coeffs().iter().all(|c| c.iter().all(|&v| v == 0.0));
        prop_assert_eq!(h2 == 0.0, zero);
        prop_assert_eq!(l1 == 0.0, zero);
    }

    #[test]
    fn grid_hinf_is_a_lower_bound_of_l1_sq(fir in fir_strategy(2, 2, 4)) {
        // ‖P‖_H∞ ≤ max row-sum bound: λmax(F*F) ≤ ‖F‖∞-ind² ≤ (√(mn)·L1)².
        // Use the cruder chain ‖P(ω)‖₂² ≤ ‖P(ω)‖_F², which is checkable exactly.
        let grid = FrequencyGrid::uniform_half(33);
        let peak = fir.hinf_norm_sq(&grid);
        let frob_peak = grid
            .iter()
            .map(|w| fir.freq_response(w).iter().map(|v| v.norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max);
        prop_assert!(peak <= frob_peak * (1.0 + 1e-9) + 1e-12);
        prop_assert!(peak >= 0.0);
    }

    #[test]
    fn convolution_matches_response_product(
        x in fir_strategy(2, 2, 3),
        y in fir_strategy(2, 2, 3),
    ) {
        let full = x.order() + y.order();
        let z = fir_convolve(&[&x, &y], full).unwrap();
        for k in 0..16 {
            let omega = -PI + 2.0 * PI * k as f64 / 16.0;
            let lhs = z.freq_response(omega);
            let rhs = x.freq_response(omega) * y.freq_response(omega);
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn truncated_convolution_is_prefix_of_full(
        x in fir_strategy(1, 2, 3),
        y in fir_strategy(2, 1, 3),
    ) {
        let full = fir_convolve(&[&x, &y], x.order() + y.order()).unwrap();
        let cut = fir_convolve(&[&x, &y], 2).unwrap();
        for t in 0..=2 {
            prop_assert!((full.coeff(t) - cut.coeff(t)).norm() < 1e-14);
        }
        prop_assert_eq!(cut.order(), 2);
    }

    #[test]
    fn stable_state_space_norms_agree_with_long_fir(
        a in -0.9f64..0.9,
        b in -2.0f64..2.0,
        c in -2.0f64..2.0,
        d in -2.0f64..2.0,
    ) {
        let sys = StateSpace::new(
            DMatrix::from_element(1, 1, a),
            DMatrix::from_element(1, 1, b),
            DMatrix::from_element(1, 1, c),
            DMatrix::from_element(1, 1, d),
        ).unwrap();
        let fir = sys.to_fir(600);
        let h2_ss = sys.h2_norm_sq(1e-12).unwrap();
        let h2_fir = fir.h2_norm_sq();
        prop_assert!((h2_ss - h2_fir).abs() <= 1e-8 * h2_ss.max(1.0));
        let l1_ss = sys.l1_norm(1e-12).unwrap();
        let l1_fir = fir.l1_norm();
        prop_assert!((l1_ss - l1_fir).abs() <= 1e-8 * l1_ss.max(1.0));
    }

    #[test]
    fn add_scaled_is_linear_in_frequency_domain(
        x in fir_strategy(2, 2, 3),
        y in fir_strategy(2, 2, 4),
        s in -3.0f64..3.0,
    ) {
        let z = x.add_scaled(&y, s).unwrap();
        for k in 0..8 {
            let omega = PI * k as f64 / 7.0;
            let lhs = z.freq_response(omega);
            let rhs = x.freq_response(omega) + y.freq_response(omega).map(|v| v * s);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
