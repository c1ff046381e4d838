mod common;

use common::{max_entry_diff, offset_grid, path_graph, random_plant, UniformDims};
use nalgebra::{Complex, DMatrix};
use netgraph::fir_sparsity_mask;
use plant::{
    doubly_coprime, prestabilize, transform_plant, trivial_factorization, NetworkedPlant,
    PlantError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type CMatrix = DMatrix<Complex<f64>>;

fn dims(nodes: usize) -> UniformDims {
    UniformDims {
        nodes,
        x: 2,
        u: 1,
        y: 1,
        w: 1,
        z: 2,
    }
}

/// Small random gains on the plant's pattern, halved until both closed-loop
/// radii are comfortably stable.
fn small_stabilizing_gains(plant: &NetworkedPlant, seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = plant.partitions();
    let graph = plant.graph();
    let mut f = DMatrix::zeros(parts.u.total(), parts.x.total());
    for i in 0..graph.node_count() {
        for j in 0..graph.node_count() {
            if graph.has_edge(j, i) {
                for r in parts.u.range(i) {
                    for c in parts.x.range(j) {
                        f[(r, c)] = rng.gen::<f64>() * 2.0 - 1.0;
                    }
                }
            }
        }
    }
    let mut l = DMatrix::zeros(parts.x.total(), parts.y.total());
    for i in 0..graph.node_count() {
        for r in parts.x.range(i) {
            for c in parts.y.range(i) {
                l[(r, c)] = rng.gen::<f64>() * 2.0 - 1.0;
            }
        }
    }
    let mut scale = 0.25;
    for _ in 0..60 {
        let sr = sstf::spectral_radius(&(plant.a() + plant.b2() * &f * scale));
        let or = sstf::spectral_radius(&(plant.a() + &l * scale * plant.c2()));
        if sr < 0.95 && or < 0.95 {
            return (f * scale, l * scale);
        }
        scale *= 0.5;
    }
    panic!("could not scale gains to stability");
}

fn ev(ss: &sstf::StateSpace, omega: f64) -> CMatrix {
    ss.freq_response(omega).unwrap()
}

#[test]
fn trivial_factorization_matches_the_stable_plant_shortcut() {
    let p = random_plant(31, &path_graph(2), &dims(2), Some(0.8));
    let cf = trivial_factorization(&p).unwrap();
    assert!(cf.identity_residual(&offset_grid(32)).unwrap() < 1e-12);
    let p22 = p.p22_realization();
    for &omega in &offset_grid(7) {
        let id = CMatrix::identity(2, 2);
        assert!(max_entry_diff(&ev(&cf.u_l, omega), &(-id.clone())) < 1e-12);
        assert!(ev(&cf.v_l, omega).iter().all(|v| v.norm() < 1e-12));
        assert!(max_entry_diff(&ev(&cf.n_l, omega), &ev(&p22, omega)) < 1e-12);
        assert!(max_entry_diff(&ev(&cf.m_l, omega), &id) < 1e-12);
        assert!(max_entry_diff(&ev(&cf.u_r, omega), &id) < 1e-12);
        assert!(ev(&cf.v_r, omega).iter().all(|v| v.norm() < 1e-12));
        assert!(max_entry_diff(&ev(&cf.n_r, omega), &(-ev(&p22, omega))) < 1e-12);
        assert!(max_entry_diff(&ev(&cf.m_r, omega), &(-id)) < 1e-12);
    }
}

#[test]
fn trivial_factorization_rejects_unstable_plants() {
    let p = random_plant(32, &path_graph(2), &dims(2), Some(1.1));
    assert!(matches!(
        trivial_factorization(&p),
        Err(PlantError::UnstablePlant(_))
    ));
}

#[test]
fn zero_gain_factorization_reduces_to_the_trivial_one() {
    let p = random_plant(33, &path_graph(2), &dims(2), Some(0.8));
    let n = p.state_dim();
    let (m, q) = (2, 2);
    let cf = doubly_coprime(
        &p,
        &DMatrix::zeros(m, n),
        &DMatrix::zeros(n, q),
    )
    .unwrap();
    let trivial = trivial_factorization(&p).unwrap();
    for &omega in &offset_grid(9) {
        for (general, simple) in [
            (&cf.m_r, &trivial.m_r),
            (&cf.n_r, &trivial.n_r),
            (&cf.v_r, &trivial.v_r),
            (&cf.u_r, &trivial.u_r),
            (&cf.m_l, &trivial.m_l),
            (&cf.n_l, &trivial.n_l),
            (&cf.u_l, &trivial.u_l),
            (&cf.v_l, &trivial.v_l),
        ] {
            assert!(max_entry_diff(&ev(general, omega), &ev(simple, omega)) < 1e-12);
        }
    }
}

#[test]
fn factorization_identity_and_p22_quotient_hold() {
    let p = random_plant(34, &path_graph(3), &dims(3), Some(0.75));
    let (f, l) = small_stabilizing_gains(&p, 340);
    let cf = doubly_coprime(&p, &f, &l).unwrap();
    for factor in [
        &cf.m_r, &cf.n_r, &cf.v_r, &cf.u_r, &cf.m_l, &cf.n_l, &cf.u_l, &cf.v_l,
    ] {
        assert!(factor.is_stable());
    }
    assert!(cf.identity_residual(&offset_grid(32)).unwrap() < 1e-8);

    let p22 = p.p22_realization();
    for &omega in &offset_grid(32) {
        let m_r = ev(&cf.m_r, omega);
        let quotient = ev(&cf.n_r, omega)
            * m_r.clone().try_inverse().expect("M_r invertible on the unit circle");
        assert!(max_entry_diff(&quotient, &ev(&p22, omega)) < 1e-8);
    }
}

#[test]
fn non_stabilizing_gains_are_rejected() {
    let p = random_plant(35, &path_graph(2), &dims(2), Some(1.2));
    let err = doubly_coprime(&p, &DMatrix::zeros(2, 4), &DMatrix::zeros(4, 2)).unwrap_err();
    match err {
        PlantError::NonStabilizing {
            state_radius,
            observer_radius,
        } => {
            assert!((state_radius - 1.2).abs() < 1e-6);
            assert!((observer_radius - 1.2).abs() < 1e-6);
        }
        other => panic!("expected NonStabilizing, got {other}"),
    }
}

#[test]
fn transform_with_trivial_factorization_returns_plant_blocks() {
    let p = random_plant(36, &path_graph(2), &dims(2), Some(0.8));
    let cf = trivial_factorization(&p).unwrap();
    let pt = transform_plant(&p, &cf).unwrap();
    for &omega in &offset_grid(16) {
        assert!(max_entry_diff(&ev(pt.p11(), omega), &ev(&p.p11_realization(), omega)) < 1e-10);
        assert!(max_entry_diff(&ev(pt.p12(), omega), &ev(&p.p12_realization(), omega)) < 1e-10);
        assert!(max_entry_diff(&ev(pt.p21(), omega), &ev(&p.p21_realization(), omega)) < 1e-10);
    }
}

#[test]
fn transformed_blocks_satisfy_their_defining_formulas() {
    let p = random_plant(37, &path_graph(3), &dims(3), Some(0.7));
    let (f, l) = small_stabilizing_gains(&p, 370);
    let cf = doubly_coprime(&p, &f, &l).unwrap();
    let pt = transform_plant(&p, &cf).unwrap();
    let (p11, p12, p21) = (
        p.p11_realization(),
        p.p12_realization(),
        p.p21_realization(),
    );
    for &omega in &offset_grid(32) {
        let v_r = ev(&cf.v_r, omega);
        let m_l = ev(&cf.m_l, omega);
        let m_r = ev(&cf.m_r, omega);
        let p11_w = ev(&p11, omega);
        let p12_w = ev(&p12, omega);
        let p21_w = ev(&p21, omega);
        let expected_11 = &p11_w + &p12_w * &v_r * &m_l * &p21_w;
        let expected_12 = -(&p12_w * &m_r);
        let expected_21 = &m_l * &p21_w;
        assert!(max_entry_diff(&ev(pt.p11(), omega), &expected_11) < 1e-6);
        assert!(max_entry_diff(&ev(pt.p12(), omega), &expected_12) < 1e-6);
        assert!(max_entry_diff(&ev(pt.p21(), omega), &expected_21) < 1e-6);
    }
}

#[test]
fn closing_the_loop_with_zero_parameter_recovers_the_k0_loop() {
    let p = random_plant(38, &path_graph(3), &dims(3), Some(0.7));
    let (f, l) = small_stabilizing_gains(&p, 380);
    let cf = doubly_coprime(&p, &f, &l).unwrap();
    let pt = transform_plant(&p, &cf).unwrap();
    let k0 = cf.k0_realization();
    let p22 = p.p22_realization();
    for &omega in &offset_grid(16) {
        let k0_w = ev(k0, omega);
        let closed = ev(&p.p11_realization(), omega)
            + ev(&p.p12_realization(), omega)
                * &k0_w
                * (CMatrix::identity(3, 3) - ev(&p22, omega) * &k0_w)
                    .try_inverse()
                    .expect("well-posed loop")
                * ev(&p.p21_realization(), omega);
        assert!(max_entry_diff(&ev(pt.p11(), omega), &closed) < 1e-8);

        // K₀ is the right-factor quotient V_r·U_r⁻¹.
        let quotient = ev(&cf.v_r, omega)
            * ev(&cf.u_r, omega).try_inverse().expect("U_r invertible");
        assert!(max_entry_diff(&k0_w, &quotient) < 1e-8);
    }
}

#[test]
fn prestabilized_unstable_plant_factorizes_and_transforms_stably() {
    let p = random_plant(39, &path_graph(3), &dims(3), Some(1.25));
    let gains = prestabilize(&p).unwrap();
    let cf = doubly_coprime(&p, &gains.f, &gains.l).unwrap();
    assert!(cf.identity_residual(&offset_grid(32)).unwrap() < 1e-8);
    let pt = transform_plant(&p, &cf).unwrap();
    assert!(pt.p11().is_stable());
    assert!(pt.p12().is_stable());
    assert!(pt.p21().is_stable());

    let unstable_cf = transform_plant(&p, &trivial_factorization(&random_plant(
        40,
        &path_graph(3),
        &dims(3),
        Some(0.8),
    ))
    .unwrap());
    assert!(matches!(
        unstable_cf,
        Err(PlantError::NonStabilizing { .. })
    ));
}

#[test]
fn observer_controller_markov_parameters_respect_the_network_mask() {
    let graph = path_graph(3);
    let p = random_plant(41, &graph, &dims(3), Some(1.2));
    let gains = prestabilize(&p).unwrap();
    let cf = doubly_coprime(&p, &gains.f, &gains.l).unwrap();
    let horizon = 8;
    let mask = fir_sparsity_mask(
        &graph,
        horizon,
        p.partitions().u.clone(),
        p.partitions().y.clone(),
    );
    let taps = cf.k0_realization().impulse_response(horizon);
    for (t, tap) in taps.iter().enumerate() {
        for r in 0..tap.nrows() {
            for c in 0..tap.ncols() {
                if !mask.is_free_entry(r, c, t) {
                    assert_eq!(
                        tap[(r, c)],
                        0.0,
                        "tap {t} entry ({r}, {c}) escapes the mask"
                    );
                }
            }
        }
    }
    // The controller is not trivially zero.
    assert!(taps.iter().any(|tap| tap.iter().any(|&v| v != 0.0)));
}
