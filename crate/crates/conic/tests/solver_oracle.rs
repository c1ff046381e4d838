use approx::assert_relative_eq;
use conic::{Backend, ConicProblem, SolveOptions, SolveStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn options(backend: Backend) -> SolveOptions {
    SolveOptions {
        backend,
        tol: Some(1e-8),
        max_iter: None,
    }
}

const BOTH: [Backend; 2] = [Backend::Clarabel, Backend::Builtin];

#[test]
fn lower_bounded_minimum_hits_the_bound() {
    // min x s.t. x ≥ 1, via x − s = 1 with s in the orthant.
    for backend in BOTH {
        let mut p = ConicProblem::new();
        let x = p.add_free_vars(1);
        let s = p.add_nonneg_vars(1);
        p.add_objective_term(x, 1.0);
        p.add_eq_row(&[(x, 1.0), (s, -1.0)], 1.0);
        let sol = p.solve(&options(backend)).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "{backend:?}");
        assert_relative_eq!(sol.x[x], 1.0, epsilon = 1e-6);
        assert_relative_eq!(sol.objective, 1.0, epsilon = 1e-6);
    }
}

#[test]
fn eigenvalue_epigraph_sdp() {
    // min λ s.t. λI − diag(1, 2) ⪰ 0 → λ* = 2.
    for backend in BOTH {
        let mut p = ConicProblem::new();
        let lambda = p.add_free_vars(1);
        let s = p.add_psd_block(2);
        p.add_objective_term(lambda, 1.0);
        let diag = [1.0, 2.0];
        for i in 0..2 {
            for j in i..2 {
                let (idx, scale) = s.entry(i, j);
                if i == j {
                    // S_ii = λ − diag_i
                    p.add_eq_row(&[(idx, scale), (lambda, -1.0)], -diag[i]);
                } else {
                    p.add_eq_row(&[(idx, scale)], 0.0);
                }
            }
        }
        let sol = p.solve(&options(backend)).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "{backend:?}");
        assert_relative_eq!(sol.x[lambda], 2.0, epsilon = 1e-5);
    }
}

#[test]
fn contradictory_bounds_are_infeasible() {
    // x ≥ 1 and x ≤ 0.
    for backend in BOTH {
        let mut p = ConicProblem::new();
        let x = p.add_free_vars(1);
        let s = p.add_nonneg_vars(2);
        p.add_objective_term(x, 1.0);
        p.add_eq_row(&[(x, 1.0), (s, -1.0)], 1.0);
        p.add_eq_row(&[(x, 1.0), (s + 1, 1.0)], 0.0);
        let sol = p.solve(&options(backend)).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible, "{backend:?}");
    }
}

#[test]
fn coordinate_descent_direction_is_unbounded() {
    // min −x s.t. x ≥ 0.
    for backend in BOTH {
        let mut p = ConicProblem::new();
        let x = p.add_nonneg_vars(1);
        p.add_objective_term(x, -1.0);
        let sol = p.solve(&options(backend)).unwrap();
        assert_eq!(sol.status, SolveStatus::Unbounded, "{backend:?}");
    }
}

#[test]
fn schur_complement_completion_sdp() {
    // min S11 s.t. S ⪰ 0, S00 = 1, S01 = 0.3 → S11* = 0.09.
    let mut p = ConicProblem::new();
    let s = p.add_psd_block(2);
    let (i11, m11) = s.entry(1, 1);
    p.add_objective_term(i11, m11);
    let (i00, m00) = s.entry(0, 0);
    p.add_eq_row(&[(i00, m00)], 1.0);
    let (i01, m01) = s.entry(0, 1);
    p.add_eq_row(&[(i01, m01)], 0.3);
    let sol = p.solve(&options(Backend::Clarabel)).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert_relative_eq!(sol.objective, 0.09, epsilon = 1e-5);
}

/// Brute-force LP oracle: minimizes over all vertices of
/// `{x : Gx ≤ h}` by enumerating basis subsets.
fn vertex_enumeration_min(
    g: &nalgebra::DMatrix<f64>,
    h: &nalgebra::DVector<f64>,
    c: &nalgebra::DVector<f64>,
) -> Option<f64> {
    let m = g.nrows();
    let n = g.ncols();
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<usize> = subset.clone();
        let mut gs = nalgebra::DMatrix::zeros(n, n);
        let mut hs = nalgebra::DVector::zeros(n);
        for (k, &r) in rows.iter().enumerate() {
            gs.row_mut(k).copy_from(&g.row(r));
            hs[k] = h[r];
        }
        if let Some(x) = gs.full_piv_lu().solve(&hs) {
            let feasible = (0..m).all(|r| {
                let gx: f64 = g.row(r).transpose().dot(&x);
                gx <= h[r] + 1e-9
            });
            if feasible {
                let obj = c.dot(&x);
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // Next n-combination of {0, …, m−1} in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] != i + m - n {
                subset[i] += 1;
                for j in i + 1..n {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[test]
fn random_lp_objectives_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x00c1_0c1e);
    for trial in 0..20 {
        let n = rng.gen_range(2..=3usize);
        let extra = rng.gen_range(2..=4usize);
        let m = 2 * n + extra;
        // Box rows keep the polytope bounded; extra random cuts pass
        // through a known interior point so the region stays nonempty.
        let mut g = nalgebra::DMatrix::zeros(m, n);
        let mut h = nalgebra::DVector::zeros(m);
        for i in 0..n {
            g[(2 * i, i)] = 1.0;
            h[2 * i] = rng.gen_range(0.5..3.0);
            g[(2 * i + 1, i)] = -1.0;
            h[2 * i + 1] = rng.gen_range(0.5..3.0);
        }
        for r in 2 * n..m {
            for j in 0..n {
                g[(r, j)] = rng.gen_range(-1.0..1.0);
            }
            h[r] = rng.gen_range(0.1..1.5);
        }
        let c = nalgebra::DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0f64));

        let oracle = vertex_enumeration_min(&g, &h, &c)
            .expect("polytope contains the origin, so a vertex optimum exists");

        for backend in BOTH {
            let mut p = ConicProblem::new();
            let x = p.add_free_vars(n);
            let s = p.add_nonneg_vars(m);
            for j in 0..n {
                p.add_objective_term(x + j, c[j]);
            }
            for r in 0..m {
                let mut terms: Vec<(usize, f64)> = (0..n)
                    .filter(|j| g[(r, *j)] != 0.0)
                    .map(|j| (x + j, g[(r, j)]))
                    .collect();
                terms.push((s + r, 1.0));
                p.add_eq_row(&terms, h[r]);
            }
            let sol = p.solve(&options(backend)).unwrap();
            assert_eq!(
                sol.status,
                SolveStatus::Optimal,
                "trial {trial} backend {backend:?}"
            );
            assert!(
                (sol.objective - oracle).abs() <= 1e-6 * oracle.abs().max(1.0),
                "trial {trial} backend {backend:?}: solver {} vs oracle {oracle}",
                sol.objective
            );
        }
    }
}

#[test]
fn solves_are_reentrant_across_threads() {
    let build = |target: f64| {
        let mut p = ConicProblem::new();
        let x = p.add_free_vars(1);
        let s = p.add_nonneg_vars(1);
        p.add_objective_term(x, 1.0);
        p.add_eq_row(&[(x, 1.0), (s, -1.0)], target);
        p
    };
    let handles: Vec<_> = (1..=4)
        .map(|k| {
            let p = build(k as f64);
            std::thread::spawn(move || p.solve(&options(Backend::Clarabel)).unwrap())
        })
        .collect();
    for (k, h) in handles.into_iter().enumerate() {
        let sol = h.join().unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_relative_eq!(sol.objective, (k + 1) as f64, epsilon = 1e-6);
    }
}

#[test]
fn malformed_problems_are_rejected() {
    let mut p = ConicProblem::new();
    let x = p.add_free_vars(1);
    p.add_eq_row(&[(x + 5, 1.0)], 0.0); // index out of range
    assert!(p.solve(&SolveOptions::default()).is_err());

    let mut p = ConicProblem::new();
    let x = p.add_free_vars(1);
    p.add_objective_term(x, f64::NAN);
    assert!(p.solve(&SolveOptions::default()).is_err());
}

#[test]
fn cbf_dump_has_expected_sections() {
    let mut p = ConicProblem::new();
    let lambda = p.add_free_vars(1);
    let s = p.add_psd_block(2);
    p.add_objective_term(lambda, 1.0);
    let (idx, scale) = s.entry(0, 1);
    p.add_eq_row(&[(idx, scale), (lambda, -0.5)], 0.25);
    let text = p.to_cbf_string();
    for section in ["VER", "OBJSENSE", "PSDVAR", "VAR", "CON", "FCOORD", "ACOORD", "BCOORD"] {
        assert!(text.contains(section), "missing section {section}:\n{text}");
    }
    assert!(text.contains("L= 1"));
}

#[test]
fn backend_parsing_and_env_default() {
    assert_eq!(Backend::parse("clarabel").unwrap(), Backend::Clarabel);
    assert_eq!(Backend::parse("BUILTIN").unwrap(), Backend::Builtin);
    assert!(Backend::parse("simplex").is_err());
}
