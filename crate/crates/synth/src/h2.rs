use conic::{ConicProblem, SolveOptions, SolveStatus};
use nalgebra::{DMatrix, DVector};
use netgraph::FirSparsityMask;
use num_complex::Complex64;
use sstf::FirTransferMatrix;

use crate::assemble::group_pairs;
use crate::plant_form::SynthesisPlant;
use crate::SynthError;

/// Outcome of the quadratic (H2) synthesis.
pub(crate) struct H2Solution {
    pub q: FirTransferMatrix,
    pub objective: f64,
    pub fallback_used: bool,
}

/// Minimizes the infinite-horizon impulse energy
/// `‖P11 + P12·Q·P21‖²` over masked FIR coefficients.
///
/// The normal equations are formed in closed form: the Gram matrix of the
/// coefficient directions and the cross terms against `P11` are
/// circle integrals of rational functions, evaluated with the periodic
/// trapezoid rule whose node count is chosen from the blocks' spectral
/// radius so the quadrature error is below machine precision (the
/// integrand is analytic in an annulus, making the rule geometrically
/// convergent). A Cholesky solve of the Gram matrix gives the minimizer;
/// if the Gram matrix is singular (structurally dead coefficient
/// directions), a semidefinite epigraph program over the nonzero
/// eigendirections is solved instead.
pub(crate) fn solve_h2(
    plant: &SynthesisPlant,
    mask: &FirSparsityMask,
    solver_tol: f64,
) -> Result<H2Solution, SynthError> {
    let blocks = plant.blocks();
    let coords = mask.free_scalar_coords();
    let nq = coords.len();
    let f = mask.horizon();
    let pairs = group_pairs(&coords, 0);
    let np = pairs.len();

    // Map each coefficient to its (matrix-position, delay) indices.
    let mut pair_of = vec![0usize; nq];
    let mut tau_of = vec![0usize; nq];
    for (pi, (_rc, taps)) in pairs.iter().enumerate() {
        for &(t, v) in taps {
            pair_of[v] = pi;
            tau_of[v] = t;
        }
    }

    let rho = blocks
        .p11()
        .spectral_radius()
        .max(blocks.p12().spectral_radius())
        .max(blocks.p21().spectral_radius());
    let n_quad = quad_nodes(rho);

    // Accumulators: correlation[(pi·np + pj)·(2f+1) + f + d] holds the
    // circle integral of A[u,u']·B[y',y]·e^{jωd}; cross[pi·(f+1) + τ] the
    // integral of (P12†·P11·P21†)[u,y]·e^{jωτ}; c0 the energy of P11.
    let width = 2 * f + 1;
    let mut correlation = vec![Complex64::new(0.0, 0.0); np * np * width];
    let mut cross = vec![Complex64::new(0.0, 0.0); np * (f + 1)];
    let mut c0 = 0.0f64;

    let half = n_quad / 2;
    for k in 0..=half {
        let omega = std::f64::consts::TAU * k as f64 / n_quad as f64;
        let wq = if k == 0 || k == half { 1.0 } else { 2.0 } / n_quad as f64;
        let p11 = blocks.p11().freq_response(omega)?;
        let p12 = blocks.p12().freq_response(omega)?;
        let p21 = blocks.p21().freq_response(omega)?;
        let a_gram = p12.adjoint() * &p12;
        let b_gram = &p21 * p21.adjoint();
        let t_cross = p12.adjoint() * &p11 * p21.adjoint();
        c0 += wq * p11.norm_squared();

        let mut phasor = Vec::with_capacity(f + 1);
        let mut ph = Complex64::new(1.0, 0.0);
        let step = Complex64::new(0.0, omega).exp();
        for _ in 0..=f {
            phasor.push(ph);
            ph *= step;
        }

        for (pi, pair_i) in pairs.iter().enumerate() {
            let (u, y) = pair_i.0;
            for tau in 0..=f {
                cross[pi * (f + 1) + tau] += wq * t_cross[(u, y)] * phasor[tau];
            }
            for (pj, pair_j) in pairs.iter().enumerate() {
                let (u2, y2) = pair_j.0;
                let kernel = a_gram[(u, u2)] * b_gram[(y2, y)];
                let base = (pi * np + pj) * width;
                correlation[base + f] += wq * kernel;
                for d in 1..=f {
                    let rot = kernel * phasor[d];
                    correlation[base + f + d] += wq * rot;
                    correlation[base + f - d] += wq * (kernel * phasor[d].conj());
                }
            }
        }
    }

    // Dense normal equations from the correlation tables.
    let mut gram = DMatrix::zeros(nq, nq);
    let mut rhs = DVector::zeros(nq);
    for vi in 0..nq {
        rhs[vi] = cross[pair_of[vi] * (f + 1) + tau_of[vi]].re;
        for vj in 0..nq {
            let d = f + tau_of[vi] - tau_of[vj];
            gram[(vi, vj)] = correlation[(pair_of[vi] * np + pair_of[vj]) * width + d].re;
        }
    }

    let (values, fallback_used) = match solve_normal_equations(&gram, &rhs) {
        Some(values) => (values, false),
        None => (solve_epigraph_fallback(&gram, &rhs, solver_tol)?, true),
    };
    let q_vec = DVector::from_vec(values.clone());
    let objective = c0 + 2.0 * rhs.dot(&q_vec) + (&gram * &q_vec).dot(&q_vec);
    let q = FirTransferMatrix::from_free_values(mask, &values)?;
    Ok(H2Solution { q, objective, fallback_used })
}

/// Periodic-trapezoid node count giving quadrature error below roundoff for
/// poles no closer to the unit circle than `1/rho`.
fn quad_nodes(rho: f64) -> usize {
    if !(rho > 0.5) {
        return 1024;
    }
    let needed = (1e-18f64.ln() / rho.ln()).ceil();
    let mut n = 1024usize;
    while (n as f64) < needed && n < 65536 {
        n *= 2;
    }
    n
}

/// Cholesky route with a residual check; `None` signals the fallback.
fn solve_normal_equations(gram: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<Vec<f64>> {
    let chol = gram.clone().cholesky()?;
    let solution = chol.solve(&-rhs);
    let residual = (gram * &solution + rhs).norm();
    if residual <= 1e-7 * (rhs.norm() + 1.0) {
        Some(solution.as_slice().to_vec())
    } else {
        None
    }
}

/// Degenerate-Gram route: project onto the eigendirections with
/// significantly positive curvature and solve the quadratic epigraph as a
/// small semidefinite program
/// `min s  s.t.  [[I, Λ^{1/2}y + Λ^{−1/2}b̃], [·ᵀ, s]] ⪰ 0`,
/// then map back (coefficients outside the retained span stay zero).
fn solve_epigraph_fallback(
    gram: &DMatrix<f64>,
    rhs: &DVector<f64>,
    solver_tol: f64,
) -> Result<Vec<f64>, SynthError> {
    let nq = gram.nrows();
    let sym = (gram + gram.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 100 * nq + 1024)
        .ok_or_else(|| SynthError::Solver("Gram eigendecomposition did not converge".into()))?;
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = lambda_max.max(1.0) * 1e-12;
    let kept: Vec<usize> = (0..nq).filter(|&i| eig.eigenvalues[i] > cutoff).collect();
    if kept.is_empty() {
        return Ok(vec![0.0; nq]);
    }
    let r = kept.len();
    let mut sqrt_l = Vec::with_capacity(r);
    let mut w = Vec::with_capacity(r);
    for &i in &kept {
        let col = eig.eigenvectors.column(i);
        let li = eig.eigenvalues[i];
        sqrt_l.push(li.sqrt());
        w.push(rhs.dot(&col) / li.sqrt());
    }

    let mut problem = ConicProblem::new();
    let y0 = problem.add_free_vars(r);
    let psd = problem.add_psd_block(r + 1);
    for i in 0..r {
        for j in i..r {
            let (idx, mult) = psd.entry(i, j);
            let rhs_val = if i == j { 1.0 } else { 0.0 };
            problem.add_eq_row(&[(idx, mult)], rhs_val);
        }
    }
    for i in 0..r {
        let (idx, mult) = psd.entry(i, r);
        problem.add_eq_row(&[(idx, mult), (y0 + i, -sqrt_l[i])], w[i]);
    }
    let (s_idx, _) = psd.entry(r, r);
    problem.add_objective_term(s_idx, 1.0);
    let options = SolveOptions { tol: Some(solver_tol), ..SolveOptions::default() };
    let solution = problem
        .solve(&options)
        .map_err(|e| SynthError::Solver(format!("H2 epigraph program: {e}")))?;
    match solution.status {
        SolveStatus::Optimal | SolveStatus::MaxIter => {}
        other => {
            return Err(SynthError::Solver(format!(
                "H2 epigraph program ended with status {other:?}"
            )))
        }
    }
    let mut values = vec![0.0; nq];
    for (slot, &i) in kept.iter().enumerate() {
        let yi = solution.x[y0 + slot];
        for row in 0..nq {
            values[row] += eig.eigenvectors[(row, i)] * yi;
        }
    }
    Ok(values)
}
