//! Built-in first-order backend: ADMM operator splitting on
//! `min cᵀx  s.t.  Ax = b, x ∈ K`, alternating an equality-constrained
//! quadratic step (one cached KKT factorization) with a Euclidean projection
//! onto the cone product.

use nalgebra::{DMatrix, DVector};

use crate::problem::{ConeSlice, ConicProblem};
use crate::solution::{ConicSolution, Residuals, SolveStatus};
use crate::ConicError;

const RHO: f64 = 1.0;
const OVER_RELAXATION: f64 = 1.6;

pub(crate) fn solve(
    problem: &ConicProblem,
    tol: f64,
    max_iter: Option<usize>,
) -> Result<ConicSolution, ConicError> {
    let n = problem.num_vars();
    let m = problem.num_eq_rows();
    let max_iter = max_iter.unwrap_or(200_000);

    if n == 0 {
        let feasible = problem.rhs().iter().all(|b| b.abs() <= tol);
        return Ok(ConicSolution {
            status: if feasible {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            },
            x: Vec::new(),
            objective: 0.0,
            residuals: Residuals {
                primal: problem.rhs().iter().fold(0.0, |a, b| a.max(b.abs())),
                dual: 0.0,
                gap: 0.0,
            },
            iterations: 0,
        });
    }

    let mut a = DMatrix::zeros(m, n);
    for &(r, c, v) in problem.triplets() {
        a[(r, c)] += v;
    }
    let b = DVector::from_column_slice(problem.rhs());
    let c = DVector::from_column_slice(problem.objective());

    // KKT system of the x-update:
    //   minimize cᵀx + (ρ/2)‖x − v‖²  s.t.  Ax = b
    //   ⇔ [ρI Aᵀ; A 0][x; y] = [ρv − c; b]
    let kkt_dim = n + m;
    let mut kkt = DMatrix::zeros(kkt_dim, kkt_dim);
    for i in 0..n {
        kkt[(i, i)] = RHO;
    }
    kkt.view_mut((0, n), (n, m)).copy_from(&a.transpose());
    kkt.view_mut((n, 0), (m, n)).copy_from(&a);
    let kkt = kkt.full_piv_lu();
    if !kkt.is_invertible() {
        return Err(ConicError::Backend(
            "singular KKT system (redundant equality rows); use the interior-point backend"
                .into(),
        ));
    }

    let mut x = DVector::zeros(n);
    let mut z = DVector::zeros(n);
    let mut u = DVector::zeros(n);
    let mut rhs = DVector::zeros(kkt_dim);
    let unbounded_scale = 1e10 * (1.0 + b.amax().max(c.amax()));
    const CHECKPOINT_EVERY: usize = 500;
    let mut x_checkpoint = x.clone();

    let mut residuals = Residuals {
        primal: f64::INFINITY,
        dual: f64::INFINITY,
        gap: f64::INFINITY,
    };
    let mut iterations = 0usize;

    for k in 0..max_iter {
        iterations = k + 1;

        for i in 0..n {
            rhs[i] = RHO * (z[i] - u[i]) - c[i];
        }
        for i in 0..m {
            rhs[n + i] = b[i];
        }
        let sol = kkt.solve(&rhs).ok_or_else(|| {
            ConicError::Backend("KKT solve failed unexpectedly".into())
        })?;
        let x_new = sol.rows(0, n).into_owned();
        let y = sol.rows(n, m).into_owned();

        // Over-relaxation accelerates the splitting without changing the
        // fixed points.
        let x_relaxed = &x_new * OVER_RELAXATION + &z * (1.0 - OVER_RELAXATION);
        let z_prev = z.clone();
        z = project_onto_cones(problem, &(&x_relaxed + &u));
        u += &x_relaxed - &z;

        let split = (&x_new - &z).amax();
        let dual_res = RHO * (&z - &z_prev).amax();
        // z is exactly in K, so primal feasibility is the equality residual
        // at z; stationarity gives the dual pair (−y, −ρu).
        let primal_res = (&a * &z - &b).amax();
        let obj = c.dot(&z);
        let dual_obj = -b.dot(&y);
        let gap = (obj - dual_obj).abs() / obj.abs().max(1.0);
        residuals = Residuals {
            primal: primal_res.max(0.0),
            dual: dual_res,
            gap,
        };

        if residuals.within(tol) && split <= tol.max(1e-12) {
            return Ok(ConicSolution {
                status: SolveStatus::Optimal,
                x: z.iter().copied().collect(),
                objective: obj,
                residuals,
                iterations,
            });
        }

        // Unboundedness shows up as steady drift along a recession direction:
        // d with Ad = 0, d in (the recession cone of) K, and cᵀd < 0.
        let drifted = if (k + 1) % CHECKPOINT_EVERY == 0 {
            let d = &x_new - &x_checkpoint;
            x_checkpoint = x_new.clone();
            if d.amax() > 10.0 * (1.0 + b.amax()) {
                let d_hat = &d / d.norm();
                let eq_drift = if m == 0 { 0.0 } else { (&a * &d_hat).amax() };
                let recession: Vec<f64> = d_hat.iter().copied().collect();
                eq_drift <= 1e-7
                    && problem.cone_violation(&recession) <= 1e-7
                    && c.dot(&d_hat) < -1e-9
            } else {
                false
            }
        } else {
            false
        };
        if drifted || x_new.amax() > unbounded_scale {
            return Ok(ConicSolution {
                status: SolveStatus::Unbounded,
                x: x_new.iter().copied().collect(),
                objective: f64::NEG_INFINITY,
                residuals,
                iterations,
            });
        }

        // An infeasible problem drives the splitting to a stalled fixed
        // point with minimal — but nonzero — constraint violation, while
        // the scaled dual variable grows without bound.
        let step = (&x_new - &x).amax().max((&z - &z_prev).amax());
        let stalled = step < 1e-11 * (1.0 + z.amax());
        let violated = split.max(primal_res) > 100.0 * tol;
        if (stalled && violated && k > 100) || u.amax() > unbounded_scale {
            return Ok(ConicSolution {
                status: SolveStatus::Infeasible,
                x: z.iter().copied().collect(),
                objective: obj,
                residuals,
                iterations,
            });
        }

        x = x_new;
    }

    Ok(ConicSolution {
        status: SolveStatus::MaxIter,
        x: z.iter().copied().collect(),
        objective: c.dot(&z),
        residuals,
        iterations,
    })
}

fn project_onto_cones(problem: &ConicProblem, v: &DVector<f64>) -> DVector<f64> {
    let mut out = v.clone();
    let mut at = 0usize;
    for slice in problem.cones() {
        let dim = slice.dim();
        match slice {
            ConeSlice::Free { .. } => {}
            ConeSlice::NonNeg { .. } => {
                for i in at..at + dim {
                    if out[i] < 0.0 {
                        out[i] = 0.0;
                    }
                }
            }
            ConeSlice::PsdTriangle { order } => {
                let s = crate::embed::smat(out.as_slice().get(at..at + dim).unwrap(), *order);
                let eig = s.symmetric_eigen();
                let mut rebuilt = DMatrix::zeros(*order, *order);
                for (idx, lambda) in eig.eigenvalues.iter().enumerate() {
                    if *lambda > 0.0 {
                        let q = eig.eigenvectors.column(idx);
                        rebuilt += q * q.transpose() * *lambda;
                    }
                }
                let packed = crate::embed::svec(&rebuilt);
                out.as_mut_slice()[at..at + dim].copy_from_slice(&packed);
            }
        }
        at += dim;
    }
    out
}
