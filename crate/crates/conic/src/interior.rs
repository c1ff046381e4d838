//! Interior-point backend: translates the variables-in-cones form into the
//! solver's slack form `Ax + s = b, s ∈ K` by pairing the equality system
//! with a zero cone and each coned variable slice with an `s = x` identity
//! row block.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::problem::{ConeSlice, ConicProblem};
use crate::solution::{ConicSolution, Residuals, SolveStatus};
use crate::ConicError;

pub(crate) fn solve(
    problem: &ConicProblem,
    tol: f64,
    max_iter: Option<usize>,
) -> Result<ConicSolution, ConicError> {
    let n = problem.num_vars();
    let m_eq = problem.num_eq_rows();

    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for &(r, c, v) in problem.triplets() {
        rows.push(r);
        cols.push(c);
        vals.push(v);
    }
    let mut b: Vec<f64> = problem.rhs().to_vec();

    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    if m_eq > 0 {
        cones.push(SupportedConeT::ZeroConeT(m_eq));
    }
    // Identity rows −x + s = 0 put each coned slice's variables into the
    // matching slack cone.
    let mut row_at = m_eq;
    let mut var_at = 0usize;
    for slice in problem.cones() {
        let dim = slice.dim();
        match slice {
            ConeSlice::Free { .. } => {}
            ConeSlice::NonNeg { .. } => {
                cones.push(SupportedConeT::NonnegativeConeT(dim));
                for k in 0..dim {
                    rows.push(row_at + k);
                    cols.push(var_at + k);
                    vals.push(-1.0);
                }
                b.extend(std::iter::repeat(0.0).take(dim));
                row_at += dim;
            }
            ConeSlice::PsdTriangle { order } => {
                cones.push(SupportedConeT::PSDTriangleConeT(*order));
                for k in 0..dim {
                    rows.push(row_at + k);
                    cols.push(var_at + k);
                    vals.push(-1.0);
                }
                b.extend(std::iter::repeat(0.0).take(dim));
                row_at += dim;
            }
        }
        var_at += dim;
    }

    let a = CscMatrix::new_from_triplets(row_at, n, rows, cols, vals);
    let p = CscMatrix::zeros((n, n));
    let q: Vec<f64> = problem.objective().to_vec();

    let settings = DefaultSettings {
        verbose: false,
        max_iter: max_iter.unwrap_or(500) as u32,
        tol_feas: tol,
        tol_gap_abs: tol,
        tol_gap_rel: tol,
        ..DefaultSettings::default()
    };

    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings)
        .map_err(|e| ConicError::Backend(format!("solver setup failed: {e}")))?;
    solver.solve();

    let sol = &solver.solution;
    let gap = {
        let scale = sol.obj_val.abs().max(1.0);
        (sol.obj_val - sol.obj_val_dual).abs() / scale
    };
    let residuals = Residuals {
        primal: sol.r_prim,
        dual: sol.r_dual,
        gap,
    };
    let status = match sol.status {
        SolverStatus::Solved => SolveStatus::Optimal,
        SolverStatus::AlmostSolved => {
            if residuals.within(tol) {
                SolveStatus::Optimal
            } else {
                SolveStatus::MaxIter
            }
        }
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            SolveStatus::Infeasible
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            SolveStatus::Unbounded
        }
        SolverStatus::MaxIterations
        | SolverStatus::MaxTime
        | SolverStatus::NumericalError
        | SolverStatus::InsufficientProgress
        | SolverStatus::CallbackTerminated => SolveStatus::MaxIter,
        SolverStatus::Unsolved => {
            return Err(ConicError::Backend("solver returned without running".into()))
        }
    };

    Ok(ConicSolution {
        status,
        x: sol.x.clone(),
        objective: sol.obj_val,
        residuals,
        iterations: sol.iterations as usize,
    })
}
