/// Termination status of a conic solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Converged to the configured tolerances.
    Optimal,
    /// The constraint set is empty (primal infeasibility certified or, for
    /// the built-in backend, detected by a stalled minimal-violation fixed
    /// point).
    Infeasible,
    /// The objective is unbounded below over the constraint set.
    Unbounded,
    /// The iteration budget ran out first; primal values hold the best
    /// iterate and residuals describe how far it is from optimality.
    MaxIter,
}

/// Final accuracy measures of a solve.
#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    /// Primal feasibility: equality residual and cone violation.
    pub primal: f64,
    /// Dual feasibility / stationarity residual.
    pub dual: f64,
    /// Relative primal-dual objective gap.
    pub gap: f64,
}

impl Residuals {
    /// True when all three measures are at or below `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.primal <= tol && self.dual <= tol && self.gap <= tol
    }
}

/// Result of a conic solve.
#[derive(Debug, Clone)]
pub struct ConicSolution {
    /// Termination status; `Optimal` guarantees `residuals.within(tol)` for
    /// the tolerance the solve was configured with.
    pub status: SolveStatus,
    /// Primal variable values (best iterate for non-optimal statuses; a ray
    /// or certificate direction for infeasible/unbounded ones).
    pub x: Vec<f64>,
    /// Primal objective value `cᵀx`.
    pub objective: f64,
    /// Final residuals.
    pub residuals: Residuals,
    /// Iterations spent.
    pub iterations: usize,
}
