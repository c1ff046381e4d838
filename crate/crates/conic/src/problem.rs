use std::fmt::Write as _;

use crate::solution::ConicSolution;
use crate::{ConicError, SolveOptions};

/// One factor of the variable cone `K`, covering a contiguous slice of the
/// flat variable vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeSlice {
    /// Unconstrained variables.
    Free {
        /// Number of variables in the slice.
        dim: usize,
    },
    /// Entrywise nonnegative variables.
    NonNeg {
        /// Number of variables in the slice.
        dim: usize,
    },
    /// A PSD matrix block of the given order, stored as its scaled upper
    /// triangle stacked column-wise (off-diagonal entries multiplied by √2),
    /// occupying `order·(order+1)/2` variables.
    PsdTriangle {
        /// Matrix order of the block.
        order: usize,
    },
}

impl ConeSlice {
    /// Number of flat variables the slice occupies.
    pub fn dim(&self) -> usize {
        match *self {
            ConeSlice::Free { dim } | ConeSlice::NonNeg { dim } => dim,
            ConeSlice::PsdTriangle { order } => order * (order + 1) / 2,
        }
    }
}

/// Handle to a PSD matrix block inside a [`ConicProblem`].
#[derive(Debug, Clone, Copy)]
pub struct PsdVar {
    start: usize,
    order: usize,
}

impl PsdVar {
    /// Matrix order of the block.
    pub fn order(&self) -> usize {
        self.order
    }

    /// First flat variable index of the block's scaled triangle.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Number of flat variables in the block.
    pub fn svec_len(&self) -> usize {
        self.order * (self.order + 1) / 2
    }

    /// Flat variable index and multiplier `m` such that the matrix entry
    /// `S[(i, j)]` equals `m · x[index]` under the scaled-triangle storage
    /// (`m = 1` on the diagonal, `1/√2` off it).
    pub fn entry(&self, i: usize, j: usize) -> (usize, f64) {
        assert!(i < self.order && j < self.order, "PSD entry out of range");
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let index = self.start + c * (c + 1) / 2 + r;
        let m = if r == c { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
        (index, m)
    }
}

/// A conic program `min cᵀx  s.t.  Ax = b, x ∈ K` with `K` assembled from
/// [`ConeSlice`] factors in variable order.
///
/// Variables only come into existence through the `add_*` methods, so every
/// variable is covered by exactly one cone factor by construction.
///
/// # Examples
/// ```
/// use conic::{Backend, ConicProblem, SolveOptions, SolveStatus};
/// // min x  s.t.  x − s = 1, s ≥ 0   (i.e. x ≥ 1)
/// let mut p = ConicProblem::new();
/// let x = p.add_free_vars(1);
/// let s = p.add_nonneg_vars(1);
/// p.add_objective_term(x, 1.0);
/// p.add_eq_row(&[(x, 1.0), (s, -1.0)], 1.0);
/// let sol = p.solve(&SolveOptions::with_backend(Backend::Clarabel)).unwrap();
/// assert_eq!(sol.status, SolveStatus::Optimal);
/// assert!((sol.x[x] - 1.0).abs() < 1e-7);
/// ```
#[derive(Debug, Clone, Default)]
pub struct ConicProblem {
    objective: Vec<f64>,
    triplets: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
    cones: Vec<ConeSlice>,
}

impl ConicProblem {
    /// An empty problem with no variables or constraints.
    pub fn new() -> Self {
        Self::default()
    }

    /// Total number of flat variables.
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Number of equality constraint rows.
    pub fn num_eq_rows(&self) -> usize {
        self.rhs.len()
    }

    /// Cone factors in variable order.
    pub fn cones(&self) -> &[ConeSlice] {
        &self.cones
    }

    /// Objective coefficient vector `c`.
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    /// Equality right-hand side `b`.
    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Sparse triplets `(row, col, value)` of the equality matrix `A`.
    pub fn triplets(&self) -> &[(usize, usize, f64)] {
        &self.triplets
    }

    /// True when any cone factor is a PSD block.
    pub fn has_psd(&self) -> bool {
        self.cones
            .iter()
            .any(|c| matches!(c, ConeSlice::PsdTriangle { .. }))
    }

    fn add_slice(&mut self, slice: ConeSlice) -> usize {
        let start = self.num_vars();
        self.objective.resize(start + slice.dim(), 0.0);
        self.cones.push(slice);
        start
    }

    /// Appends `dim` free variables; returns the first flat index.
    pub fn add_free_vars(&mut self, dim: usize) -> usize {
        self.add_slice(ConeSlice::Free { dim })
    }

    /// Appends `dim` nonnegative variables; returns the first flat index.
    pub fn add_nonneg_vars(&mut self, dim: usize) -> usize {
        self.add_slice(ConeSlice::NonNeg { dim })
    }

    /// Appends a PSD block of the given order; returns its handle.
    pub fn add_psd_block(&mut self, order: usize) -> PsdVar {
        let start = self.add_slice(ConeSlice::PsdTriangle { order });
        PsdVar { start, order }
    }

    /// Accumulates `coeff` onto the objective coefficient of variable `var`.
    pub fn add_objective_term(&mut self, var: usize, coeff: f64) {
        self.objective[var] += coeff;
    }

    /// Appends the equality row `Σ terms·x = rhs`; returns its row index.
    /// Repeated indices within `terms` accumulate.
    pub fn add_eq_row(&mut self, terms: &[(usize, f64)], rhs: f64) -> usize {
        let row = self.rhs.len();
        self.rhs.push(rhs);
        for &(col, val) in terms {
            if val != 0.0 {
                self.triplets.push((row, col, val));
            }
        }
        row
    }

    /// Structural validation: index ranges and finiteness of all data.
    pub fn validate(&self) -> Result<(), ConicError> {
        let n = self.num_vars();
        let m = self.num_eq_rows();
        if let Some(&c) = self.objective.iter().find(|c| !c.is_finite()) {
            return Err(ConicError::BadProblem(format!(
                "non-finite objective coefficient {c}"
            )));
        }
        if let Some(&b) = self.rhs.iter().find(|b| !b.is_finite()) {
            return Err(ConicError::BadProblem(format!(
                "non-finite right-hand side {b}"
            )));
        }
        for &(row, col, val) in &self.triplets {
            if row >= m || col >= n {
                return Err(ConicError::BadProblem(format!(
                    "triplet ({row}, {col}) outside {m}x{n} system"
                )));
            }
            if !val.is_finite() {
                return Err(ConicError::BadProblem(format!(
                    "non-finite coefficient at ({row}, {col})"
                )));
            }
        }
        Ok(())
    }

    /// Solves the problem with the selected backend.
    ///
    /// Infeasibility and unboundedness are reported through
    /// [`SolveStatus`](crate::SolveStatus), not as errors.
    ///
    /// # Errors
    /// Fails on malformed problems or solver setup/numerical breakdown.
    pub fn solve(&self, options: &SolveOptions) -> Result<ConicSolution, ConicError> {
        self.validate()?;
        let tol = options.tol.unwrap_or(if self.has_psd() {
            crate::DEFAULT_SDP_TOL
        } else {
            crate::DEFAULT_LP_TOL
        });
        match options.backend {
            crate::Backend::Clarabel => crate::interior::solve(self, tol, options.max_iter),
            crate::Backend::Builtin => crate::firstorder::solve(self, tol, options.max_iter),
        }
    }

    /// Violation of the cone membership `x ∈ K`, as the largest clamp
    /// distance (negative part for the orthant, `max(0, −λ_min)` for PSD
    /// blocks).
    pub fn cone_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        let mut at = 0usize;
        for slice in &self.cones {
            let dim = slice.dim();
            match slice {
                ConeSlice::Free { .. } => {}
                ConeSlice::NonNeg { .. } => {
                    for &v in &x[at..at + dim] {
                        worst = worst.max(-v);
                    }
                }
                ConeSlice::PsdTriangle { order } => {
                    let s = crate::embed::smat(&x[at..at + dim], *order);
                    let eig = s.symmetric_eigen();
                    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
                    worst = worst.max(-min.min(0.0));
                }
            }
            at += dim;
        }
        worst
    }

    /// Infinity norm of the equality residual `Ax − b`.
    pub fn eq_residual(&self, x: &[f64]) -> f64 {
        let mut r: Vec<f64> = self.rhs.iter().map(|b| -b).collect();
        for &(row, col, val) in &self.triplets {
            r[row] += val * x[col];
        }
        r.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Serializes the problem in the Conic Benchmark Format (CBF v3) for
    /// external cross-checking. Scalar slices map to `VAR` cones, PSD blocks
    /// to `PSDVAR`, and equalities to `L=` constraints; scaled-triangle
    /// coefficients are converted to the symmetric matrix coefficients CBF
    /// expects.
    pub fn to_cbf_string(&self) -> String {
        // Split the flat variables into scalar variables (CBF VAR) and PSD
        // blocks (CBF PSDVAR), remembering the mapping from flat indices.
        #[derive(Clone, Copy)]
        enum VarRef {
            Scalar(usize),
            // (block, row, col, scale) with scale converting a flat
            // coefficient to a symmetric matrix coefficient.
            Psd(usize, usize, usize, f64),
        }
        let mut map: Vec<VarRef> = Vec::with_capacity(self.num_vars());
        let mut scalar_cones: Vec<(&str, usize)> = Vec::new();
        let mut psd_orders: Vec<usize> = Vec::new();
        let mut scalar_count = 0usize;
        for slice in &self.cones {
            match *slice {
                ConeSlice::Free { dim } => {
                    scalar_cones.push(("F", dim));
                    for _ in 0..dim {
                        map.push(VarRef::Scalar(scalar_count));
                        scalar_count += 1;
                    }
                }
                ConeSlice::NonNeg { dim } => {
                    scalar_cones.push(("L+", dim));
                    for _ in 0..dim {
                        map.push(VarRef::Scalar(scalar_count));
                        scalar_count += 1;
                    }
                }
                ConeSlice::PsdTriangle { order } => {
                    let block = psd_orders.len();
                    psd_orders.push(order);
                    for c in 0..order {
                        for r in 0..=c {
                            let scale = if r == c {
                                1.0
                            } else {
                                // coeff·svec = coeff·√2·X_rc = ⟨F, X⟩ with
                                // F_rc = F_cr = coeff/√2.
                                std::f64::consts::FRAC_1_SQRT_2
                            };
                            map.push(VarRef::Psd(block, c, r, scale));
                        }
                    }
                }
            }
        }

        let mut out = String::new();
        out.push_str("VER\n3\n\nOBJSENSE\nMIN\n\n");
        if !psd_orders.is_empty() {
            let _ = writeln!(out, "PSDVAR\n{}", psd_orders.len());
            for order in &psd_orders {
                let _ = writeln!(out, "{order}");
            }
            out.push('\n');
        }
        if scalar_count > 0 {
            let _ = writeln!(out, "VAR\n{} {}", scalar_count, scalar_cones.len());
            for (name, dim) in &scalar_cones {
                let _ = writeln!(out, "{name} {dim}");
            }
            out.push('\n');
        }
        let m = self.num_eq_rows();
        if m > 0 {
            let _ = writeln!(out, "CON\n{m} 1\nL= {m}");
            out.push('\n');
        }

        let mut obj_scalar: Vec<(usize, f64)> = Vec::new();
        let mut obj_psd: Vec<(usize, usize, usize, f64)> = Vec::new();
        for (flat, &c) in self.objective.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match map[flat] {
                VarRef::Scalar(j) => obj_scalar.push((j, c)),
                VarRef::Psd(b, r, col, scale) => obj_psd.push((b, r, col, c * scale)),
            }
        }
        if !obj_psd.is_empty() {
            let _ = writeln!(out, "OBJFCOORD\n{}", obj_psd.len());
            for (b, r, c, v) in &obj_psd {
                let _ = writeln!(out, "{b} {r} {c} {v:.17e}");
            }
            out.push('\n');
        }
        if !obj_scalar.is_empty() {
            let _ = writeln!(out, "OBJACOORD\n{}", obj_scalar.len());
            for (j, v) in &obj_scalar {
                let _ = writeln!(out, "{j} {v:.17e}");
            }
            out.push('\n');
        }

        let mut a_scalar: Vec<(usize, usize, f64)> = Vec::new();
        let mut a_psd: Vec<(usize, usize, usize, usize, f64)> = Vec::new();
        for &(row, col, val) in &self.triplets {
            match map[col] {
                VarRef::Scalar(j) => a_scalar.push((row, j, val)),
                VarRef::Psd(b, r, c, scale) => a_psd.push((row, b, r, c, val * scale)),
            }
        }
        if !a_psd.is_empty() {
            let _ = writeln!(out, "FCOORD\n{}", a_psd.len());
            for (i, b, r, c, v) in &a_psd {
                let _ = writeln!(out, "{i} {b} {r} {c} {v:.17e}");
            }
            out.push('\n');
        }
        if !a_scalar.is_empty() {
            let _ = writeln!(out, "ACOORD\n{}", a_scalar.len());
            for (i, j, v) in &a_scalar {
                let _ = writeln!(out, "{i} {j} {v:.17e}");
            }
            out.push('\n');
        }
        // CBF constraints read Σ⟨F,X⟩ + aᵀx + b ∈ cone, so b = −rhs.
        let nonzero_b: Vec<(usize, f64)> = self
            .rhs
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, -v))
            .collect();
        if !nonzero_b.is_empty() {
            let _ = writeln!(out, "BCOORD\n{}", nonzero_b.len());
            for (i, v) in &nonzero_b {
                let _ = writeln!(out, "{i} {v:.17e}");
            }
            out.push('\n');
        }
        out
    }
}
