use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{FirTransferMatrix, FrequencyGrid, SstfError};

/// Margin added to the spectral radius when certifying geometric decay of
/// impulse responses.
const DECAY_MARGIN: f64 = 1e-9;

/// A discrete-time state-space realization `C(zI − A)^{-1}B + D`.
///
/// The stability flag is recomputed from the spectral radius of `A` at
/// construction and never trusted from input. All fields are immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    spectral_radius: f64,
}

impl StateSpace {
    /// Builds a realization, validating conformability of all four matrices.
    ///
    /// # Examples
    /// ```
    /// use nalgebra::DMatrix;
    /// use sstf::StateSpace;
    /// let sys = StateSpace::new(
    ///     DMatrix::from_element(1, 1, 0.5),
    ///     DMatrix::from_element(1, 1, 1.0),
    ///     DMatrix::from_element(1, 1, 1.0),
    ///     DMatrix::from_element(1, 1, 0.0),
    /// ).unwrap();
    /// assert!(sys.is_stable());
    /// ```
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self, SstfError> {
        if a.nrows() != a.ncols() {
            return Err(SstfError::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        if b.nrows() != n {
            return Err(SstfError::DimensionMismatch(format!(
                "B has {} rows, expected {n}",
                b.nrows()
            )));
        }
        if c.ncols() != n {
            return Err(SstfError::DimensionMismatch(format!(
                "C has {} columns, expected {n}",
                c.ncols()
            )));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(SstfError::DimensionMismatch(format!(
                "D is {}x{}, expected {}x{}",
                d.nrows(),
                d.ncols(),
                c.nrows(),
                b.ncols()
            )));
        }
        let spectral_radius = spectral_radius(&a);
        Ok(Self {
            a,
            b,
            c,
            d,
            spectral_radius,
        })
    }

    /// A memoryless (static-gain) system `P(z) ≡ D`.
    pub fn static_gain(d: DMatrix<f64>) -> Self {
        let (r, q) = (d.nrows(), d.ncols());
        Self::new(DMatrix::zeros(0, 0), DMatrix::zeros(0, q), DMatrix::zeros(r, 0), d)
            .expect("static realization is always conformable")
    }

    /// State matrix `A`.
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Input matrix `B`.
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// Output matrix `C`.
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Feedthrough matrix `D`.
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// State dimension.
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    /// Number of outputs (rows of the transfer matrix).
    pub fn rows(&self) -> usize {
        self.c.nrows()
    }

    /// Number of inputs (columns of the transfer matrix).
    pub fn cols(&self) -> usize {
        self.b.ncols()
    }

    /// Spectral radius of `A`, computed at construction.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// Schur stability: spectral radius strictly below one.
    pub fn is_stable(&self) -> bool {
        self.spectral_radius < 1.0
    }

    /// Evaluates the transfer matrix at `z = e^{jω}`.
    ///
    /// # Errors
    /// Reports an evaluation failure when `e^{jω}I − A` is numerically
    /// singular (only possible for systems with unit-circle eigenvalues).
    pub fn freq_response(&self, omega: f64) -> Result<DMatrix<Complex64>, SstfError> {
        let n = self.state_dim();
        let dc = self.d.map(|x| Complex64::new(x, 0.0));
        if n == 0 {
            return Ok(dc);
        }
        let z = Complex64::new(omega.cos(), omega.sin());
        let mut zia = self.a.map(|x| Complex64::new(-x, 0.0));
        for i in 0..n {
            zia[(i, i)] += z;
        }
        let bc = self.b.map(|x| Complex64::new(x, 0.0));
        let lu = zia.lu();
        let x = lu.solve(&bc).ok_or_else(|| {
            SstfError::Evaluation(omega, "zI - A is numerically singular".into())
        })?;
        let cc = self.c.map(|x| Complex64::new(x, 0.0));
        Ok(cc * x + dc)
    }

    /// Markov parameters `h_0 = D`, `h_t = C·A^{t−1}·B` for `t = 0..=horizon`.
    pub fn impulse_response(&self, horizon: usize) -> Vec<DMatrix<f64>> {
        let mut out = Vec::with_capacity(horizon + 1);
        out.push(self.d.clone());
        if self.state_dim() == 0 {
            out.resize(horizon + 1, DMatrix::zeros(self.rows(), self.cols()));
            return out;
        }
        let mut x = self.b.clone();
        for _ in 1..=horizon {
            out.push(&self.c * &x);
            x = &self.a * x;
        }
        out
    }

    /// Truncates the system to an FIR transfer matrix with coefficients
    /// `t = 0..=horizon`.
    pub fn to_fir(&self, horizon: usize) -> FirTransferMatrix {
        FirTransferMatrix::from_coeffs(self.impulse_response(horizon))
            .expect("impulse responses are conformable by construction")
    }

    /// Squared H2 norm `Σ_t ‖h_t‖_F²`, truncated once the certified
    /// geometric tail bound drops below `rel_tol` times the running sum.
    ///
    /// # Errors
    /// Fails on unstable systems.
    pub fn h2_norm_sq(&self, rel_tol: f64) -> Result<f64, SstfError> {
        let mut sum = self.d.norm_squared();
        let mut tail = TailBound::new(self)?;
        if self.state_dim() == 0 {
            return Ok(sum);
        }
        let mut x = self.b.clone();
        let mut t = 1usize;
        loop {
            let h = &self.c * &x;
            sum += h.norm_squared();
            tail.observe(t, h.norm());
            // Σ_{s>t} (c ρ̄^s)² = c² ρ̄^{2(t+1)} / (1 − ρ̄²)
            let bound = tail.c * tail.c * tail.rho.powi(2 * (t as i32 + 1))
                / (1.0 - tail.rho * tail.rho);
            if bound <= rel_tol * sum.max(1e-300) && t >= 8 {
                return Ok(sum);
            }
            x = &self.a * x;
            t += 1;
        }
    }

    /// Squared H∞ norm on a grid: `max_ω λ_max(P*(e^{jω})P(e^{jω}))`, the
    /// largest squared singular value over the grid. A lower bound of the
    /// true supremum, exact in the grid limit.
    ///
    /// # Errors
    /// Fails on unstable systems or when evaluation fails at a grid point.
    pub fn hinf_norm_sq(&self, grid: &FrequencyGrid) -> Result<f64, SstfError> {
        if !self.is_stable() {
            return Err(SstfError::Unstable(self.spectral_radius));
        }
        let mut best = 0.0f64;
        for omega in grid.iter() {
            let f = self.freq_response(omega)?;
            best = best.max(largest_sq_singular_value(&f));
        }
        Ok(best)
    }

    /// L1 norm `max_i Σ_j Σ_t |h_t(i,j)|`, truncated once the certified tail
    /// bound drops below `rel_tol` times the running maximum row sum.
    ///
    /// # Errors
    /// Fails on unstable systems.
    pub fn l1_norm(&self, rel_tol: f64) -> Result<f64, SstfError> {
        let mut rows: Vec<f64> = (0..self.rows())
            .map(|i| self.d.row(i).iter().map(|x| x.abs()).sum())
            .collect();
        let mut tail = TailBound::new(self)?;
        if self.state_dim() == 0 {
            return Ok(rows.iter().cloned().fold(0.0, f64::max));
        }
        let q = self.cols() as f64;
        let mut x = self.b.clone();
        let mut t = 1usize;
        loop {
            let h = &self.c * &x;
            for (i, row) in rows.iter_mut().enumerate() {
                *row += h.row(i).iter().map(|v| v.abs()).sum::<f64>();
            }
            tail.observe(t, h.norm());
            let current = rows.iter().cloned().fold(0.0, f64::max);
            // Row sums of future taps are bounded by √q times the Frobenius
            // bound c·ρ̄^s summed geometrically.
            let bound = q.sqrt() * tail.c * tail.rho.powi(t as i32 + 1) / (1.0 - tail.rho);
            if bound <= rel_tol * current.max(1e-300) && t >= 8 {
                return Ok(current);
            }
            x = &self.a * x;
            t += 1;
        }
    }

    /// Series interconnection `self · other` (apply `other` first).
    pub fn series(&self, other: &StateSpace) -> Result<StateSpace, SstfError> {
        if self.cols() != other.rows() {
            return Err(SstfError::DimensionMismatch(format!(
                "series: left expects {} inputs, right produces {} outputs",
                self.cols(),
                other.rows()
            )));
        }
        let (n1, n2) = (self.state_dim(), other.state_dim());
        let n = n1 + n2;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.a);
        a.view_mut((0, n1), (n1, n2)).copy_from(&(&self.b * &other.c));
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.a);
        let mut b = DMatrix::zeros(n, other.cols());
        b.view_mut((0, 0), (n1, other.cols())).copy_from(&(&self.b * &other.d));
        b.view_mut((n1, 0), (n2, other.cols())).copy_from(&other.b);
        let mut c = DMatrix::zeros(self.rows(), n);
        c.view_mut((0, 0), (self.rows(), n1)).copy_from(&self.c);
        c.view_mut((0, n1), (self.rows(), n2)).copy_from(&(&self.d * &other.c));
        let d = &self.d * &other.d;
        StateSpace::new(a, b, c, d)
    }

    /// Parses a realization document `{"a": [[..]], "b": .., "c": .., "d": ..}`
    /// with row-major nested arrays.
    pub fn from_json_str(text: &str) -> Result<Self, SstfError> {
        let doc: StateSpaceDocument = serde_json::from_str(text)
            .map_err(|e| SstfError::InvalidDocument(e.to_string()))?;
        Self::new(
            matrix_from_rows(&doc.a)?,
            matrix_from_rows(&doc.b)?,
            matrix_from_rows(&doc.c)?,
            matrix_from_rows(&doc.d)?,
        )
    }

    /// Serializes to the document format of [`StateSpace::from_json_str`].
    pub fn to_json_string(&self) -> String {
        let doc = StateSpaceDocument {
            a: matrix_to_rows(&self.a),
            b: matrix_to_rows(&self.b),
            c: matrix_to_rows(&self.c),
            d: matrix_to_rows(&self.d),
        };
        serde_json::to_string_pretty(&doc).expect("document serialization cannot fail")
    }
}

/// Certified geometric decay bound `‖h_t‖_F ≤ c·ρ̄^t` with `c` fitted on the
/// computed prefix and `ρ̄ = ρ(A) + margin`.
struct TailBound {
    rho: f64,
    c: f64,
}

impl TailBound {
    fn new(sys: &StateSpace) -> Result<Self, SstfError> {
        let rho = if sys.state_dim() == 0 {
            0.0
        } else {
            sys.spectral_radius + DECAY_MARGIN
        };
        if rho >= 1.0 {
            return Err(SstfError::Unstable(sys.spectral_radius));
        }
        Ok(Self { rho: rho.max(1e-6), c: 0.0 })
    }

    fn observe(&mut self, t: usize, h_norm: f64) {
        let implied = h_norm / self.rho.powi(t as i32);
        if implied > self.c {
            self.c = implied;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateSpaceDocument {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    d: Vec<Vec<f64>>,
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, SstfError> {
    if rows.is_empty() {
        return Ok(DMatrix::zeros(0, 0));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(SstfError::InvalidDocument("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Spectral radius of a square matrix.
///
/// Uses a real Schur decomposition with a capped iteration budget; the
/// unbounded QR iteration can stall on shift-structured (companion-like)
/// matrices, so on non-convergence this falls back to normalized repeated
/// squaring, where `‖A^{2^k}‖_F^{1/2^k} → ρ(A)` with error `O(2^{-k} k)`.
/// The fallback always terminates and returns exactly zero for nilpotent
/// matrices such as FIR shift realizations.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let budget = 100 * n + 1024;
    if let Some(schur) = Schur::try_new(a.clone(), f64::EPSILON, budget) {
        return schur
            .complex_eigenvalues()
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
    }
    let norm0 = a.norm();
    if norm0 == 0.0 {
        return 0.0;
    }
    let mut b = a / norm0;
    // Invariant after step k: log_scale = ln‖A^{2^k}‖ / 2^k and b is the
    // normalized power A^{2^k}/‖A^{2^k}‖. Every iterate upper-bounds ln ρ.
    let mut log_scale = norm0.ln();
    for k in 1..=52i32 {
        let sq = &b * &b;
        let norm = sq.norm();
        if norm == 0.0 {
            // A unit-norm matrix whose square vanishes entirely in f64 is
            // nilpotent to far beyond working precision.
            return 0.0;
        }
        b = sq / norm;
        log_scale += norm.ln() / 2f64.powi(k);
    }
    log_scale.exp()
}

/// Largest eigenvalue of `F*F` (squared largest singular value).
pub(crate) fn largest_sq_singular_value(f: &DMatrix<Complex64>) -> f64 {
    // Work with the smaller Gramian side for speed.
    let gram = if f.nrows() >= f.ncols() {
        f.adjoint() * f
    } else {
        f * f.adjoint()
    };
    largest_hermitian_eigenvalue(&gram)
}

/// Largest eigenvalue of a Hermitian matrix via the real symmetric embedding
/// `[[Re, −Im], [Im, Re]]` (spectrum preserved with doubled multiplicity).
pub(crate) fn largest_hermitian_eigenvalue(h: &DMatrix<Complex64>) -> f64 {
    let n = h.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut e = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            e[(i, j)] = v.re;
            e[(i + n, j + n)] = v.re;
            e[(i + n, j)] = v.im;
            e[(i, j + n)] = -v.im;
        }
    }
    // Symmetrize to wash out representation round-off before the eigensolve.
    let sym = (&e + e.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

