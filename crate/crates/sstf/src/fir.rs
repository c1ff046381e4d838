use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use netgraph::{BlockPartition, FirSparsityMask};

use crate::ss::largest_sq_singular_value;
use crate::{FrequencyGrid, SstfError, StateSpace};

/// A finite impulse response transfer matrix `Q(z) = Σ_{t=0}^{f} Q_t z^{-t}`
/// with an optional block sparsity mask.
///
/// When a mask is attached, every ZERO entry of every coefficient is exactly
/// `0.0` — enforced at construction, never by thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct FirTransferMatrix {
    coeffs: Vec<DMatrix<f64>>,
    mask: Option<FirSparsityMask>,
    row_part: BlockPartition,
    col_part: BlockPartition,
}

impl FirTransferMatrix {
    /// Builds an FIR transfer matrix from coefficients `Q_0..Q_f` with
    /// trivial (single-block) partitions and no mask.
    ///
    /// # Errors
    /// Rejects empty coefficient lists and shape-inconsistent coefficients.
    pub fn from_coeffs(coeffs: Vec<DMatrix<f64>>) -> Result<Self, SstfError> {
        if coeffs.is_empty() {
            return Err(SstfError::DimensionMismatch(
                "FIR needs at least the t = 0 coefficient".into(),
            ));
        }
        let (r, q) = (coeffs[0].nrows(), coeffs[0].ncols());
        if r == 0 || q == 0 {
            return Err(SstfError::DimensionMismatch(
                "FIR coefficients must be nonempty matrices".into(),
            ));
        }
        if coeffs.iter().any(|m| m.nrows() != r || m.ncols() != q) {
            return Err(SstfError::DimensionMismatch(
                "all FIR coefficients must share one shape".into(),
            ));
        }
        let row_part = BlockPartition::new(vec![r]).expect("nonzero row count");
        let col_part = BlockPartition::new(vec![q]).expect("nonzero column count");
        Ok(Self {
            coeffs,
            mask: None,
            row_part,
            col_part,
        })
    }

    /// Builds a zero FIR transfer matrix of shape `rows × cols` with
    /// coefficients `t = 0..=f`.
    pub fn zeros(rows: usize, cols: usize, f: usize) -> Self {
        Self::from_coeffs(vec![DMatrix::zeros(rows, cols); f + 1])
            .expect("zero coefficients are conformable")
    }

    /// Attaches a sparsity mask, validating shape agreement and that every
    /// ZERO entry is exactly zero.
    ///
    /// # Errors
    /// Reports the first masked entry holding a nonzero value.
    pub fn with_mask(mut self, mask: FirSparsityMask) -> Result<Self, SstfError> {
        if mask.rows() != self.rows() || mask.cols() != self.cols() {
            return Err(SstfError::DimensionMismatch(format!(
                "mask is {}x{}, FIR is {}x{}",
                mask.rows(),
                mask.cols(),
                self.rows(),
                self.cols()
            )));
        }
        if mask.horizon() != self.order() {
            return Err(SstfError::DimensionMismatch(format!(
                "mask horizon {} != FIR order {}",
                mask.horizon(),
                self.order()
            )));
        }
        for (t, q) in self.coeffs.iter().enumerate() {
            for r in 0..q.nrows() {
                for c in 0..q.ncols() {
                    if !mask.is_free_entry(r, c, t) && q[(r, c)] != 0.0 {
                        return Err(SstfError::MaskViolation {
                            r,
                            c,
                            t,
                            value: q[(r, c)],
                        });
                    }
                }
            }
        }
        self.row_part = mask.row_partition().clone();
        self.col_part = mask.col_partition().clone();
        self.mask = Some(mask);
        Ok(self)
    }

    /// Builds a masked FIR transfer matrix from a flat vector of values for
    /// the FREE entries, in the mask's canonical `(i, j, t)` block ordering;
    /// ZERO entries are exactly zero.
    ///
    /// # Errors
    /// Rejects a value vector whose length differs from the mask's free
    /// entry count.
    pub fn from_free_values(mask: &FirSparsityMask, values: &[f64]) -> Result<Self, SstfError> {
        let coords = mask.free_scalar_coords();
        if coords.len() != values.len() {
            return Err(SstfError::DimensionMismatch(format!(
                "mask has {} free entries, got {} values",
                coords.len(),
                values.len()
            )));
        }
        let mut coeffs = vec![DMatrix::zeros(mask.rows(), mask.cols()); mask.horizon() + 1];
        for (&(r, c, t), &v) in coords.iter().zip(values) {
            coeffs[t][(r, c)] = v;
        }
        let fir = Self::from_coeffs(coeffs)?;
        fir.with_mask(mask.clone())
    }

    /// Reads back the FREE entries into a flat vector in the mask's
    /// canonical ordering (inverse of [`FirTransferMatrix::from_free_values`]).
    pub fn free_values(&self) -> Option<Vec<f64>> {
        let mask = self.mask.as_ref()?;
        Some(
            mask.free_scalar_coords()
                .iter()
                .map(|&(r, c, t)| self.coeffs[t][(r, c)])
                .collect(),
        )
    }

    /// The attached sparsity mask, if any.
    pub fn mask(&self) -> Option<&FirSparsityMask> {
        self.mask.as_ref()
    }

    /// Row block partition.
    pub fn row_partition(&self) -> &BlockPartition {
        &self.row_part
    }

    /// Column block partition.
    pub fn col_partition(&self) -> &BlockPartition {
        &self.col_part
    }

    /// FIR order `f` (coefficients run `t = 0..=f`).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Number of output rows.
    pub fn rows(&self) -> usize {
        self.coeffs[0].nrows()
    }

    /// Number of input columns.
    pub fn cols(&self) -> usize {
        self.coeffs[0].ncols()
    }

    /// Coefficient `Q_t`; zero matrix for `t` beyond the order.
    pub fn coeff(&self, t: usize) -> DMatrix<f64> {
        self.coeffs
            .get(t)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.rows(), self.cols()))
    }

    /// Borrowed coefficient slice `Q_0..Q_f`.
    pub fn coeffs(&self) -> &[DMatrix<f64>] {
        &self.coeffs
    }

    /// Frequency response `Σ_t Q_t e^{−jωt}`.
    pub fn freq_response(&self, omega: f64) -> DMatrix<Complex64> {
        let mut out = DMatrix::from_element(self.rows(), self.cols(), Complex64::new(0.0, 0.0));
        for (t, q) in self.coeffs.iter().enumerate() {
            let w = Complex64::new(0.0, -(omega * t as f64)).exp();
            for r in 0..q.nrows() {
                for c in 0..q.ncols() {
                    out[(r, c)] += w * q[(r, c)];
                }
            }
        }
        out
    }

    /// Exact squared H2 norm `Σ_t ‖Q_t‖_F²`.
    pub fn h2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|q| q.norm_squared()).sum()
    }

    /// Squared H∞ norm on a grid (largest squared singular value over the
    /// grid; a lower bound of the true supremum).
    pub fn hinf_norm_sq(&self, grid: &FrequencyGrid) -> f64 {
        grid.iter()
            .map(|w| largest_sq_singular_value(&self.freq_response(w)))
            .fold(0.0, f64::max)
    }

    /// Exact L1 norm `max_i Σ_j Σ_t |Q_t(i,j)|`.
    pub fn l1_norm(&self) -> f64 {
        (0..self.rows())
            .map(|i| {
                self.coeffs
                    .iter()
                    .map(|q| q.row(i).iter().map(|v| v.abs()).sum::<f64>())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Whether all coefficients are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|q| q.iter().all(|&v| v == 0.0))
    }

    /// Returns `self + other·scale`, padded to the longer order; masks and
    /// partitions are dropped (the result is a free FIR matrix).
    ///
    /// # Errors
    /// Rejects shape mismatches.
    pub fn add_scaled(&self, other: &FirTransferMatrix, scale: f64) -> Result<Self, SstfError> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(SstfError::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let f = self.order().max(other.order());
        let coeffs = (0..=f)
            .map(|t| self.coeff(t) + other.coeff(t) * scale)
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Converts to a (deadbeat) state-space realization; mainly for tests
    /// that compare representations.
    pub fn to_state_space(&self) -> StateSpace {
        let f = self.order();
        let (r, q) = (self.rows(), self.cols());
        if f == 0 {
            return StateSpace::static_gain(self.coeffs[0].clone());
        }
        let n = f * q;
        let mut a = DMatrix::zeros(n, n);
        for blk in 1..f {
            for k in 0..q {
                a[(blk * q + k, (blk - 1) * q + k)] = 1.0;
            }
        }
        let mut b = DMatrix::zeros(n, q);
        for k in 0..q {
            b[(k, k)] = 1.0;
        }
        let mut c = DMatrix::zeros(r, n);
        for t in 1..=f {
            c.view_mut((0, (t - 1) * q), (r, q)).copy_from(&self.coeffs[t]);
        }
        StateSpace::new(a, b, c, self.coeffs[0].clone()).expect("shift realization conforms")
    }

    /// Parses an FIR document
    /// `{"rows": r, "cols": q, "f": f, "coeffs": [[[..]..]..], "mask": ..}`
    /// where `coeffs[t]` is the row-major coefficient `Q_t`.
    pub fn from_json_str(text: &str) -> Result<Self, SstfError> {
        let doc: FirDocument = serde_json::from_str(text)
            .map_err(|e| SstfError::InvalidDocument(e.to_string()))?;
        if doc.coeffs.len() != doc.f + 1 {
            return Err(SstfError::InvalidDocument(format!(
                "expected {} coefficients, found {}",
                doc.f + 1,
                doc.coeffs.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(doc.coeffs.len());
        for rows in &doc.coeffs {
            if rows.len() != doc.rows || rows.iter().any(|r| r.len() != doc.cols) {
                return Err(SstfError::InvalidDocument(
                    "coefficient shape disagrees with rows/cols".into(),
                ));
            }
            coeffs.push(DMatrix::from_fn(doc.rows, doc.cols, |i, j| rows[i][j]));
        }
        let fir = Self::from_coeffs(coeffs)?;
        match doc.mask {
            Some(mask) => fir.with_mask(mask),
            None => Ok(fir),
        }
    }

    /// Serializes to the document format of [`FirTransferMatrix::from_json_str`].
    pub fn to_json_string(&self) -> String {
        let doc = FirDocument {
            rows: self.rows(),
            cols: self.cols(),
            f: self.order(),
            coeffs: self
                .coeffs
                .iter()
                .map(|m| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
                .collect(),
            mask: self.mask.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("document serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct FirDocument {
    rows: usize,
    cols: usize,
    f: usize,
    coeffs: Vec<Vec<Vec<f64>>>,
    mask: Option<FirSparsityMask>,
}

/// Convolves a chain of FIR transfer matrices, truncating the product at
/// coefficient `f_out`; coefficients `t ≤ f_out` are exact.
///
/// # Errors
/// Rejects an empty chain or non-conformable factors.
///
/// # Examples
/// ```
/// use nalgebra::DMatrix;
/// use sstf::{fir_convolve, FirTransferMatrix};
/// let delay = FirTransferMatrix::from_coeffs(vec![
///     DMatrix::zeros(1, 1),
///     DMatrix::from_element(1, 1, 1.0),
/// ]).unwrap();
/// let twice = fir_convolve(&[&delay, &delay], 3).unwrap();
/// assert_eq!(twice.coeff(2)[(0, 0)], 1.0);
/// assert!(twice.coeff(1)[(0, 0)] == 0.0 && twice.coeff(3)[(0, 0)] == 0.0);
/// ```
pub fn fir_convolve(
    factors: &[&FirTransferMatrix],
    f_out: usize,
) -> Result<FirTransferMatrix, SstfError> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| SstfError::DimensionMismatch("empty convolution chain".into()))?;
    let mut acc: Vec<DMatrix<f64>> = first.coeffs.iter().take(f_out + 1).cloned().collect();
    acc.resize(f_out + 1, DMatrix::zeros(first.rows(), first.cols()));
    for factor in rest {
        if acc[0].ncols() != factor.rows() {
            return Err(SstfError::DimensionMismatch(format!(
                "convolution: left has {} columns, right has {} rows",
                acc[0].ncols(),
                factor.rows()
            )));
        }
        let mut next = vec![DMatrix::zeros(acc[0].nrows(), factor.cols()); f_out + 1];
        for (ta, qa) in acc.iter().enumerate() {
            for tb in 0..=(f_out - ta).min(factor.order()) {
                next[ta + tb] += qa * &factor.coeffs[tb];
            }
        }
        acc = next;
    }
    FirTransferMatrix::from_coeffs(acc)
}
