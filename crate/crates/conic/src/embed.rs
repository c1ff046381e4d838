use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ConicError;

/// Length of the scaled upper triangle of an `order × order` symmetric
/// matrix.
pub fn svec_len(order: usize) -> usize {
    order * (order + 1) / 2
}

/// Position of entry `(i, j)` inside the scaled upper triangle stacked
/// column-wise.
pub fn svec_index(i: usize, j: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    c * (c + 1) / 2 + r
}

/// Packs a symmetric matrix into its scaled upper triangle (off-diagonal
/// entries multiplied by √2), preserving inner products:
/// `⟨A, B⟩_F = svec(A)ᵀ svec(B)`.
pub fn svec(s: &DMatrix<f64>) -> Vec<f64> {
    let n = s.nrows();
    assert_eq!(n, s.ncols(), "svec requires a square matrix");
    let mut out = Vec::with_capacity(svec_len(n));
    for c in 0..n {
        for r in 0..=c {
            if r == c {
                out.push(s[(r, c)]);
            } else {
                out.push((s[(r, c)] + s[(c, r)]) * std::f64::consts::FRAC_1_SQRT_2);
            }
        }
    }
    out
}

/// Inverse of [`svec`]: rebuilds the symmetric matrix of the given order.
pub fn smat(x: &[f64], order: usize) -> DMatrix<f64> {
    assert_eq!(x.len(), svec_len(order), "svec length mismatch");
    let mut s = DMatrix::zeros(order, order);
    let mut idx = 0usize;
    for c in 0..order {
        for r in 0..=c {
            if r == c {
                s[(r, c)] = x[idx];
            } else {
                let v = x[idx] * std::f64::consts::FRAC_1_SQRT_2;
                s[(r, c)] = v;
                s[(c, r)] = v;
            }
            idx += 1;
        }
    }
    s
}

/// Embeds a complex Hermitian matrix as the real symmetric matrix
/// `[[Re(H), −Im(H)], [Im(H), Re(H)]]`.
///
/// The embedding is PSD exactly when `H` is, and every eigenvalue of `H`
/// appears in the embedding with doubled multiplicity.
///
/// # Errors
/// Rejects matrices that are not Hermitian within an absolute tolerance of
/// `1e-9·max(1, ‖H‖_max)`.
///
/// # Examples
/// ```
/// use nalgebra::DMatrix;
/// use num_complex::Complex64;
/// use conic::hermitian_embed;
/// let h = DMatrix::from_row_slice(2, 2, &[
///     Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0),
///     Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0),
/// ]);
/// let e = hermitian_embed(&h).unwrap();
/// let eigs = e.symmetric_eigen().eigenvalues;
/// let pos = eigs.iter().filter(|v| **v > 0.5).count();
/// assert_eq!(pos, 2); // eigenvalues ±1, each doubled
/// ```
pub fn hermitian_embed(h: &DMatrix<Complex64>) -> Result<DMatrix<f64>, ConicError> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(ConicError::BadProblem(format!(
            "embedding requires a square matrix, got {}x{}",
            n,
            h.ncols()
        )));
    }
    let scale = h.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut max_asymmetry = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            max_asymmetry = max_asymmetry.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    if max_asymmetry > 1e-9 * scale {
        return Err(ConicError::NonHermitian { max_asymmetry });
    }
    let mut e = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // Symmetrize so round-off asymmetry cannot leak into the output.
            let v = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            e[(i, j)] = v.re;
            e[(i + n, j + n)] = v.re;
            e[(i + n, j)] = v.im;
            e[(i, j + n)] = -v.im;
        }
    }
    Ok(e)
}
