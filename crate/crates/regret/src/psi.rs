use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use sstf::{FirTransferMatrix, FrequencyGrid};

use crate::{LoopBlocks, RegretError};

/// The Hermitian closed-loop gap matrix at one frequency, with its largest
/// eigenvalue.
///
/// `psi = F*F − F̂*F̂` compares the disturbance amplification of two closed
/// loops: a disturbance concentrated at `omega` along the top eigenvector
/// widens the energy gap between the loops at rate `lambda_max` per unit of
/// disturbance energy.
#[derive(Clone, Debug)]
pub struct PsiSample {
    /// Frequency in radians per sample, in `[−π, π]`.
    pub omega: f64,
    /// Hermitian gap matrix (disturbance dimension square).
    pub psi: DMatrix<Complex64>,
    /// Largest (real) eigenvalue of `psi`.
    pub lambda_max: f64,
}

/// Compares two closed-loop frequency responses at one frequency.
///
/// Forms the Gramian difference `Ψ = F*F − F̂*F̂`, re-symmetrized so the
/// stored matrix is Hermitian to the last bit, and computes its largest
/// eigenvalue.
///
/// # Errors
/// Rejects responses of different shapes and eigensolver breakdown.
pub fn psi_at(
    omega: f64,
    f: &DMatrix<Complex64>,
    f_hat: &DMatrix<Complex64>,
) -> Result<PsiSample, RegretError> {
    if f.shape() != f_hat.shape() {
        return Err(RegretError::DimensionMismatch(format!(
            "responses are {}x{} vs {}x{}",
            f.nrows(),
            f.ncols(),
            f_hat.nrows(),
            f_hat.ncols()
        )));
    }
    let raw = f.adjoint() * f - f_hat.adjoint() * f_hat;
    let psi = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let lambda_max = if psi.nrows() == 0 {
        0.0
    } else {
        hermitian_spectrum(&psi)?.0[0]
    };
    Ok(PsiSample {
        omega,
        psi,
        lambda_max,
    })
}

/// Evaluates the gap matrix of two parameters across a frequency grid.
///
/// Closed loops are evaluated exactly (state-space resolvents, no FIR
/// truncation); samples come back in the grid's ascending frequency order.
///
/// # Errors
/// Rejects mis-shaped parameters.
pub fn psi_spectrum(
    q: &FirTransferMatrix,
    q_hat: &FirTransferMatrix,
    blocks: &LoopBlocks,
    grid: &FrequencyGrid,
) -> Result<Vec<PsiSample>, RegretError> {
    grid.iter()
        .map(|omega| {
            let f = blocks.closed_loop_response(q, omega)?;
            let f_hat = blocks.closed_loop_response(q_hat, omega)?;
            psi_at(omega, &f, &f_hat)
        })
        .collect()
}

/// Eigenvalues (descending, with the doubled multiplicity of the real
/// embedding) and a unit top eigenvector of a Hermitian matrix.
///
/// Works through the real symmetric embedding `[[Re, −Im], [Im, Re]]`, which
/// carries each eigenvalue of the n×n Hermitian input twice; entry `2k` of
/// the returned values is therefore the (k+1)-th largest true eigenvalue.
/// Any real eigenvector `[a; b]` of the embedding maps back to a complex
/// eigenvector `a + j·b` of equal norm.
pub(crate) fn hermitian_spectrum(
    h: &DMatrix<Complex64>,
) -> Result<(Vec<f64>, DVector<Complex64>), RegretError> {
    let n = h.nrows();
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
    // Wash out representation round-off so the solver sees an exactly
    // symmetric matrix.
    let sym = (&e + e.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 200 * n + 1024)
        .ok_or(RegretError::EigenFailure)?;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("symmetric eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let top = eig.eigenvectors.column(order[0]);
    let vector = DVector::from_fn(n, |k, _| Complex64::new(top[k], top[k + n]));
    Ok((values, vector))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_matches_real_symmetric_case() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])
            .map(|v| Complex64::new(v, 0.0));
        let (values, vector) = hermitian_spectrum(&h).unwrap();
        assert!((values[0] - 3.0).abs() < 1e-12);
        assert!((values[2] - 1.0).abs() < 1e-12);
        // Top eigenvector of [[2,1],[1,2]] is (1,1)/√2 up to phase.
        let ratio = vector[0] / vector[1];
        assert!((ratio - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!((vector.norm() - 1.0).abs() < 1e-12);
    }
}
