use nalgebra::DMatrix;
use num_complex::Complex64;
use regret::{psi_at, LoopBlocks};
use sstf::FirTransferMatrix;

use crate::SynthError;

/// Frequency responses of the loop blocks (and of the reference closed loop)
/// sampled on a grid, shared by the problem builders and the cutting-plane
/// certification step.
pub(crate) struct FreqLmiData {
    pub omegas: Vec<f64>,
    pub p11: Vec<DMatrix<Complex64>>,
    pub p12: Vec<DMatrix<Complex64>>,
    pub p21: Vec<DMatrix<Complex64>>,
    /// Reference closed-loop response `F̂(ω)`; all-zero when the problem has
    /// no reference (plain gain minimization).
    pub f_hat: Vec<DMatrix<Complex64>>,
    /// Constant bottom-right augmentation `F̂(ω)†F̂(ω)`.
    pub g_bottom: Vec<DMatrix<Complex64>>,
}

impl FreqLmiData {
    pub fn new(
        blocks: &LoopBlocks,
        q_hat: Option<&FirTransferMatrix>,
        omegas: &[f64],
    ) -> Result<Self, SynthError> {
        let n_z = blocks.error_dim();
        let n_w = blocks.disturbance_dim();
        let mut data = FreqLmiData {
            omegas: omegas.to_vec(),
            p11: Vec::with_capacity(omegas.len()),
            p12: Vec::with_capacity(omegas.len()),
            p21: Vec::with_capacity(omegas.len()),
            f_hat: Vec::with_capacity(omegas.len()),
            g_bottom: Vec::with_capacity(omegas.len()),
        };
        for &omega in omegas {
            let p11 = blocks.p11().freq_response(omega)?;
            let p12 = blocks.p12().freq_response(omega)?;
            let p21 = blocks.p21().freq_response(omega)?;
            let f_hat = match q_hat {
                Some(q) => &p11 + &p12 * q.freq_response(omega) * &p21,
                None => DMatrix::from_element(n_z, n_w, Complex64::new(0.0, 0.0)),
            };
            let g = f_hat.adjoint() * &f_hat;
            data.p11.push(p11);
            data.p12.push(p12);
            data.p21.push(p21);
            data.f_hat.push(f_hat);
            data.g_bottom.push(g);
        }
        Ok(data)
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    /// Closed-loop response `F(ω_idx)` for the candidate parameter.
    pub fn closed_loop(&self, idx: usize, q: &FirTransferMatrix) -> DMatrix<Complex64> {
        &self.p11[idx] + &self.p12[idx] * q.freq_response(self.omegas[idx]) * &self.p21[idx]
    }

    /// Smallest `λ` for which the frequency block at `idx` is positive
    /// semidefinite given the candidate `q`: the top eigenvalue of
    /// `F†F − F̂†F̂`.
    pub fn lambda_required(&self, idx: usize, q: &FirTransferMatrix) -> Result<f64, SynthError> {
        let f = self.closed_loop(idx, q);
        let sample = psi_at(self.omegas[idx], &f, &self.f_hat[idx])?;
        Ok(sample.lambda_max)
    }

    /// `lambda_required` across the whole grid.
    pub fn lambda_profile(&self, q: &FirTransferMatrix) -> Result<Vec<f64>, SynthError> {
        (0..self.len()).map(|i| self.lambda_required(i, q)).collect()
    }
}
