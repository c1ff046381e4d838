use nalgebra::DMatrix;
use num_complex::Complex64;
use plant::{NetworkedPlant, TransformedPlant};
use sstf::{fir_convolve, FirTransferMatrix, StateSpace};

use crate::RegretError;

/// Stability margin below the unit circle required of every realization.
const STABILITY_MARGIN: f64 = 1e-9;

/// The three open-loop channels that determine a closed loop affine in the
/// controller parameter: `F_ℓ(Q) = P11 + P12·Q·P21`.
///
/// Every realization must be stable, so the affine map sends stable FIR
/// parameters to stable closed loops. Stable plants supply the blocks
/// directly ([`LoopBlocks::from_plant`]); unstable plants must first be
/// pre-stabilized and shifted ([`LoopBlocks::from_transformed`]).
#[derive(Clone, Debug)]
pub struct LoopBlocks {
    p11: StateSpace,
    p12: StateSpace,
    p21: StateSpace,
}

impl LoopBlocks {
    /// Builds the triple from explicit realizations.
    ///
    /// # Errors
    /// Rejects non-conformable blocks and unstable realizations.
    pub fn new(
        p11: StateSpace,
        p12: StateSpace,
        p21: StateSpace,
    ) -> Result<Self, RegretError> {
        if p12.rows() != p11.rows() {
            return Err(RegretError::DimensionMismatch(format!(
                "error outputs: p11 has {}, p12 has {}",
                p11.rows(),
                p12.rows()
            )));
        }
        if p21.cols() != p11.cols() {
            return Err(RegretError::DimensionMismatch(format!(
                "disturbance inputs: p11 has {}, p21 has {}",
                p11.cols(),
                p21.cols()
            )));
        }
        for block in [&p11, &p12, &p21] {
            let radius = block.spectral_radius();
            if radius >= 1.0 - STABILITY_MARGIN {
                return Err(RegretError::UnstableInput(radius));
            }
        }
        Ok(Self { p11, p12, p21 })
    }

    /// Extracts the blocks of a stable plant.
    ///
    /// # Errors
    /// Rejects unstable plants — their closed loop cannot be evaluated from
    /// the raw blocks; pre-stabilize and use [`LoopBlocks::from_transformed`].
    pub fn from_plant(plant: &NetworkedPlant) -> Result<Self, RegretError> {
        if !plant.is_stable() {
            return Err(RegretError::UnstableInput(plant.spectral_radius()));
        }
        Self::new(
            plant.p11_realization(),
            plant.p12_realization(),
            plant.p21_realization(),
        )
    }

    /// Extracts the blocks of a shifted (pre-stabilized) plant, which are
    /// stable by construction.
    pub fn from_transformed(tp: &TransformedPlant) -> Self {
        Self {
            p11: tp.p11().clone(),
            p12: tp.p12().clone(),
            p21: tp.p21().clone(),
        }
    }

    /// Disturbance-to-error channel.
    pub fn p11(&self) -> &StateSpace {
        &self.p11
    }

    /// Control-to-error channel.
    pub fn p12(&self) -> &StateSpace {
        &self.p12
    }

    /// Disturbance-to-measurement channel.
    pub fn p21(&self) -> &StateSpace {
        &self.p21
    }

    /// Number of disturbance inputs.
    pub fn disturbance_dim(&self) -> usize {
        self.p11.cols()
    }

    /// Number of regulated error outputs.
    pub fn error_dim(&self) -> usize {
        self.p11.rows()
    }

    /// Number of control inputs (columns a parameter must expose as rows).
    pub fn control_dim(&self) -> usize {
        self.p12.cols()
    }

    /// Number of measurement outputs (rows a parameter must accept as
    /// columns).
    pub fn measurement_dim(&self) -> usize {
        self.p21.rows()
    }

    fn check_parameter(&self, q: &FirTransferMatrix) -> Result<(), RegretError> {
        if q.rows() != self.control_dim() || q.cols() != self.measurement_dim() {
            return Err(RegretError::DimensionMismatch(format!(
                "parameter is {}x{}, loop needs {}x{}",
                q.rows(),
                q.cols(),
                self.control_dim(),
                self.measurement_dim()
            )));
        }
        Ok(())
    }

    /// Exact closed-loop frequency response `P11 + P12·Q·P21` at `ω`.
    ///
    /// # Errors
    /// Rejects mis-shaped parameters.
    pub fn closed_loop_response(
        &self,
        q: &FirTransferMatrix,
        omega: f64,
    ) -> Result<DMatrix<Complex64>, RegretError> {
        self.check_parameter(q)?;
        let p11 = self.p11.freq_response(omega)?;
        let p12 = self.p12.freq_response(omega)?;
        let p21 = self.p21.freq_response(omega)?;
        Ok(p11 + p12 * q.freq_response(omega) * p21)
    }

    /// Closed-loop impulse response truncated to taps `0..=f_out`.
    ///
    /// # Errors
    /// Rejects mis-shaped parameters.
    pub fn closed_loop_fir(
        &self,
        q: &FirTransferMatrix,
        f_out: usize,
    ) -> Result<FirTransferMatrix, RegretError> {
        self.check_parameter(q)?;
        let chain = fir_convolve(
            &[&self.p12.to_fir(f_out), q, &self.p21.to_fir(f_out)],
            f_out,
        )?;
        Ok(self.p11.to_fir(f_out).add_scaled(&chain, 1.0)?)
    }
}
