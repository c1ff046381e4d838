use sstf::{fir_convolve, FirTransferMatrix};

use crate::{NetworkedPlant, PlantError};

/// FIR truncation of the closed-loop map `P₁₁ + P₁₂·Q·P₂₁`, exact through
/// coefficient `f_out`.
///
/// Truncating each factor at `f_out` loses nothing below that order: every
/// dropped product term involves a tap of delay `> f_out`.
///
/// # Errors
/// Rejects unstable plants — their open-loop blocks have no convergent
/// impulse response, so stabilize first and use
/// [`TransformedPlant::closed_loop_fir`](crate::TransformedPlant::closed_loop_fir).
/// Also rejects `Q` whose shape disagrees with the control/measurement
/// dimensions.
pub fn closed_loop_fir(
    plant: &NetworkedPlant,
    q: &FirTransferMatrix,
    f_out: usize,
) -> Result<FirTransferMatrix, PlantError> {
    if !plant.is_stable() {
        return Err(PlantError::UnstablePlant(plant.spectral_radius()));
    }
    let (m, p) = (plant.partitions().u.total(), plant.partitions().y.total());
    if q.rows() != m || q.cols() != p {
        return Err(PlantError::SignalMismatch(format!(
            "Q is {}x{}, plant expects {m}x{p}",
            q.rows(),
            q.cols()
        )));
    }
    let p11 = plant.p11_realization().to_fir(f_out);
    let p12 = plant.p12_realization().to_fir(f_out);
    let p21 = plant.p21_realization().to_fir(f_out);
    let cross = fir_convolve(&[&p12, q, &p21], f_out)?;
    Ok(p11.add_scaled(&cross, 1.0)?)
}
