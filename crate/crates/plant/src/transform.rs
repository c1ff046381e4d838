use nalgebra::DMatrix;
use sstf::{fir_convolve, spectral_radius, FirTransferMatrix, StateSpace};

use crate::{CoprimeFactorization, NetworkedPlant, PlantError};

/// The stable plant seen by the Youla parameter after pre-stabilization:
/// the closed loop is `F_ℓ(P̃, Q) = P̃₁₁ + P̃₁₂·Q·P̃₂₁`, affine in `Q`,
/// with
///
/// ```text
///     P̃₁₁ = P₁₁ + P₁₂·V_r·M_l·P₂₁      (w → z under K₀ alone)
///     P̃₁₂ = −P₁₂·M_r                    (v → z)
///     P̃₂₁ = M_l·P₂₁                     (w → e, the innovation)
/// ```
///
/// All three blocks share one stable `2n`-state realization built from the
/// observer interconnection — the raw open-loop blocks are never evaluated,
/// so the construction is safe for unstable plants. With states
/// `(x, x̃ = x − x̂)`:
///
/// ```text
///     x⁺  = (A+B₂F)x − B₂F·x̃ + B₁w + B₂v
///     x̃⁺  = (A+LC₂)x̃ + (B₁+L·D₂₁)w
///     z   = (C₁+D₁₂F)x − D₁₂F·x̃ + D₁₁w + D₁₂v
///     e   = C₂x̃ + D₂₁w
/// ```
#[derive(Debug, Clone)]
pub struct TransformedPlant {
    p11: StateSpace,
    p12: StateSpace,
    p21: StateSpace,
    f: DMatrix<f64>,
    l: DMatrix<f64>,
}

impl TransformedPlant {
    /// Stable block `P̃₁₁` (disturbance to performance under `K₀`).
    pub fn p11(&self) -> &StateSpace {
        &self.p11
    }

    /// Stable block `P̃₁₂` (Youla input to performance).
    pub fn p12(&self) -> &StateSpace {
        &self.p12
    }

    /// Stable block `P̃₂₁` (disturbance to innovation).
    pub fn p21(&self) -> &StateSpace {
        &self.p21
    }

    /// State-feedback gain the transformation was built around.
    pub fn f(&self) -> &DMatrix<f64> {
        &self.f
    }

    /// Observer gain the transformation was built around.
    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// FIR truncation of `F_ℓ(P̃, Q) = P̃₁₁ + P̃₁₂·Q·P̃₂₁`, exact through
    /// coefficient `f_out`.
    ///
    /// # Errors
    /// Rejects `Q` whose shape disagrees with the plant.
    pub fn closed_loop_fir(
        &self,
        q: &FirTransferMatrix,
        f_out: usize,
    ) -> Result<FirTransferMatrix, PlantError> {
        if q.rows() != self.p12.cols() || q.cols() != self.p21.rows() {
            return Err(PlantError::SignalMismatch(format!(
                "Q is {}x{}, transformed plant expects {}x{}",
                q.rows(),
                q.cols(),
                self.p12.cols(),
                self.p21.rows()
            )));
        }
        let p11 = self.p11.to_fir(f_out);
        let p12 = self.p12.to_fir(f_out);
        let p21 = self.p21.to_fir(f_out);
        let cross = fir_convolve(&[&p12, q, &p21], f_out)?;
        Ok(p11.add_scaled(&cross, 1.0)?)
    }
}

/// Forms the transformed plant from a plant and a doubly coprime
/// factorization built on it (same gains).
///
/// # Errors
/// Rejects gain/plant dimension mismatches and non-stabilizing gains (the
/// resulting blocks would be unstable, which signals a bad factorization).
pub fn transform_plant(
    plant: &NetworkedPlant,
    cf: &CoprimeFactorization,
) -> Result<TransformedPlant, PlantError> {
    let n = plant.state_dim();
    let (m, p) = (plant.partitions().u.total(), plant.partitions().y.total());
    let (nw, nz) = (plant.partitions().w.total(), plant.partitions().z.total());
    if cf.f.nrows() != m || cf.f.ncols() != n || cf.l.nrows() != n || cf.l.ncols() != p {
        return Err(PlantError::DimensionMismatch(format!(
            "factorization gains F {}x{}, L {}x{} do not fit a plant with n={n}, m={m}, p={p}",
            cf.f.nrows(),
            cf.f.ncols(),
            cf.l.nrows(),
            cf.l.ncols()
        )));
    }
    let a_f = plant.a() + plant.b2() * &cf.f;
    let a_l = plant.a() + &cf.l * plant.c2();
    let state_radius = spectral_radius(&a_f);
    let observer_radius = spectral_radius(&a_l);
    if state_radius >= 1.0 - 1e-9 || observer_radius >= 1.0 - 1e-9 {
        return Err(PlantError::NonStabilizing {
            state_radius,
            observer_radius,
        });
    }

    let mut acl = DMatrix::zeros(2 * n, 2 * n);
    acl.view_mut((0, 0), (n, n)).copy_from(&a_f);
    acl.view_mut((0, n), (n, n)).copy_from(&(-(plant.b2() * &cf.f)));
    acl.view_mut((n, n), (n, n)).copy_from(&a_l);

    let mut bw = DMatrix::zeros(2 * n, nw);
    bw.view_mut((0, 0), (n, nw)).copy_from(plant.b1());
    bw.view_mut((n, 0), (n, nw))
        .copy_from(&(plant.b1() + &cf.l * plant.d21()));

    let mut bv = DMatrix::zeros(2 * n, m);
    bv.view_mut((0, 0), (n, m)).copy_from(plant.b2());

    let d12f = plant.d12() * &cf.f;
    let mut cz = DMatrix::zeros(nz, 2 * n);
    cz.view_mut((0, 0), (nz, n)).copy_from(&(plant.c1() + &d12f));
    cz.view_mut((0, n), (nz, n)).copy_from(&(-&d12f));

    let mut ce = DMatrix::zeros(p, 2 * n);
    ce.view_mut((0, n), (p, n)).copy_from(plant.c2());

    let ss = |b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>| {
        StateSpace::new(acl.clone(), b, c, d).expect("block dimensions are conformable")
    };
    Ok(TransformedPlant {
        p11: ss(bw.clone(), cz.clone(), plant.d11().clone()),
        p12: ss(bv, cz, plant.d12().clone()),
        p21: ss(bw, ce, plant.d21().clone()),
        f: cf.f.clone(),
        l: cf.l.clone(),
    })
}
