use nalgebra::DMatrix;
use num_complex::Complex64;
use sstf::{spectral_radius, StateSpace};

use crate::{NetworkedPlant, PlantError};

/// Margin below one required of the stabilized spectral radii.
const STABILITY_MARGIN: f64 = 1e-9;

/// A doubly coprime factorization of `P₂₂` around stabilizing gains
/// `(F, L)`: eight stable factors satisfying
///
/// ```text
///     ⎡ U_l  −V_l ⎤ ⎡ M_r  V_r ⎤
///     ⎢           ⎥ ⎢          ⎥ = I,      P₂₂ = N_r · M_r⁻¹ = M_l⁻¹ · N_l.
///     ⎣ −N_l  M_l ⎦ ⎣ N_r  U_r ⎦
/// ```
///
/// Every stabilizing controller is `K(Q) = (V_r − M_r·Q)(U_r − N_r·Q)⁻¹`
/// for a stable parameter `Q`; at `Q = 0` this is the observer-based
/// controller `K₀ = V_r·U_r⁻¹` realized by [`CoprimeFactorization::k0_realization`].
#[derive(Debug, Clone)]
pub struct CoprimeFactorization {
    /// Right factor `M_r` with `P₂₂ = N_r·M_r⁻¹`.
    pub m_r: StateSpace,
    /// Right factor `N_r`.
    pub n_r: StateSpace,
    /// Right factor `V_r` (numerator of `K₀`).
    pub v_r: StateSpace,
    /// Right factor `U_r` (denominator of `K₀`).
    pub u_r: StateSpace,
    /// Left factor `M_l` with `P₂₂ = M_l⁻¹·N_l`.
    pub m_l: StateSpace,
    /// Left factor `N_l`.
    pub n_l: StateSpace,
    /// Left factor `U_l`.
    pub u_l: StateSpace,
    /// Left factor `V_l`.
    pub v_l: StateSpace,
    /// State-feedback gain, block pattern of the adjacency.
    pub f: DMatrix<f64>,
    /// Observer gain, block-diagonal.
    pub l: DMatrix<f64>,
    k0: StateSpace,
}

impl CoprimeFactorization {
    /// The observer-based controller `K₀ = V_r·U_r⁻¹` as the explicit
    /// realization `(A + B₂F + LC₂, −L, F, 0)`.
    pub fn k0_realization(&self) -> &StateSpace {
        &self.k0
    }

    /// Largest entry magnitude of
    /// `[[U_l, −V_l], [−N_l, M_l]]·[[M_r, V_r], [N_r, U_r]] − I` over the
    /// sampled frequencies (radians on the upper unit circle).
    pub fn identity_residual(&self, omegas: &[f64]) -> Result<f64, PlantError> {
        let m = self.m_r.cols();
        let q = self.u_r.cols();
        let mut worst = 0.0f64;
        for &omega in omegas {
            let left = stack2x2(
                &self.u_l.freq_response(omega)?,
                &(-&self.v_l.freq_response(omega)?),
                &(-&self.n_l.freq_response(omega)?),
                &self.m_l.freq_response(omega)?,
            );
            let right = stack2x2(
                &self.m_r.freq_response(omega)?,
                &self.v_r.freq_response(omega)?,
                &self.n_r.freq_response(omega)?,
                &self.u_r.freq_response(omega)?,
            );
            let mut product = left * right;
            for i in 0..m + q {
                product[(i, i)] -= Complex64::new(1.0, 0.0);
            }
            worst = worst.max(product.iter().fold(0.0, |acc, v| acc.max(v.norm())));
        }
        Ok(worst)
    }
}

fn stack2x2(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    c: &DMatrix<Complex64>,
    d: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let (r1, r2) = (a.nrows(), c.nrows());
    let (c1, c2) = (a.ncols(), b.ncols());
    let mut out = DMatrix::zeros(r1 + r2, c1 + c2);
    out.view_mut((0, 0), (r1, c1)).copy_from(a);
    out.view_mut((0, c1), (r1, c2)).copy_from(b);
    out.view_mut((r1, 0), (r2, c1)).copy_from(c);
    out.view_mut((r1, c1), (r2, c2)).copy_from(d);
    out
}

/// Builds the observer-based doubly coprime factorization of `P₂₂` from
/// stabilizing gains: with `A_F = A + B₂F` and `A_L = A + LC₂`,
///
/// ```text
///     M_r = (A_F, B₂, −F, −I)    N_r = (A_F, B₂, −C₂, 0)
///     V_r = (A_F, −L,  F,  0)    U_r = (A_F, −L,  C₂, I)
///     M_l = (A_L,  L,  C₂, I)    N_l = (A_L, B₂,  C₂, 0)
///     U_l = (A_L, −B₂, −F, −I)   V_l = (A_L, −L,  −F, 0)
/// ```
///
/// # Errors
/// Rejects gains with wrong shapes or with `ρ(A+B₂F) ≥ 1` or
/// `ρ(A+LC₂) ≥ 1` (within margin).
pub fn doubly_coprime(
    plant: &NetworkedPlant,
    f: &DMatrix<f64>,
    l: &DMatrix<f64>,
) -> Result<CoprimeFactorization, PlantError> {
    let n = plant.state_dim();
    let (m, p) = (plant.partitions().u.total(), plant.partitions().y.total());
    if f.nrows() != m || f.ncols() != n {
        return Err(PlantError::DimensionMismatch(format!(
            "F is {}x{}, expected {m}x{n}",
            f.nrows(),
            f.ncols()
        )));
    }
    if l.nrows() != n || l.ncols() != p {
        return Err(PlantError::DimensionMismatch(format!(
            "L is {}x{}, expected {n}x{p}",
            l.nrows(),
            l.ncols()
        )));
    }
    let a_f = plant.a() + plant.b2() * f;
    let a_l = plant.a() + l * plant.c2();
    let state_radius = spectral_radius(&a_f);
    let observer_radius = spectral_radius(&a_l);
    if state_radius >= 1.0 - STABILITY_MARGIN || observer_radius >= 1.0 - STABILITY_MARGIN {
        return Err(PlantError::NonStabilizing {
            state_radius,
            observer_radius,
        });
    }

    let b2 = plant.b2().clone();
    let c2 = plant.c2().clone();
    let eye_m = DMatrix::identity(m, m);
    let eye_p = DMatrix::identity(p, p);
    let zero_mp = DMatrix::zeros(m, p);
    let zero_pm = DMatrix::zeros(p, m);
    let ss = |a: &DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>| {
        StateSpace::new(a.clone(), b, c, d).expect("factor dimensions are conformable")
    };
    let k0_a = &a_f + l * plant.c2();
    let k0 = ss(&k0_a, -l.clone(), f.clone(), zero_mp.clone());
    Ok(CoprimeFactorization {
        m_r: ss(&a_f, b2.clone(), -f, -&eye_m),
        n_r: ss(&a_f, b2.clone(), -&c2, zero_pm.clone()),
        v_r: ss(&a_f, -l.clone(), f.clone(), zero_mp.clone()),
        u_r: ss(&a_f, -l.clone(), c2.clone(), eye_p.clone()),
        m_l: ss(&a_l, l.clone(), c2.clone(), eye_p),
        n_l: ss(&a_l, b2.clone(), c2, zero_pm),
        u_l: ss(&a_l, -&b2, -f, -eye_m),
        v_l: ss(&a_l, -l.clone(), -f, zero_mp),
        f: f.clone(),
        l: l.clone(),
        k0,
    })
}

/// The factorization available to every stable plant without synthesis:
/// `U_l = −I`, `V_l = 0`, `N_l = P₂₂`, `M_l = I`, `U_r = I`, `V_r = 0`,
/// `N_r = −P₂₂`, `M_r = −I`, with `F = 0`, `L = 0`. Under it,
/// `K(Q) = Q(I + P₂₂·Q)⁻¹`.
///
/// # Errors
/// Rejects unstable plants.
pub fn trivial_factorization(plant: &NetworkedPlant) -> Result<CoprimeFactorization, PlantError> {
    if !plant.is_stable() {
        return Err(PlantError::UnstablePlant(plant.spectral_radius()));
    }
    let n = plant.state_dim();
    let (m, p) = (plant.partitions().u.total(), plant.partitions().y.total());
    let p22 = plant.p22_realization();
    let neg_p22 = StateSpace::new(
        plant.a().clone(),
        plant.b2().clone(),
        -plant.c2(),
        DMatrix::zeros(p, m),
    )
    .expect("plant dimensions were validated at construction");
    let f = DMatrix::zeros(m, n);
    let l = DMatrix::zeros(n, p);
    let k0 = StateSpace::new(
        plant.a().clone(),
        DMatrix::zeros(n, p),
        DMatrix::zeros(m, n),
        DMatrix::zeros(m, p),
    )
    .expect("plant dimensions were validated at construction");
    Ok(CoprimeFactorization {
        m_r: StateSpace::static_gain(-DMatrix::identity(m, m)),
        n_r: neg_p22,
        v_r: StateSpace::static_gain(DMatrix::zeros(m, p)),
        u_r: StateSpace::static_gain(DMatrix::identity(p, p)),
        m_l: StateSpace::static_gain(DMatrix::identity(p, p)),
        n_l: p22,
        u_l: StateSpace::static_gain(-DMatrix::identity(m, m)),
        v_l: StateSpace::static_gain(DMatrix::zeros(m, p)),
        f,
        l,
        k0,
    })
}
