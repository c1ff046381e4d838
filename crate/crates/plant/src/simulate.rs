use nalgebra::DVector;
use sstf::FirTransferMatrix;

use crate::{NetworkedPlant, PlantError};

/// Trajectories produced by a closed-loop simulation, one vector per step.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    /// Performance outputs `z_0..z_{T−1}`.
    pub z: Vec<DVector<f64>>,
    /// Control inputs `u_0..u_{T−1}`.
    pub u: Vec<DVector<f64>>,
    /// Measurements `y_0..y_{T−1}`.
    pub y: Vec<DVector<f64>>,
}

/// Simulates the controller `K(Q)` on a stable plant for `t_end` steps from
/// zero initial state, without ever forming `K = Q(I + P₂₂·Q)⁻¹`: an
/// internal model copy of `P₂₂` reconstructs the innovation
/// `e = y − P₂₂·u`, and the control is `u = Q ∗ e`.
///
/// # Errors
/// Rejects unstable plants (use [`recover_and_simulate_with_gains`] with
/// pre-stabilizing gains) and dimension mismatches between `Q`, `w`, and
/// the plant.
pub fn recover_and_simulate(
    q: &FirTransferMatrix,
    plant: &NetworkedPlant,
    w: &[DVector<f64>],
    t_end: usize,
) -> Result<SimulationResult, PlantError> {
    if !plant.is_stable() {
        return Err(PlantError::UnstablePlant(plant.spectral_radius()));
    }
    let n = plant.state_dim();
    let (m, p) = (plant.partitions().u.total(), plant.partitions().y.total());
    let f = nalgebra::DMatrix::zeros(m, n);
    let l = nalgebra::DMatrix::zeros(n, p);
    recover_and_simulate_with_gains(q, plant, &f, &l, w, t_end)
}

/// Simulates the controller `K(Q)` defined through the doubly coprime
/// factorization around gains `(F, L)`, in observer/innovation form:
///
/// ```text
///     e_t  = y_t − C₂·x̂_t
///     u_t  = F·x̂_t + (Q ∗ e)_t
///     x̂⁺  = (A + LC₂)·x̂ + B₂·u_t − L·y_t
/// ```
///
/// With `F = L = 0` this reduces to the internal-model form used for
/// stable plants. The plant itself may be unstable; for stabilizing gains
/// and stable `Q` the closed loop is stable.
///
/// # Errors
/// Rejects dimension mismatches between `Q`, `(F, L)`, `w`, and the plant.
pub fn recover_and_simulate_with_gains(
    q: &FirTransferMatrix,
    plant: &NetworkedPlant,
    f: &nalgebra::DMatrix<f64>,
    l: &nalgebra::DMatrix<f64>,
    w: &[DVector<f64>],
    t_end: usize,
) -> Result<SimulationResult, PlantError> {
    let n = plant.state_dim();
    let (m, p) = (plant.partitions().u.total(), plant.partitions().y.total());
    let nw = plant.partitions().w.total();
    if q.rows() != m || q.cols() != p {
        return Err(PlantError::SignalMismatch(format!(
            "Q is {}x{}, plant expects {m}x{p}",
            q.rows(),
            q.cols()
        )));
    }
    if f.nrows() != m || f.ncols() != n || l.nrows() != n || l.ncols() != p {
        return Err(PlantError::SignalMismatch(format!(
            "gains F {}x{}, L {}x{} do not fit a plant with n={n}, m={m}, p={p}",
            f.nrows(),
            f.ncols(),
            l.nrows(),
            l.ncols()
        )));
    }
    if w.len() < t_end {
        return Err(PlantError::SignalMismatch(format!(
            "disturbance has {} samples, simulation needs {t_end}",
            w.len()
        )));
    }
    if let Some(bad) = w.iter().take(t_end).find(|wt| wt.len() != nw) {
        return Err(PlantError::SignalMismatch(format!(
            "disturbance sample has dimension {}, expected {nw}",
            bad.len()
        )));
    }

    let a_l = plant.a() + l * plant.c2();
    let mut x = DVector::zeros(n);
    let mut x_hat = DVector::zeros(n);
    let mut innovations: Vec<DVector<f64>> = Vec::with_capacity(t_end);
    let mut result = SimulationResult {
        z: Vec::with_capacity(t_end),
        u: Vec::with_capacity(t_end),
        y: Vec::with_capacity(t_end),
    };
    for (t, w_t) in w.iter().take(t_end).enumerate() {
        let y_t = plant.c2() * &x + plant.d21() * w_t;
        innovations.push(&y_t - plant.c2() * &x_hat);
        let mut v_t = DVector::zeros(m);
        for tau in 0..=t.min(q.order()) {
            v_t += q.coeff(tau) * &innovations[t - tau];
        }
        let u_t = f * &x_hat + v_t;
        let z_t = plant.c1() * &x + plant.d11() * w_t + plant.d12() * &u_t;
        let x_next = plant.a() * &x + plant.b1() * w_t + plant.b2() * &u_t;
        x_hat = &a_l * &x_hat + plant.b2() * &u_t - l * &y_t;
        x = x_next;
        result.z.push(z_t);
        result.u.push(u_t);
        result.y.push(y_t);
    }
    Ok(result)
}
