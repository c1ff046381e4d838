#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use regret::LoopBlocks;
use sstf::{spectral_radius, FirTransferMatrix, StateSpace};

/// Signal dimensions for a randomly generated loop.
#[derive(Clone, Copy, Debug)]
pub struct LoopDims {
    pub states: usize,
    pub n_w: usize,
    pub n_u: usize,
    pub n_y: usize,
    pub n_z: usize,
}

impl LoopDims {
    pub fn small() -> Self {
        Self {
            states: 4,
            n_w: 2,
            n_u: 2,
            n_y: 2,
            n_z: 3,
        }
    }
}

/// Dense state-space block with the state matrix rescaled to a target
/// spectral radius.
pub fn random_stable_ss(
    rng: &mut ChaCha8Rng,
    states: usize,
    rows: usize,
    cols: usize,
    radius: f64,
) -> StateSpace {
    let mut a = DMatrix::from_fn(states, states, |_, _| rng.gen_range(-1.0..1.0));
    let rho = spectral_radius(&a);
    if rho > 1e-12 {
        a *= radius / rho;
    }
    let b = DMatrix::from_fn(states, cols, |_, _| rng.gen_range(-1.0..1.0));
    let c = DMatrix::from_fn(rows, states, |_, _| rng.gen_range(-1.0..1.0));
    let d = DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-0.5..0.5));
    StateSpace::new(a, b, c, d).expect("dimensions are conformable")
}

/// Random stable loop with independent realizations for the three channels.
pub fn random_blocks(rng: &mut ChaCha8Rng, dims: LoopDims, radius: f64) -> LoopBlocks {
    let p11 = random_stable_ss(rng, dims.states, dims.n_z, dims.n_w, radius);
    let p12 = random_stable_ss(rng, dims.states, dims.n_z, dims.n_u, radius);
    let p21 = random_stable_ss(rng, dims.states, dims.n_y, dims.n_w, radius);
    LoopBlocks::new(p11, p12, p21).expect("blocks are stable by construction")
}

/// Dense FIR parameter with uniform coefficients.
pub fn random_fir(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    order: usize,
    scale: f64,
) -> FirTransferMatrix {
    let coeffs = (0..=order)
        .map(|_| DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-scale..scale)))
        .collect();
    FirTransferMatrix::from_coeffs(coeffs).expect("coefficients are conformable")
}

/// Random complex matrix with entries in the unit box.
pub fn random_complex(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
) -> DMatrix<num_complex::Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Time-major random disturbance normalized to unit sup-norm.
pub fn unit_inf_disturbance(rng: &mut ChaCha8Rng, steps: usize, n_w: usize) -> Vec<DVector<f64>> {
    let mut w: Vec<DVector<f64>> =
        (0..steps)
            .map(|_| DVector::from_fn(n_w, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
    let peak = w
        .iter()
        .flat_map(|v| v.iter().map(|x| x.abs()))
        .fold(0.0, f64::max);
    if peak > 0.0 {
        for v in &mut w {
            *v /= peak;
        }
    }
    w
}
