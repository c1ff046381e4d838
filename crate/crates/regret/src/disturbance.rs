use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::psi::hermitian_spectrum;
use crate::{PsiSample, RegretError};

/// Tolerance for matching a requested frequency to a grid sample.
const OMEGA_MATCH_TOL: f64 = 1e-9;
/// Relative eigenvalue gap below which the top eigenspace is flagged.
const DEGENERACY_REL_TOL: f64 = 1e-6;
/// Dense quadrature points clustered around each spectral lobe.
const CLUSTER_POINTS: usize = 2048;
/// Cluster half-width in units of the coarse grid spacing.
const CLUSTER_SPACINGS: f64 = 4.0;

/// A unit-energy probing disturbance tuned to one frequency, with a report
/// of how much of the spectral gap it actually extracts.
#[derive(Clone, Debug)]
pub struct WorstCaseDisturbance {
    /// Time-major signal, one sample per step, each of disturbance dimension.
    pub signal: Vec<DVector<f64>>,
    /// The grid frequency the probe is tuned to.
    pub omega: f64,
    /// Predicted energy-gap of the probe divided by `λ_max(Ψ(ω))`; approaches
    /// one as the window grows when the top eigenvalue is well separated.
    pub achieved_ratio: f64,
    /// The top eigenvalue is (nearly) repeated, so any single direction may
    /// leave the ratio short of one.
    pub near_degenerate: bool,
    /// The probe sits at `ω = ±π`, where the construction degenerates to an
    /// alternating-sign real signal.
    pub edge_fallback: bool,
}

impl WorstCaseDisturbance {
    /// The signal as plain time-major rows (for JSON reports).
    pub fn signal_rows(&self) -> Vec<Vec<f64>> {
        self.signal.iter().map(|w| w.iter().copied().collect()).collect()
    }
}

/// Builds a unit-energy disturbance that concentrates its spectrum at one
/// sampled frequency along the top eigenvector of the gap matrix there.
///
/// Each channel is a Hann-windowed cosine `α_i·cos(ω₀t + θ_i)` over
/// `t < t_len`, with per-channel amplitude and phase read off the top
/// eigenvector of `Ψ(e^{jω₀})` (amplitudes real, phases in `(−π, 0]`), then
/// normalized to unit energy. The reported ratio integrates the quadratic
/// form of the probe's spectrum against the sampled gap matrices (densely
/// refined around the lobes) and divides by `λ_max`.
///
/// # Errors
/// Rejects an empty window, a frequency that is not a sample point, and
/// degenerate inputs that leave nothing to normalize.
pub fn worst_case_disturbance(
    samples: &[PsiSample],
    omega0: f64,
    t_len: usize,
) -> Result<WorstCaseDisturbance, RegretError> {
    if t_len == 0 {
        return Err(RegretError::EmptyWindow);
    }
    let idx = samples
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (a.omega - omega0)
                .abs()
                .partial_cmp(&(b.omega - omega0).abs())
                .expect("grid frequencies are finite")
        })
        .map(|(i, _)| i)
        .ok_or(RegretError::OmegaNotInGrid(omega0))?;
    if (samples[idx].omega - omega0).abs() > OMEGA_MATCH_TOL {
        return Err(RegretError::OmegaNotInGrid(omega0));
    }
    let sample = &samples[idx];
    let n_w = sample.psi.nrows();
    if n_w == 0 {
        return Err(RegretError::DimensionMismatch(
            "disturbance dimension is zero".into(),
        ));
    }
    let omega = sample.omega;

    let (values, mut v) = hermitian_spectrum(&sample.psi)?;
    // Embedded eigenvalues come doubled, so the second-largest true
    // eigenvalue sits at index 2.
    let near_degenerate = n_w >= 2
        && (values[0] - values[2]) <= DEGENERACY_REL_TOL * values[0].abs().max(1.0);

    // Fix the free global phase of the eigenvector deterministically: make
    // its largest component real positive. At ω₀ ∈ {0, ±π} (real Ψ) this
    // keeps the per-channel amplitudes from collapsing toward a purely
    // imaginary representative.
    let k_star = (0..n_w)
        .max_by(|&a, &b| {
            v[a].norm()
                .partial_cmp(&v[b].norm())
                .expect("eigenvector entries are finite")
        })
        .expect("dimension checked above");
    let rotation = Complex64::from_polar(1.0, -v[k_star].arg());
    v *= rotation;

    // Per-channel amplitude/phase with phases folded into (−π, 0].
    let mut alpha = vec![0.0; n_w];
    let mut theta = vec![0.0; n_w];
    for i in 0..n_w {
        let r = v[i].norm();
        if r == 0.0 {
            continue;
        }
        let phi = v[i].arg();
        if phi > 0.0 {
            alpha[i] = -r;
            theta[i] = phi - PI;
        } else {
            alpha[i] = r;
            theta[i] = phi;
        }
    }

    // Hann window; one- and two-sample windows fall back to rectangular
    // (the two-sample Hann is identically zero).
    let window = |t: usize| -> f64 {
        if t_len <= 2 {
            1.0
        } else {
            0.5 * (1.0 - (2.0 * PI * t as f64 / (t_len - 1) as f64).cos())
        }
    };

    let mut signal: Vec<DVector<f64>> = (0..t_len)
        .map(|t| {
            let win = window(t);
            DVector::from_fn(n_w, |i, _| {
                win * alpha[i] * (omega * t as f64 + theta[i]).cos()
            })
        })
        .collect();
    let energy: f64 = signal.iter().map(|w| w.norm_squared()).sum();
    if energy <= f64::MIN_POSITIVE {
        return Err(RegretError::ZeroEnergy);
    }
    let scale = energy.sqrt().recip();
    for w in &mut signal {
        *w *= scale;
    }

    let achieved_ratio = quadratic_form_ratio(samples, idx, &signal);
    let edge_fallback = (omega.abs() - PI).abs() <= 1e-12;

    Ok(WorstCaseDisturbance {
        signal,
        omega,
        achieved_ratio,
        near_degenerate,
        edge_fallback,
    })
}

/// Predicted energy gap of the probe, relative to `λ_max` at the probe
/// frequency: `(1/2π)∫ ŵ*Ψŵ dω / λ_max`, with `Ψ` linearly interpolated
/// between samples and the quadrature refined around the spectral lobes.
fn quadratic_form_ratio(samples: &[PsiSample], idx: usize, signal: &[DVector<f64>]) -> f64 {
    let lambda = samples[idx].lambda_max;
    if lambda <= f64::MIN_POSITIVE {
        return 0.0;
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.omega).collect();
    let lo = xs[0];
    let hi = *xs.last().expect("samples are nonempty");
    if hi <= lo {
        // Single-frequency sample set: treat the spectrum as flat.
        let quad: f64 = signal.iter().map(|w| quadratic_form(&samples[idx].psi, w)).sum();
        return quad / lambda;
    }
    // Grids on [0, π] stand in for the full circle by conjugate symmetry:
    // the integrand is even, so the half-integral doubles.
    let half_domain = lo >= -1e-12;
    let spacing = (hi - lo) / (xs.len() - 1) as f64;
    let radius = CLUSTER_SPACINGS * spacing;

    let mut points: Vec<f64> = xs.clone();
    let mut add_cluster = |center: f64| {
        let c_lo = (center - radius).max(lo);
        let c_hi = (center + radius).min(hi);
        if c_hi > c_lo {
            for k in 0..=CLUSTER_POINTS {
                points.push(c_lo + (c_hi - c_lo) * k as f64 / CLUSTER_POINTS as f64);
            }
        }
    };
    let center = samples[idx].omega;
    add_cluster(center);
    if !half_domain && center.abs() > 1e-12 {
        add_cluster(-center);
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("quadrature points are finite"));
    points.dedup();

    // Linear interpolation commutes with the quadratic form, so evaluate the
    // form against the two bracketing samples and blend scalars.
    let mut seg = 0usize;
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &w in &points {
        while seg + 2 < xs.len() && xs[seg + 1] < w {
            seg += 1;
        }
        let (x0, x1) = (xs[seg], xs[seg + 1]);
        let s = ((w - x0) / (x1 - x0)).clamp(0.0, 1.0);
        let spectrum = dtft(signal, w);
        let q0 = quadratic_form(&samples[seg].psi, &spectrum);
        let q1 = quadratic_form(&samples[seg + 1].psi, &spectrum);
        let q = (1.0 - s) * q0 + s * q1;
        if let Some((wp, qp)) = prev {
            integral += 0.5 * (q + qp) * (w - wp);
        }
        prev = Some((w, q));
    }
    let full_circle = if half_domain { 2.0 * integral } else { integral };
    full_circle / (2.0 * PI * lambda)
}

/// Discrete-time Fourier transform of a finite signal at one frequency.
fn dtft(signal: &[DVector<f64>], omega: f64) -> DVector<Complex64> {
    let n_w = signal.first().map_or(0, DVector::len);
    let step = Complex64::from_polar(1.0, -omega);
    let mut phasor = Complex64::new(1.0, 0.0);
    let mut acc = DVector::from_element(n_w, Complex64::new(0.0, 0.0));
    for w in signal {
        for i in 0..n_w {
            acc[i] += phasor * w[i];
        }
        phasor *= step;
    }
    acc
}

/// `x*Hx` for Hermitian `H` with a real or complex vector (real part taken;
/// the imaginary part vanishes analytically).
fn quadratic_form<S>(h: &DMatrix<Complex64>, x: &DVector<S>) -> f64
where
    S: Copy + Into<Complex64> + nalgebra::Scalar,
{
    let n = h.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let xi: Complex64 = x[i].into();
            let xj: Complex64 = x[j].into();
            acc += xi.conj() * h[(i, j)] * xj;
        }
    }
    acc.re
}
