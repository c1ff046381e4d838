use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{BlockPartition, GraphError};

/// Result of the randomized decentralized-fixed-mode test.
#[derive(Debug, Clone)]
pub struct FixedModeReport {
    /// Eigenvalues of `A` that persisted in `σ(A + B2·K·C2)` across all
    /// random block-diagonal gain draws.
    pub modes: Vec<Complex64>,
    /// Matching tolerance used for eigenvalue pairing.
    pub tol: f64,
}

impl FixedModeReport {
    /// Stabilizability verdict: true iff every fixed mode lies strictly
    /// inside the unit circle.
    pub fn is_stabilizable(&self) -> bool {
        self.modes.iter().all(|m| m.norm() < 1.0)
    }

    /// Fixed modes whose modulus falls inside `1 ± band`: numerically
    /// marginal cases the caller should surface rather than decide on.
    pub fn marginal_modes(&self, band: f64) -> Vec<Complex64> {
        self.modes
            .iter()
            .copied()
            .filter(|m| (m.norm() - 1.0).abs() <= band)
            .collect()
    }
}

/// Estimates the decentralized fixed modes of `(A, B2, C2)` under
/// block-diagonal static output feedback.
///
/// Draws `samples` random gains `K = diag(K_1, …, K_N)` conforming to
/// `partition_m × partition_p` blocks, computes `σ(A + B2·K·C2)`, and keeps
/// the eigenvalues of `A` that reappear (within `tol`, by greedy
/// minimal-distance pairing) for every draw. Fixed modes are exactly the
/// eigenvalues no such feedback can move, so with probability one the
/// surviving set equals the true fixed-mode set.
///
/// # Errors
/// Rejects non-square `A`, non-conformable `B2`/`C2`, or partitions whose
/// totals disagree with the matrix dimensions.
pub fn decentralized_fixed_modes(
    a: &DMatrix<f64>,
    b2: &DMatrix<f64>,
    c2: &DMatrix<f64>,
    partition_m: &BlockPartition,
    partition_p: &BlockPartition,
    samples: usize,
    tol: f64,
) -> Result<FixedModeReport, GraphError> {
    if a.nrows() != a.ncols() {
        return Err(GraphError::DimensionMismatch(format!(
            "A must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if b2.nrows() != n || c2.ncols() != n {
        return Err(GraphError::DimensionMismatch(format!(
            "B2 ({}x{}) and C2 ({}x{}) must conform with A ({n}x{n})",
            b2.nrows(),
            b2.ncols(),
            c2.nrows(),
            c2.ncols()
        )));
    }
    if partition_m.total() != b2.ncols() {
        return Err(GraphError::DimensionMismatch(format!(
            "input partition total {} != B2 columns {}",
            partition_m.total(),
            b2.ncols()
        )));
    }
    if partition_p.total() != c2.nrows() {
        return Err(GraphError::DimensionMismatch(format!(
            "output partition total {} != C2 rows {}",
            partition_p.total(),
            c2.nrows()
        )));
    }
    if partition_m.block_count() != partition_p.block_count() {
        return Err(GraphError::DimensionMismatch(format!(
            "input partition has {} blocks, output partition {}",
            partition_m.block_count(),
            partition_p.block_count()
        )));
    }
    assert!(samples >= 2, "need at least 2 random gain draws");

    let mut rng = ChaCha8Rng::seed_from_u64(FIXED_MODE_SEED);
    let mut survivors = eigenvalues(a);
    // Mix small and large gains so modes that only move under strong feedback
    // are still detected.
    let scales = [0.1, 1.0, 10.0];
    for s in 0..samples {
        let scale = scales[s % scales.len()];
        let mut k = DMatrix::zeros(b2.ncols(), c2.nrows());
        for blk in 0..partition_m.block_count() {
            for r in partition_m.range(blk) {
                for c in partition_p.range(blk) {
                    k[(r, c)] = scale * (rng.gen::<f64>() * 2.0 - 1.0);
                }
            }
        }
        let perturbed = a + b2 * &k * c2;
        let new_eigs = eigenvalues(&perturbed);
        survivors.retain(|&lam| {
            new_eigs
                .iter()
                .any(|&mu| (lam - mu).norm() <= tol.max(1e-12))
        });
        if survivors.is_empty() {
            break;
        }
    }
    Ok(FixedModeReport {
        modes: survivors,
        tol,
    })
}

/// Fixed seed: the diagnostic is randomized but reproducible run to run.
const FIXED_MODE_SEED: u64 = 0x51ab_1e5e_ed00_0001;

/// Eigenvalues via a real Schur decomposition with a capped iteration budget.
///
/// The unbounded QR iteration can stall on permutation-like matrices, so on
/// non-convergence the matrix is retried under a fixed diagonal similarity
/// scaling (spectrum-preserving) that breaks the stalling structure.
fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    let n = m.nrows();
    let budget = 100 * n + 1024;
    if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, budget) {
        return schur.complex_eigenvalues().iter().copied().collect();
    }
    for attempt in 1..=4u32 {
        let scale: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.05 * attempt as f64 * ((i % 7) as f64 + 1.0) / 7.0)
            .collect();
        let scaled = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * scale[i] / scale[j]);
        if let Some(schur) = Schur::try_new(scaled, f64::EPSILON, budget) {
            return schur.complex_eigenvalues().iter().copied().collect();
        }
    }
    // Last resort keeps the original behavior (may be slow, never wrong).
    m.clone().complex_eigenvalues().iter().copied().collect()
}
