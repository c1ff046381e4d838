use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::SstfError;

/// A finite, sorted, deduplicated set of frequencies in `[−π, π]` at which
/// frequency-domain constraints and norms are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
}

impl FrequencyGrid {
    /// Builds a grid from arbitrary points, sorting and deduplicating.
    ///
    /// # Errors
    /// Rejects empty input, NaN, or points outside `[−π, π]`.
    pub fn from_omegas(mut omegas: Vec<f64>) -> Result<Self, SstfError> {
        if omegas.is_empty() {
            return Err(SstfError::InvalidGrid("grid must be nonempty".into()));
        }
        if omegas.iter().any(|w| !w.is_finite() || w.abs() > PI + 1e-12) {
            return Err(SstfError::InvalidGrid(
                "points must be finite and within [-pi, pi]".into(),
            ));
        }
        omegas.sort_by(|a, b| a.partial_cmp(b).expect("no NaN after check"));
        omegas.dedup();
        Ok(Self { omegas })
    }

    /// `count` uniform points on `[0, π]`, endpoints included — the default
    /// synthesis grid, exploiting conjugate symmetry of real-coefficient
    /// systems (values at `−ω` are conjugates of values at `ω`).
    ///
    /// # Panics
    /// Panics when `count < 2`.
    pub fn uniform_half(count: usize) -> Self {
        assert!(count >= 2, "need at least the two endpoints");
        let omegas = (0..count)
            .map(|k| PI * k as f64 / (count - 1) as f64)
            .collect();
        Self { omegas }
    }

    /// `count` uniform points on `[−π, π]`, endpoints included.
    ///
    /// # Panics
    /// Panics when `count < 2`.
    pub fn uniform_full(count: usize) -> Self {
        assert!(count >= 2, "need at least the two endpoints");
        let omegas = (0..count)
            .map(|k| -PI + 2.0 * PI * k as f64 / (count - 1) as f64)
            .collect();
        Self { omegas }
    }

    /// Returns a grid with extra points merged in (e.g. near resonances).
    pub fn with_extra_points(&self, extra: &[f64]) -> Result<Self, SstfError> {
        let mut all = self.omegas.clone();
        all.extend_from_slice(extra);
        Self::from_omegas(all)
    }

    /// The grid points in ascending order.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    /// Whether the grid is empty (never true for constructed grids).
    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Iterator over grid points.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.omegas.iter().copied()
    }
}
