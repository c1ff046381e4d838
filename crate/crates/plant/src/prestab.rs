use std::collections::HashMap;

use conic::{ConicProblem, SolveOptions, SolveStatus};
use nalgebra::DMatrix;
use netgraph::BlockPartition;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sstf::spectral_radius;

use crate::{NetworkedPlant, PlantError};

/// Contraction factors tried in order; each certifies `ρ(A+B₂F) ≤ c`.
const CONTRACTIONS: [f64; 3] = [0.9, 0.95, 0.99];
/// Entrywise bound on the auxiliary variable `Z = F·X`, preventing
/// ill-conditioned gain extractions.
const Z_BOUND: f64 = 1e4;
/// Margin below one required of the achieved spectral radii.
const STABILITY_MARGIN: f64 = 1e-9;
/// Draws for the randomized fallback search.
const RANDOM_SAMPLES: usize = 5000;
const RANDOM_SEED: u64 = 0x5ab1_11ce;

/// Pre-stabilizing gains for a plant, with the achieved spectral radii.
#[derive(Debug, Clone)]
pub struct PrestabilizedPlant {
    /// State-feedback gain with the adjacency block pattern: `F^{[i,j]} = 0`
    /// unless `j ∈ N_i`.
    pub f: DMatrix<f64>,
    /// Block-diagonal observer gain.
    pub l: DMatrix<f64>,
    /// `ρ(A + B₂F)`.
    pub state_radius: f64,
    /// `ρ(A + LC₂)`.
    pub observer_radius: f64,
}

/// Synthesizes sparse pre-stabilizing gains `(F, L)` for a networked plant:
/// `F` on the adjacency block pattern, `L` block-diagonal, both sides
/// Schur-stabilizing.
///
/// Already-stable plants get `F = 0`, `L = 0`. Otherwise each side is
/// solved independently through the block-diagonal-Lyapunov sufficient
/// condition: find `X ⪰ I` block-diagonal and patterned `Z` with
///
/// ```text
///     ⎡ c²X          (AX + B₂Z)ᵀ ⎤
///     ⎢                           ⎥ ⪰ 0,        F = Z·X⁻¹,
///     ⎣ AX + B₂Z     X           ⎦
/// ```
///
/// which certifies `ρ(A + B₂F) ≤ c < 1` because `P = X⁻¹` is a Lyapunov
/// certificate; block-diagonal `X` keeps `F`'s pattern equal to `Z`'s. The
/// observer side solves the same program on `(Aᵀ, C₂ᵀ)` with a
/// block-diagonal pattern and returns `L = Gᵀ`. When the semidefinite
/// program fails at every contraction level, a seeded randomized search
/// over patterned gains takes over.
///
/// # Errors
/// [`PlantError::PrestabilizationFailed`] with the best radii reached when
/// neither route stabilizes a side.
pub fn prestabilize(plant: &NetworkedPlant) -> Result<PrestabilizedPlant, PlantError> {
    let n = plant.state_dim();
    let (m, p) = (plant.partitions().u.total(), plant.partitions().y.total());
    if plant.is_stable() {
        return Ok(PrestabilizedPlant {
            f: DMatrix::zeros(m, n),
            l: DMatrix::zeros(n, p),
            state_radius: plant.spectral_radius(),
            observer_radius: plant.spectral_radius(),
        });
    }

    let graph = plant.graph();
    let parts = plant.partitions();
    let state_side = synthesize_gain(
        plant.a(),
        plant.b2(),
        &parts.x,
        &parts.u,
        |i, j| graph.has_edge(j, i),
    )?;
    let observer_side = synthesize_gain(
        &plant.a().transpose(),
        &plant.c2().transpose(),
        &parts.x,
        &parts.y,
        |i, j| i == j,
    )?;
    match (state_side, observer_side) {
        (GainOutcome::Stabilizing(f, state_radius), GainOutcome::Stabilizing(lt, observer_radius)) => {
            Ok(PrestabilizedPlant {
                f,
                l: lt.transpose(),
                state_radius,
                observer_radius,
            })
        }
        (state, observer) => Err(PlantError::PrestabilizationFailed {
            state_radius: state.radius(),
            observer_radius: observer.radius(),
        }),
    }
}

enum GainOutcome {
    Stabilizing(DMatrix<f64>, f64),
    Failed(f64),
}

impl GainOutcome {
    fn radius(&self) -> f64 {
        match self {
            GainOutcome::Stabilizing(_, r) | GainOutcome::Failed(r) => *r,
        }
    }
}

/// Finds patterned `G` with `ρ(a + b·G) < 1`: the Lyapunov SDP at each
/// contraction level, then the randomized fallback.
fn synthesize_gain(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    x_part: &BlockPartition,
    g_row_part: &BlockPartition,
    pattern: impl Fn(usize, usize) -> bool + Copy,
) -> Result<GainOutcome, PlantError> {
    for contraction in CONTRACTIONS {
        if let Some(g) = lyapunov_gain(a, b, x_part, g_row_part, pattern, contraction)? {
            let radius = spectral_radius(&(a + b * &g));
            if radius < 1.0 - STABILITY_MARGIN {
                return Ok(GainOutcome::Stabilizing(g, radius));
            }
        }
    }
    Ok(random_gain_search(a, b, x_part, g_row_part, pattern))
}

/// One Lyapunov SDP; `None` when the solver does not reach optimality or
/// the certificate cannot be inverted.
fn lyapunov_gain(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    x_part: &BlockPartition,
    g_row_part: &BlockPartition,
    pattern: impl Fn(usize, usize) -> bool,
    contraction: f64,
) -> Result<Option<DMatrix<f64>>, PlantError> {
    let n = a.nrows();
    let mg = b.ncols();
    let mut problem = ConicProblem::new();

    // X: symmetric block-diagonal, one free variable per in-block pair.
    let mut x_idx: HashMap<(usize, usize), usize> = HashMap::new();
    for blk in 0..x_part.block_count() {
        for r in x_part.range(blk) {
            for c in x_part.range(blk) {
                if r <= c {
                    let var = problem.add_free_vars(1);
                    x_idx.insert((r, c), var);
                    if r == c {
                        problem.add_objective_term(var, 1.0);
                    }
                }
            }
        }
    }
    let x_at = |r: usize, c: usize| x_idx.get(&(r.min(c), r.max(c))).copied();

    // Z: free variables on the gain pattern only.
    let mut z_idx: HashMap<(usize, usize), usize> = HashMap::new();
    for bi in 0..g_row_part.block_count() {
        for bj in 0..x_part.block_count() {
            if !pattern(bi, bj) {
                continue;
            }
            for r in g_row_part.range(bi) {
                for c in x_part.range(bj) {
                    z_idx.insert((r, c), problem.add_free_vars(1));
                }
            }
        }
    }

    // X − I ⪰ 0 through an entrywise-tied slack block.
    let margin = problem.add_psd_block(n);
    for r in 0..n {
        for c in r..n {
            let (idx, mult) = margin.entry(r, c);
            let rhs = if r == c { -1.0 } else { 0.0 };
            let mut terms = vec![(idx, mult)];
            if let Some(x) = x_at(r, c) {
                terms.push((x, -1.0));
            }
            problem.add_eq_row(&terms, rhs);
        }
    }

    // The Lyapunov block, tied entrywise to [[c²X, (AX+BZ)ᵀ], [AX+BZ, X]].
    let lyap = problem.add_psd_block(2 * n);
    for r in 0..2 * n {
        for c in r..2 * n {
            let (idx, mult) = lyap.entry(r, c);
            let mut terms = vec![(idx, mult)];
            if r < n && c < n {
                if let Some(x) = x_at(r, c) {
                    terms.push((x, -contraction * contraction));
                }
            } else if r >= n && c >= n {
                if let Some(x) = x_at(r - n, c - n) {
                    terms.push((x, -1.0));
                }
            } else {
                // Entry (r, c) with r < n ≤ c sits in (AX + BZ)ᵀ: it equals
                // row c−n, column r of AX + BZ.
                let (i, j) = (c - n, r);
                for k in 0..n {
                    if a[(i, k)] != 0.0 {
                        if let Some(x) = x_at(k, j) {
                            terms.push((x, -a[(i, k)]));
                        }
                    }
                }
                for k in 0..mg {
                    if b[(i, k)] != 0.0 {
                        if let Some(&z) = z_idx.get(&(k, j)) {
                            terms.push((z, -b[(i, k)]));
                        }
                    }
                }
            }
            problem.add_eq_row(&terms, 0.0);
        }
    }

    // |Z| ≤ bound, keeping the extracted gains finite and well-scaled.
    for &z in z_idx.values() {
        let hi = problem.add_nonneg_vars(1);
        problem.add_eq_row(&[(z, 1.0), (hi, 1.0)], Z_BOUND);
        let lo = problem.add_nonneg_vars(1);
        problem.add_eq_row(&[(z, -1.0), (lo, 1.0)], Z_BOUND);
    }

    let solution = problem.solve(&SolveOptions::default())?;
    if solution.status != SolveStatus::Optimal {
        return Ok(None);
    }

    // Recover G = Z·X⁻¹ block-by-block so off-pattern blocks stay exactly
    // zero.
    let mut g = DMatrix::zeros(mg, n);
    for bj in 0..x_part.block_count() {
        let s = x_part.size(bj);
        let o = x_part.offset(bj);
        let mut x_blk = DMatrix::zeros(s, s);
        for r in 0..s {
            for c in 0..s {
                x_blk[(r, c)] = solution.x[x_at(o + r, o + c).expect("in-block entry")];
            }
        }
        let Some(x_inv) = x_blk.try_inverse() else {
            return Ok(None);
        };
        let mut z_blk = DMatrix::zeros(mg, s);
        for ((zr, zc), &var) in &z_idx {
            if *zc >= o && *zc < o + s {
                z_blk[(*zr, *zc - o)] = solution.x[var];
            }
        }
        let g_cols = &z_blk * &x_inv;
        for r in 0..mg {
            for c in 0..s {
                // Only pattern rows can be nonzero; writing all rows keeps
                // exact zeros because z_blk is zero off pattern.
                g[(r, o + c)] = g_cols[(r, c)];
            }
        }
    }
    Ok(Some(g))
}

/// Seeded random search over patterned gains; keeps the smallest achieved
/// radius.
fn random_gain_search(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    x_part: &BlockPartition,
    g_row_part: &BlockPartition,
    pattern: impl Fn(usize, usize) -> bool,
) -> GainOutcome {
    let n = a.nrows();
    let mg = b.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let mut best_radius = spectral_radius(a);
    let mut best: Option<DMatrix<f64>> = None;
    let scales = [0.1, 0.3, 1.0, 3.0, 10.0];
    for sample in 0..RANDOM_SAMPLES {
        let scale = scales[sample % scales.len()];
        let mut g = DMatrix::zeros(mg, n);
        for bi in 0..g_row_part.block_count() {
            for bj in 0..x_part.block_count() {
                if !pattern(bi, bj) {
                    continue;
                }
                for r in g_row_part.range(bi) {
                    for c in x_part.range(bj) {
                        g[(r, c)] = scale * (rng.gen::<f64>() * 2.0 - 1.0);
                    }
                }
            }
        }
        let radius = spectral_radius(&(a + b * &g));
        if radius < best_radius {
            best_radius = radius;
            best = Some(g);
            if best_radius < 0.9 {
                break;
            }
        }
    }
    match best {
        Some(g) if best_radius < 1.0 - STABILITY_MARGIN => GainOutcome::Stabilizing(g, best_radius),
        _ => GainOutcome::Failed(best_radius),
    }
}
