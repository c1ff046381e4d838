use std::collections::BTreeMap;

use conic::ConicProblem;
use netgraph::FirSparsityMask;
use num_complex::Complex64;
use sstf::FirTransferMatrix;

use crate::freq::FreqLmiData;
use crate::plant_form::SynthesisPlant;
use crate::SynthError;

/// Distinct parameter matrix positions `(r, c)` together with the variable
/// index of each free delay tap at that position.
pub(crate) type PairTaps = Vec<((usize, usize), Vec<(usize, usize)>)>;

/// Groups the mask's free scalar coordinates by matrix position, preserving
/// a deterministic `(r, c)` order; `base` is the variable index of the first
/// parameter coefficient (they are contiguous in mask order).
pub(crate) fn group_pairs(coords: &[(usize, usize, usize)], base: usize) -> PairTaps {
    let mut map: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (k, &(r, c, t)) in coords.iter().enumerate() {
        map.entry((r, c)).or_default().push((t, base + k));
    }
    map.into_iter().collect()
}

/// A built semidefinite program for worst-case quadratic gap minimization,
/// with the variable layout needed to interpret solutions.
///
/// Variable order: the gap bound `λ` (index 0), then one variable per free
/// parameter coefficient in the mask's `(i, j, t)` ordering, then the floor
/// slack, then per-frequency auxiliaries (the complex parameter response,
/// real and imaginary parts per matrix position) followed by that
/// frequency's semidefinite block.
#[derive(Debug)]
pub struct SdpAssembly {
    /// The assembled conic problem (equality form, variables in cones).
    pub problem: ConicProblem,
    /// Index of the scalar bound `λ` (always 0).
    pub lambda_var: usize,
    /// Indices of the parameter coefficients, parallel to `coords`.
    pub q_vars: Vec<usize>,
    /// `(row, col, delay)` of each parameter coefficient.
    pub coords: Vec<(usize, usize, usize)>,
    /// Frequencies whose semidefinite blocks are included.
    pub omegas: Vec<f64>,
    /// Order of each per-frequency semidefinite block after real embedding:
    /// `2·(n_z + n_w)`.
    pub psd_block_order: usize,
}

impl SdpAssembly {
    /// Reads the parameter coefficients out of a solution vector and
    /// reassembles the masked FIR parameter (mask zeros exact by
    /// construction).
    pub fn extract_parameter(
        &self,
        x: &[f64],
        mask: &FirSparsityMask,
    ) -> Result<FirTransferMatrix, SynthError> {
        let values: Vec<f64> = self.q_vars.iter().map(|&v| x[v]).collect();
        Ok(FirTransferMatrix::from_free_values(mask, &values)?)
    }
}

/// Builds the semidefinite program
/// `min λ  s.t.  [[I, F(ω)], [F(ω)*, λI + F̂(ω)*F̂(ω)]] ⪰ 0` for every
/// requested frequency, over mask-constrained FIR parameter coefficients,
/// with `λ ≥ lambda_floor`. Each complex block is real-embedded, so the
/// semidefinite blocks have order `2·(n_z + n_w)`.
///
/// `q_hat` is the reference parameter defining `F̂ = P11 + P12·Q̂·P21`;
/// `None` means a zero reference (`F̂ = 0`), which turns the program into
/// plain worst-case gain minimization.
///
/// The builder is pure and deterministic: identical inputs produce
/// identical triplets, cones, and right-hand sides.
pub fn assemble_spreg2_sdp(
    plant: &SynthesisPlant,
    q_hat: Option<&FirTransferMatrix>,
    mask: &FirSparsityMask,
    omegas: &[f64],
    lambda_floor: f64,
) -> Result<SdpAssembly, SynthError> {
    check_mask_dims(plant, mask)?;
    if let Some(q) = q_hat {
        check_reference_dims(plant, q)?;
    }
    let data = FreqLmiData::new(plant.blocks(), q_hat, omegas)?;
    let subset: Vec<usize> = (0..omegas.len()).collect();
    assemble_sdp_from_data(&data, &subset, mask, lambda_floor)
}

/// Core SDP builder over precomputed frequency data, restricted to the
/// frequency indices in `subset` (the cutting-plane loop re-invokes this
/// with growing subsets without re-evaluating responses).
pub(crate) fn assemble_sdp_from_data(
    data: &FreqLmiData,
    subset: &[usize],
    mask: &FirSparsityMask,
    lambda_floor: f64,
) -> Result<SdpAssembly, SynthError> {
    let coords = mask.free_scalar_coords();
    let nq = coords.len();
    let (n_z, n_w) = match data.p11.first() {
        Some(p) => (p.nrows(), p.ncols()),
        None => {
            return Err(SynthError::DimensionMismatch(
                "semidefinite assembly needs at least one frequency".into(),
            ))
        }
    };
    let m = n_z + n_w;
    let emb = 2 * m;

    let mut problem = ConicProblem::new();
    let free0 = problem.add_free_vars(1 + nq);
    let lambda_var = free0;
    let q_vars: Vec<usize> = (free0 + 1..free0 + 1 + nq).collect();
    let pairs = group_pairs(&coords, free0 + 1);

    let s_floor = problem.add_nonneg_vars(1);
    problem.add_eq_row(&[(lambda_var, 1.0), (s_floor, -1.0)], lambda_floor);

    let mut included = Vec::with_capacity(subset.len());
    for &k in subset {
        let omega = data.omegas[k];
        included.push(omega);

        // Complex parameter response at this frequency: one (re, im) pair of
        // free variables per distinct matrix position, tied to the delay
        // coefficients through cos/sin rows.
        let r_start = problem.add_free_vars(2 * pairs.len());
        for (pi, (_rc, taps)) in pairs.iter().enumerate() {
            let re_var = r_start + 2 * pi;
            let im_var = re_var + 1;
            let mut re_row = vec![(re_var, 1.0)];
            let mut im_row = vec![(im_var, 1.0)];
            for &(t, qv) in taps {
                let angle = omega * t as f64;
                let (sin, cos) = angle.sin_cos();
                if cos != 0.0 {
                    re_row.push((qv, -cos));
                }
                if sin != 0.0 {
                    im_row.push((qv, sin));
                }
            }
            problem.add_eq_row(&re_row, 0.0);
            problem.add_eq_row(&im_row, 0.0);
        }

        let psd = problem.add_psd_block(emb);
        for b in 0..emb {
            for a in 0..=b {
                // Decode the embedded entry into a complex matrix entry and
                // whether the row pins its real part or minus its imaginary
                // part.
                let (i, j, real_part) = if a < m && b < m {
                    (a, b, true)
                } else if a >= m && b >= m {
                    (a - m, b - m, true)
                } else {
                    (a, b - m, false)
                };
                let entry = lmi_entry_affine(data, k, &pairs, n_z, i, j);
                let (s_idx, s_mult) = psd.entry(a, b);
                let mut row = vec![(s_idx, s_mult)];
                if entry.lambda != 0.0 && real_part {
                    row.push((lambda_var, -entry.lambda));
                }
                for (pi, coeff) in entry.response.iter().enumerate() {
                    let re_var = r_start + 2 * pi;
                    let im_var = re_var + 1;
                    // real_part: value += Re(coeff · R) = Re·re − Im·im
                    // else:      value += −Im(coeff · R) = −(Im·re + Re·im)
                    let (cre, cim) = if real_part {
                        (coeff.re, -coeff.im)
                    } else {
                        (-coeff.im, -coeff.re)
                    };
                    if cre != 0.0 {
                        row.push((re_var, -cre));
                    }
                    if cim != 0.0 {
                        row.push((im_var, -cim));
                    }
                }
                let rhs = if real_part { entry.constant.re } else { -entry.constant.im };
                problem.add_eq_row(&row, rhs);
            }
        }
    }

    problem.add_objective_term(lambda_var, 1.0);
    Ok(SdpAssembly {
        problem,
        lambda_var,
        q_vars,
        coords,
        omegas: included,
        psd_block_order: emb,
    })
}

/// Affine description of one complex entry of the frequency block
/// `[[I, F], [F*, λI + G]]`: a constant, a coefficient on `λ`, and one
/// complex coefficient per parameter matrix position.
struct EntryAffine {
    constant: Complex64,
    lambda: f64,
    response: Vec<Complex64>,
}

fn lmi_entry_affine(
    data: &FreqLmiData,
    k: usize,
    pairs: &PairTaps,
    n_z: usize,
    i: usize,
    j: usize,
) -> EntryAffine {
    let zero = Complex64::new(0.0, 0.0);
    if i < n_z && j < n_z {
        EntryAffine {
            constant: if i == j { Complex64::new(1.0, 0.0) } else { zero },
            lambda: 0.0,
            response: vec![zero; pairs.len()],
        }
    } else if i < n_z && j >= n_z {
        // F[i, j−n_z] = P11 + Σ_(r,c) P12[i, r]·R[r, c]·P21[c, j−n_z]
        let col = j - n_z;
        let p11 = &data.p11[k];
        let p12 = &data.p12[k];
        let p21 = &data.p21[k];
        let response = pairs
            .iter()
            .map(|&((r, c), _)| p12[(i, r)] * p21[(c, col)])
            .collect();
        EntryAffine { constant: p11[(i, col)], lambda: 0.0, response }
    } else if i >= n_z && j >= n_z {
        EntryAffine {
            constant: data.g_bottom[k][(i - n_z, j - n_z)],
            lambda: if i == j { 1.0 } else { 0.0 },
            response: vec![zero; pairs.len()],
        }
    } else {
        // Lower-left block: conjugate transpose of the upper-right one.
        let flipped = lmi_entry_affine(data, k, pairs, n_z, j, i);
        EntryAffine {
            constant: flipped.constant.conj(),
            lambda: flipped.lambda,
            response: flipped.response.into_iter().map(|c| c.conj()).collect(),
        }
    }
}

/// A built linear program for peak-gain (L1) minimization, with the
/// variable layout needed to interpret solutions.
#[derive(Debug)]
pub struct LpAssembly {
    /// The assembled conic problem.
    pub problem: ConicProblem,
    /// Index of the scalar bound `λ` (always 0).
    pub lambda_var: usize,
    /// Indices of the parameter coefficients, parallel to `coords`.
    pub q_vars: Vec<usize>,
    /// `(row, col, delay)` of each parameter coefficient.
    pub coords: Vec<(usize, usize, usize)>,
    /// First absolute-value slack variable `ν_{ijt}`; the slacks are laid
    /// out as `ν[((i·n_w) + j)·(f+1) + t]`.
    pub nu_start: usize,
    /// Number of absolute-value slacks: `n_z · n_w · (f+1)`.
    pub nu_count: usize,
    /// Truncation horizon `f` shared by the parameter and the slacks.
    pub horizon: usize,
}

impl LpAssembly {
    /// Reads the parameter coefficients out of a solution vector and
    /// reassembles the masked FIR parameter.
    pub fn extract_parameter(
        &self,
        x: &[f64],
        mask: &FirSparsityMask,
    ) -> Result<FirTransferMatrix, SynthError> {
        let values: Vec<f64> = self.q_vars.iter().map(|&v| x[v]).collect();
        Ok(FirTransferMatrix::from_free_values(mask, &values)?)
    }
}

/// Builds the linear program
/// `min λ  s.t.  −ν_{ijt} ≤ (P̄11 + P12·Q·P21)^{[i,j]}(t) ≤ ν_{ijt}`,
/// `Σ_j Σ_t ν_{ijt} ≤ λ`, `ν ≥ 0`, over mask-constrained FIR parameter
/// coefficients, with every time index truncated at the mask horizon `f`.
///
/// `p_bar11` is the constant part of the response being bounded: the
/// (negated) reference closed loop for regret problems, or the plant's own
/// direct block for plain L1 minimization.
///
/// The convolution `P12·Q·P21` is not expanded into dense coefficient rows;
/// it is realized through auxiliary state recursions (one chain driven by
/// the parameter through `P21`, one driving the output through `P12`), so
/// the program stays sparse for structured plants. The builder is pure and
/// deterministic.
pub fn assemble_spreg_inf_lp(
    plant: &SynthesisPlant,
    p_bar11: &FirTransferMatrix,
    mask: &FirSparsityMask,
) -> Result<LpAssembly, SynthError> {
    check_mask_dims(plant, mask)?;
    let blocks = plant.blocks();
    let (n_z, n_w) = (blocks.error_dim(), blocks.disturbance_dim());
    let (n_u, n_y) = (blocks.control_dim(), blocks.measurement_dim());
    if p_bar11.rows() != n_z || p_bar11.cols() != n_w {
        return Err(SynthError::DimensionMismatch(format!(
            "constant response block is {}×{}, expected {}×{}",
            p_bar11.rows(),
            p_bar11.cols(),
            n_z,
            n_w
        )));
    }
    let f = mask.horizon();
    let coords = mask.free_scalar_coords();
    let nq = coords.len();

    let p12 = blocks.p12();
    let p21 = blocks.p21();
    let (a12, b12, c12, d12) = (p12.a(), p12.b(), p12.c(), p12.d());
    let (a21, b21, c21, d21) = (p21.a(), p21.b(), p21.c(), p21.d());
    let n12 = p12.state_dim();
    let n21 = p21.state_dim();

    // Free-coefficient lookup: q_index[(u, y, t)] -> variable index.
    let mut q_index: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();

    let mut problem = ConicProblem::new();
    let free0 = problem.add_free_vars(1 + nq);
    let lambda_var = free0;
    let q_vars: Vec<usize> = (free0 + 1..free0 + 1 + nq).collect();
    for (k, &(r, c, t)) in coords.iter().enumerate() {
        q_index.insert((r, c, t), q_vars[k]);
    }

    // Auxiliary chains: W(t) = Q(t)·D21 + Y(t)ᵀ·B21 is the convolution
    // Q·P21 at delay t; X and Y are the internal states of P12 and P21ᵀ.
    let w_start = problem.add_free_vars(n_u * n_w * (f + 1));
    let w_var = |t: usize, u: usize, w: usize| w_start + (t * n_u + u) * n_w + w;
    let x_start = problem.add_free_vars(n12 * n_w * f);
    let x_var = |t: usize, k: usize, w: usize| {
        debug_assert!((1..=f).contains(&t));
        x_start + ((t - 1) * n12 + k) * n_w + w
    };
    let y_start = problem.add_free_vars(n21 * n_u * f);
    let y_var = |t: usize, k: usize, u: usize| {
        debug_assert!((1..=f).contains(&t));
        y_start + ((t - 1) * n21 + k) * n_u + u
    };

    let nu_count = n_z * n_w * (f + 1);
    let nu_start = problem.add_nonneg_vars(nu_count);
    let nu_var = |i: usize, j: usize, t: usize| nu_start + (i * n_w + j) * (f + 1) + t;
    let lo_start = problem.add_nonneg_vars(nu_count);
    let hi_start = problem.add_nonneg_vars(nu_count);
    let row_slack_start = problem.add_nonneg_vars(n_z);

    // W definition rows.
    for t in 0..=f {
        for u in 0..n_u {
            for w in 0..n_w {
                let mut row = vec![(w_var(t, u, w), 1.0)];
                for y in 0..n_y {
                    if d21[(y, w)] != 0.0 {
                        if let Some(&qv) = q_index.get(&(u, y, t)) {
                            row.push((qv, -d21[(y, w)]));
                        }
                    }
                }
                if t >= 1 {
                    for k in 0..n21 {
                        if b21[(k, w)] != 0.0 {
                            row.push((y_var(t, k, u), -b21[(k, w)]));
                        }
                    }
                }
                problem.add_eq_row(&row, 0.0);
            }
        }
    }

    // X recursion rows: X(t) = A12·X(t−1) + B12·W(t−1), X(0) = 0.
    for t in 1..=f {
        for k in 0..n12 {
            for w in 0..n_w {
                let mut row = vec![(x_var(t, k, w), 1.0)];
                if t >= 2 {
                    for l in 0..n12 {
                        if a12[(k, l)] != 0.0 {
                            row.push((x_var(t - 1, l, w), -a12[(k, l)]));
                        }
                    }
                }
                for u in 0..n_u {
                    if b12[(k, u)] != 0.0 {
                        row.push((w_var(t - 1, u, w), -b12[(k, u)]));
                    }
                }
                problem.add_eq_row(&row, 0.0);
            }
        }
    }

    // Y recursion rows: Y(t) = A21ᵀ·Y(t−1) + C21ᵀ·Q(t−1)ᵀ, Y(0) = 0.
    for t in 1..=f {
        for k in 0..n21 {
            for u in 0..n_u {
                let mut row = vec![(y_var(t, k, u), 1.0)];
                if t >= 2 {
                    for l in 0..n21 {
                        if a21[(l, k)] != 0.0 {
                            row.push((y_var(t - 1, l, u), -a21[(l, k)]));
                        }
                    }
                }
                for y in 0..n_y {
                    if c21[(y, k)] != 0.0 {
                        if let Some(&qv) = q_index.get(&(u, y, t - 1)) {
                            row.push((qv, -c21[(y, k)]));
                        }
                    }
                }
                problem.add_eq_row(&row, 0.0);
            }
        }
    }

    // Absolute-value rows around D(t) = P̄11(t) + D12·W(t) + C12·X(t).
    for i in 0..n_z {
        for j in 0..n_w {
            for t in 0..=f {
                let p_const = p_bar11.coeff(t)[(i, j)];
                let mut d_terms: Vec<(usize, f64)> = Vec::new();
                for u in 0..n_u {
                    if d12[(i, u)] != 0.0 {
                        d_terms.push((w_var(t, u, j), d12[(i, u)]));
                    }
                }
                if t >= 1 {
                    for k in 0..n12 {
                        if c12[(i, k)] != 0.0 {
                            d_terms.push((x_var(t, k, j), c12[(i, k)]));
                        }
                    }
                }
                // D + ν − s_lo = −P̄11  (encodes −ν ≤ D)
                let mut lo = d_terms.clone();
                lo.push((nu_var(i, j, t), 1.0));
                lo.push((lo_start + (i * n_w + j) * (f + 1) + t, -1.0));
                problem.add_eq_row(&lo, -p_const);
                // −D + ν − s_hi = P̄11  (encodes D ≤ ν)
                let mut hi: Vec<(usize, f64)> =
                    d_terms.iter().map(|&(v, c)| (v, -c)).collect();
                hi.push((nu_var(i, j, t), 1.0));
                hi.push((hi_start + (i * n_w + j) * (f + 1) + t, -1.0));
                problem.add_eq_row(&hi, p_const);
            }
        }
    }

    // Row-sum rows: Σ_j Σ_t ν_{ijt} + s_row = λ.
    for i in 0..n_z {
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(n_w * (f + 1) + 2);
        for j in 0..n_w {
            for t in 0..=f {
                row.push((nu_var(i, j, t), 1.0));
            }
        }
        row.push((row_slack_start + i, 1.0));
        row.push((lambda_var, -1.0));
        problem.add_eq_row(&row, 0.0);
    }

    problem.add_objective_term(lambda_var, 1.0);
    Ok(LpAssembly {
        problem,
        lambda_var,
        q_vars,
        coords,
        nu_start,
        nu_count,
        horizon: f,
    })
}

fn check_mask_dims(plant: &SynthesisPlant, mask: &FirSparsityMask) -> Result<(), SynthError> {
    let blocks = plant.blocks();
    if mask.rows() != blocks.control_dim() || mask.cols() != blocks.measurement_dim() {
        return Err(SynthError::DimensionMismatch(format!(
            "mask is {}×{}, parameter must be {}×{}",
            mask.rows(),
            mask.cols(),
            blocks.control_dim(),
            blocks.measurement_dim()
        )));
    }
    Ok(())
}

pub(crate) fn check_reference_dims(
    plant: &SynthesisPlant,
    q_hat: &FirTransferMatrix,
) -> Result<(), SynthError> {
    let blocks = plant.blocks();
    if q_hat.rows() != blocks.control_dim() || q_hat.cols() != blocks.measurement_dim() {
        return Err(SynthError::DimensionMismatch(format!(
            "reference parameter is {}×{}, expected {}×{}",
            q_hat.rows(),
            q_hat.cols(),
            blocks.control_dim(),
            blocks.measurement_dim()
        )));
    }
    Ok(())
}
