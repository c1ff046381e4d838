use serde::Serialize;
use sstf::FirTransferMatrix;

use crate::config::SynthesisConfig;
use crate::metrics::AchievedMetrics;

/// Solver-side details of one synthesis run.
#[derive(Debug, Clone, Serialize)]
pub struct SynthDiagnostics {
    /// Final status of the conic backend (`"optimal"`, `"max-iter"`, ...).
    pub solver_status: String,
    /// Accumulated interior-point / first-order iterations.
    pub solver_iterations: usize,
    /// Cutting-plane rounds (0 when the problem was solved in one shot).
    pub rounds: usize,
    /// Frequencies whose semidefinite blocks were explicitly constrained.
    pub active_frequencies: Vec<f64>,
    /// Grid frequency achieving the certified objective (semidefinite
    /// route only).
    pub peak_omega: Option<f64>,
    /// Optimum of the last restricted program — a lower bound on the
    /// grid-certified objective (semidefinite route only).
    pub lambda_lower_bound: Option<f64>,
    /// Residual excess of the worst grid frequency over the restricted
    /// optimum when the loop stopped.
    pub final_violation: f64,
    /// Whether the cutting-plane loop stopped on its round budget instead
    /// of the certification test.
    pub stalled: bool,
    /// Node blocks whose graph distance exceeds the FIR horizon: they are
    /// identically zero although the graph connects them (warning only).
    pub short_horizon_blocks: usize,
    /// Whether the quadratic route took the degenerate-Gram epigraph path.
    pub fallback_used: bool,
}

impl Default for SynthDiagnostics {
    fn default() -> Self {
        SynthDiagnostics {
            solver_status: "optimal".into(),
            solver_iterations: 0,
            rounds: 0,
            active_frequencies: Vec::new(),
            peak_omega: None,
            lambda_lower_bound: None,
            final_violation: 0.0,
            stalled: false,
            short_horizon_blocks: 0,
            fallback_used: false,
        }
    }
}

/// Reproducibility record attached to every result: the knobs that shaped
/// the feasible set and a fingerprint of the reference parameter.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    /// Which program produced the result
    /// (`oracle-h2`, `oracle-hinf`, `oracle-l1`, `spreg2`, `spreg-inf`).
    pub problem: String,
    pub fir_order: usize,
    pub grid_points: usize,
    pub solver_tol: f64,
    pub cut_tol_abs: f64,
    pub cut_tol_rel: f64,
    /// FNV-1a fingerprint of the reference parameter's dimensions and
    /// coefficient bits; `None` for oracle problems.
    pub reference_hash: Option<String>,
}

impl Provenance {
    pub(crate) fn new(
        problem: &str,
        cfg: &SynthesisConfig,
        reference: Option<&FirTransferMatrix>,
    ) -> Self {
        Provenance {
            problem: problem.to_string(),
            fir_order: cfg.fir_order,
            grid_points: cfg.grid.omegas().len(),
            solver_tol: cfg.solver_tol,
            cut_tol_abs: cfg.cut_tol_abs,
            cut_tol_rel: cfg.cut_tol_rel,
            reference_hash: reference.map(fir_fingerprint),
        }
    }
}

/// A synthesized parameter with its certified objective, independently
/// evaluated norms, and solver diagnostics.
#[derive(Debug)]
pub struct SynthesisResult {
    /// Optimal FIR parameter; entries outside its mask are exactly zero by
    /// construction (the builders never create variables for them).
    pub q: FirTransferMatrix,
    /// Optimal (or certified) objective value of the program.
    pub objective: f64,
    /// Independently evaluated norms of the achieved closed loop.
    pub metrics: AchievedMetrics,
    pub diagnostics: SynthDiagnostics,
    pub provenance: Provenance,
}

impl SynthesisResult {
    /// JSON document with the parameter, objective, metrics, diagnostics,
    /// and provenance (stable field layout for run manifests).
    pub fn to_json_string(&self) -> String {
        let q_doc: serde_json::Value = serde_json::from_str(&self.q.to_json_string())
            .expect("parameter serialization is valid JSON");
        let doc = serde_json::json!({
            "objective": self.objective,
            "metrics": self.metrics,
            "diagnostics": self.diagnostics,
            "provenance": self.provenance,
            "q": q_doc,
        });
        serde_json::to_string_pretty(&doc).expect("result document serializes")
    }
}

/// FNV-1a hash of the parameter's shape and coefficient bit patterns,
/// formatted as 16 hex digits. Stable across platforms and builds.
pub(crate) fn fir_fingerprint(q: &FirTransferMatrix) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(&(q.rows() as u64).to_le_bytes());
    eat(&(q.cols() as u64).to_le_bytes());
    eat(&(q.order() as u64).to_le_bytes());
    for coeff in q.coeffs() {
        for value in coeff.iter() {
            eat(&value.to_bits().to_le_bytes());
        }
    }
    format!("{hash:016x}")
}
