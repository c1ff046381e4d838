use serde::{Deserialize, Deserializer, Serialize};

/// How a regret figure was produced — figures from different methods bound
/// the true value from different sides and must not be compared blindly.
#[derive(Clone, Copy, Debug, Eq, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegretMethod {
    /// Supremum of `λ_max(Ψ)` over a frequency grid (energy-gap metric).
    GridSup,
    /// L1-norm upper bound on the peak-to-peak gap.
    LpBound,
    /// Lower estimate from a finite set of probing disturbances.
    Empirical,
}

/// Outcome of a regret evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegretReport {
    /// The regret figure. `−∞` (serialized as JSON null) marks "no estimate",
    /// e.g. an empirical evaluation over an empty disturbance set.
    #[serde(deserialize_with = "null_as_neg_infinity")]
    pub value: f64,
    /// Grid frequency achieving the supremum, for grid-based methods.
    pub achieving_omega: Option<f64>,
    /// Time-major disturbance achieving the estimate, for empirical methods.
    pub achieving_disturbance: Option<Vec<Vec<f64>>>,
    /// Provenance of the figure.
    pub method: RegretMethod,
}

fn null_as_neg_infinity<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::NEG_INFINITY))
}

impl RegretReport {
    /// Serializes the report to JSON (non-finite values become null).
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
