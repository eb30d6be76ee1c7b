//! JSON run report (schema `two-end-lab/1`).

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub mode: String,
    pub seed: u64,
    pub constants: ConstantsJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_history: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_fit: Option<GrowthFitJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotonicity: Option<MonotonicityJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flux: Vec<FluxJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub branch: Vec<BranchRowJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch_termination: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ReducedJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checks: Vec<CheckJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<String>,
}

impl Report {
    pub fn new(mode: &str, seed: u64, c0: f64, c1: f64) -> Self {
        Report {
            schema: "two-end-lab/1",
            mode: mode.to_string(),
            seed,
            constants: ConstantsJson { c0, c1 },
            residual_history: None,
            growth_fit: None,
            monotonicity: None,
            flux: Vec::new(),
            branch: Vec::new(),
            branch_termination: None,
            probe: None,
            reduced: None,
            checks: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsJson {
    pub c0: f64,
    pub c1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthFitJson {
    pub k: f64,
    pub c: f64,
    pub rms: f64,
    pub short_window: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityJson {
    pub pass: bool,
    pub tol: f64,
    pub worst_ur: f64,
    pub worst_uz: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluxJson {
    pub r_lo: f64,
    pub r_hi: f64,
    pub z_top: f64,
    pub value: f64,
    pub boundary_warning: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRowJson {
    pub s: f64,
    pub k: f64,
    pub c: f64,
    pub apex_axis: String,
    pub apex_dist: f64,
    pub newton_iters: usize,
    pub residual_norm: f64,
    pub monotonicity_pass: bool,
    pub flux: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeJson {
    pub k_target: f64,
    pub threshold: f64,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_obs: Option<f64>,
    pub settled: usize,
    pub rising: usize,
    pub not_reached: usize,
    pub failed: usize,
    pub trials: Vec<ProbeTrialJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeTrialJson {
    pub p0: f64,
    pub slope0: f64,
    pub status: String,
    pub mu_final: f64,
    pub mu_gain: f64,
    pub tail_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedJson {
    pub r0: f64,
    pub r_end: f64,
    pub p0: f64,
    pub slope0: f64,
    pub mu_final: f64,
    pub integral_identity_error: f64,
    pub steps_accepted: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckJson {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}
