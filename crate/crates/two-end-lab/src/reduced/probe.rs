//! Shooting probe for the low-growth-rate nonexistence mechanism.
//!
//! The balanced flux `μ = r p'/√(1+p'²)` is nondecreasing along every
//! reduced trajectory (the interaction forcing is positive), and the tail
//! integral `∫ r e^{-2√2 p} dr` diverges whenever `μ` tries to settle at or
//! below `√2/2`: a trajectory can only stop gaining flux once `μ > √2/2`.
//! The probe shoots a deterministic grid of initial conditions aimed at a
//! target terminal slope `k ≤ √2/2`, integrates far out, and classifies each
//! trajectory by its projected remaining flux gain:
//!
//! * `Settled` — the projected tail gain is below 1% of the current flux;
//!   the terminal flux is trustworthy (and is always found above `√2/2`);
//! * `Rising` — the flux is still visibly growing at the final radius (it
//!   can only keep climbing; ruling it "below threshold" is impossible);
//! * `NotReached` — the interaction never turned on at this range (huge
//!   initial separation), so the run says nothing either way;
//! * `Failed` — integrator failure, listed in the report.
//!
//! The reported `δ_obs = min(settled μ) - √2/2` is an observed margin, not a
//! claim about any universal constant, and the probe makes no statement
//! about growth rates in `(√2/2, √2]`.

use super::integrate::{integrate_reduced, StepControl};
use crate::error::{Error, Result};
use crate::profile::Constants;
use std::f64::consts::SQRT_2;

#[derive(Debug, Clone)]
pub struct ProbeControls {
    pub trials: usize,
    /// Shooting grid: log-uniform initial heights in this range.
    pub p0_range: (f64, f64),
    pub r0: f64,
    pub r_end: f64,
    /// Pessimistic amplitude for the dropped O(r⁻²) forcing (0 = off).
    pub i2_amplitude: f64,
    /// A trial counts as settled when the projected tail flux gain is below
    /// this fraction of the final flux.
    pub settle_fraction: f64,
    pub step: StepControl,
    /// Worker threads for the independent trials (results are merged by
    /// trial index, so the count never changes the output).
    pub workers: usize,
}

impl Default for ProbeControls {
    fn default() -> Self {
        ProbeControls {
            trials: 50,
            p0_range: (1.0, 20.0),
            r0: 1.0,
            r_end: 1e6,
            i2_amplitude: 0.0,
            settle_fraction: 0.01,
            step: StepControl::default(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStatus {
    Settled,
    Rising,
    NotReached,
    Failed,
}

impl TrialStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialStatus::Settled => "settled",
            TrialStatus::Rising => "rising",
            TrialStatus::NotReached => "interaction-not-reached",
            TrialStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub p0: f64,
    pub slope0: f64,
    pub status: TrialStatus,
    pub mu_final: f64,
    pub mu_gain: f64,
    /// Projected remaining flux gain beyond r_end (infinite while mu <= √2/2).
    pub tail_estimate: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub k_target: f64,
    pub threshold: f64,
    pub trials: Vec<TrialResult>,
    pub settled: usize,
    pub rising: usize,
    pub not_reached: usize,
    pub failed: usize,
    /// min over settled trials of (final flux - √2/2); None without settled trials.
    pub delta_obs: Option<f64>,
    /// True when every settled trial's terminal flux clears the threshold.
    pub all_settled_above: bool,
}

impl ProbeReport {
    pub fn verdict(&self) -> &'static str {
        if self.settled > 0 && self.all_settled_above {
            "no-two-end-regime"
        } else if self.settled == 0 {
            "inconclusive"
        } else {
            "mechanism-violated"
        }
    }
}

/// Projected flux gain beyond `r_end` assuming the height keeps growing at
/// its current logarithmic rate: `∫ (c₁/c₀) s e^{-2√2 (p + μ ln(s/r_end))} ds`.
fn tail_gain(p_end: f64, mu_end: f64, r_end: f64, constants: Constants) -> f64 {
    let decay = 2.0 * SQRT_2 * mu_end;
    if decay <= 2.0 {
        return f64::INFINITY;
    }
    constants.c1 / constants.c0 * (-2.0 * SQRT_2 * p_end).exp() * r_end * r_end / (decay - 2.0)
}

/// Run the shooting probe for a target growth rate `k_target ∈ (0, √2/2]`.
pub fn nonexistence_probe(
    k_target: f64,
    controls: &ProbeControls,
    constants: Constants,
) -> Result<ProbeReport> {
    if !(k_target > 0.0 && k_target <= SQRT_2 / 2.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "probe target must lie in (0, sqrt(2)/2] (got {k_target})"
        )));
    }
    if controls.trials == 0 {
        return Err(Error::Domain("probe needs at least one trial".into()));
    }
    // Deterministic grid: log-uniform in p0 (outer), uniform in slope0
    // (inner), slope0 in [0, k_target/r0].
    let n_slope = (controls.trials as f64).sqrt().round() as usize;
    let n_slope = n_slope.clamp(1, controls.trials);
    let n_p0 = controls.trials.div_ceil(n_slope);
    let mut cases = Vec::with_capacity(controls.trials);
    let (p_lo, p_hi) = controls.p0_range;
    for i in 0..n_p0 {
        let t = if n_p0 == 1 {
            0.0
        } else {
            i as f64 / (n_p0 - 1) as f64
        };
        let p0 = (p_lo.ln() + t * (p_hi.ln() - p_lo.ln())).exp();
        for j in 0..n_slope {
            if cases.len() >= controls.trials {
                break;
            }
            let s = if n_slope == 1 {
                0.0
            } else {
                j as f64 / (n_slope - 1) as f64
            };
            cases.push((p0, s * k_target / controls.r0));
        }
    }

    let run_one = |&(p0, slope0): &(f64, f64)| -> TrialResult {
        let mut step = controls.step.clone();
        step.i2_amplitude = controls.i2_amplitude;
        let outcome = integrate_reduced(p0, slope0, controls.r0, controls.r_end, step, constants);
        match outcome {
            Ok(traj) => {
                let mu0 = traj.mu[0];
                let mu_end = *traj.mu.last().unwrap();
                let p_end = *traj.p.last().unwrap();
                let gain = mu_end - mu0;
                let tail = tail_gain(p_end, mu_end, controls.r_end, constants);
                let status = if gain.abs() < 1e-6 {
                    TrialStatus::NotReached
                } else if tail.is_finite() && tail <= controls.settle_fraction * mu_end.abs() {
                    TrialStatus::Settled
                } else {
                    TrialStatus::Rising
                };
                TrialResult {
                    p0,
                    slope0,
                    status,
                    mu_final: mu_end,
                    mu_gain: gain,
                    tail_estimate: tail,
                    failure: None,
                }
            }
            Err(e) => TrialResult {
                p0,
                slope0,
                status: TrialStatus::Failed,
                mu_final: f64::NAN,
                mu_gain: f64::NAN,
                tail_estimate: f64::NAN,
                failure: Some(e.to_string()),
            },
        }
    };
    let workers = controls.workers.max(1).min(cases.len());
    let trials: Vec<TrialResult> = if workers == 1 {
        cases.iter().map(run_one).collect()
    } else {
        // Independent trials on a small thread pool; chunks are indexed so
        // the merged order is the case order regardless of scheduling.
        let chunk = cases.len().div_ceil(workers);
        let mut slots: Vec<Option<Vec<TrialResult>>> = vec![None; workers];
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (w, piece) in cases.chunks(chunk).enumerate() {
                handles.push((
                    w,
                    scope.spawn(move || piece.iter().map(run_one).collect::<Vec<_>>()),
                ));
            }
            for (w, handle) in handles {
                slots[w] = Some(handle.join().expect("probe worker panicked"));
            }
        });
        slots.into_iter().flatten().flatten().collect()
    };

    let threshold = SQRT_2 / 2.0;
    let mut settled = 0;
    let mut rising = 0;
    let mut not_reached = 0;
    let mut failed = 0;
    let mut min_settled_mu = f64::INFINITY;
    for t in &trials {
        match t.status {
            TrialStatus::Settled => {
                settled += 1;
                min_settled_mu = min_settled_mu.min(t.mu_final);
            }
            TrialStatus::Rising => rising += 1,
            TrialStatus::NotReached => not_reached += 1,
            TrialStatus::Failed => failed += 1,
        }
    }
    let delta_obs = if settled > 0 {
        Some(min_settled_mu - threshold)
    } else {
        None
    };
    Ok(ProbeReport {
        k_target,
        threshold,
        trials,
        settled,
        rising,
        not_reached,
        failed,
        delta_obs,
        all_settled_above: delta_obs.map(|d| d > 0.0).unwrap_or(false),
    })
}
