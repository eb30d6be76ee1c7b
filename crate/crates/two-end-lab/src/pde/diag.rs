//! Field diagnostics: monotonicity report and growth-rate fit.

use super::field::ScalarField;
use super::residual::residual_norm;
use crate::error::Result;
use crate::geometry::{curve::fit_log_tail, NodalCurve};

/// Monotonicity diagnostic: converged two-interface solutions satisfy
/// `u_r < 0` for `r > 0` and `u_z > 0` for `z > 0`, up to solver tolerance.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub tol: f64,
    /// Worst violation of u_r <= tol for r > 0 (0 when clean).
    pub worst_ur: f64,
    /// Worst violation of u_z >= -tol for z > 0 (0 when clean).
    pub worst_uz: f64,
    pub worst_ur_node: (usize, usize),
    pub worst_uz_node: (usize, usize),
    pub pass: bool,
}

pub fn monotonicity_check(field: &ScalarField) -> MonotonicityReport {
    let tol = 10.0 * residual_norm(field) + 1e-8;
    let g = &field.grid;
    let mut worst_ur: f64 = 0.0;
    let mut worst_uz: f64 = 0.0;
    let mut worst_ur_node = (0, 0);
    let mut worst_uz_node = (0, 0);
    for j in 0..g.n_z - 1 {
        for i in 1..g.n_r - 1 {
            let ur = field.du_dr(i, j);
            if ur - tol > worst_ur {
                worst_ur = ur - tol;
                worst_ur_node = (i, j);
            }
        }
    }
    for j in 1..g.n_z - 1 {
        for i in 0..g.n_r - 1 {
            let uz = field.du_dz(i, j);
            if -(uz + tol) > worst_uz {
                worst_uz = -(uz + tol);
                worst_uz_node = (i, j);
            }
        }
    }
    MonotonicityReport {
        tol,
        worst_ur,
        worst_uz,
        worst_ur_node,
        worst_uz_node,
        pass: worst_ur <= 0.0 && worst_uz <= 0.0,
    }
}

/// Growth-rate fit of a nodal curve against `k ln r + c`.
#[derive(Debug, Clone, Copy)]
pub struct GrowthFit {
    pub k: f64,
    pub c: f64,
    pub rms: f64,
    /// Window spans less than a decade: the fit is poorly conditioned.
    pub short_window: bool,
}

pub fn growth_rate_fit(curve: &NodalCurve, window: (f64, f64)) -> Result<GrowthFit> {
    let (k, c, rms, short_window) = fit_log_tail(curve, window)?;
    Ok(GrowthFit {
        k,
        c,
        rms,
        short_window,
    })
}
