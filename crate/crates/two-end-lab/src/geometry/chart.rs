//! Fermi (tubular) coordinates around a nodal curve `z = f(r)`.
//!
//! The forward map sends `(r₁, z₁)` to the point at signed normal distance
//! `z₁` from the curve point `(r₁, f(r₁))`, normal pointing upward:
//!
//! ```text
//! r = r₁ - z₁ f'/√(1+f'²),     z = f(r₁) + z₁/√(1+f'²).
//! ```
//!
//! The map is a diffeomorphism for `|z₁| < d̄(r₁)`; the validity radius is
//! the minimum of the focal distance (where the factor `B` vanishes), the
//! distance at which the normal ray meets the symmetry axis, and `3 f(r₁)`,
//! then Lipschitz-smoothed so that `|d̄'| <= 1/2`.
//!
//! The flat Laplacian pulls back as
//!
//! ```text
//! Δ_(r,z) = (1/A) ∂²_{r₁} + ∂²_{z₁} - (∂_{r₁}A / 2A²) ∂_{r₁} + (∂_{z₁}A / 2A) ∂_{z₁}
//! ```
//!
//! with `A = 1 + f'² - 2 z₁ f''/√(1+f'²) + z₁² f''²/(1+f'²)²` and
//! `B = 1 - z₁ f''/(1+f'²)^{3/2}`, related by `A = (1+f'²) B²`.

use super::curve::NodalCurve;
use crate::error::{Error, Result};
use crate::util::smoothstep;

const DBAR_SAMPLES: usize = 1024;
const FOCAL_SAFETY: f64 = 0.9;
const AXIS_SAFETY: f64 = 0.95;
const DBAR_LIPSCHITZ: f64 = 0.5;

/// Coefficients of the pulled-back flat Laplacian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianCoeffs {
    pub a_rr: f64,
    pub a_zz: f64,
    pub a_r: f64,
    pub a_z: f64,
}

#[derive(Debug, Clone)]
pub struct FermiChart {
    curve: NodalCurve,
    range: (f64, f64),
    dbar: Vec<f64>,
    cutoff_width: f64,
}

impl FermiChart {
    /// Build a chart over the abscissa range `range` (clamped to the curve
    /// domain). The validity-radius table is sampled and smoothed here.
    pub fn new(curve: &NodalCurve, range: (f64, f64)) -> Result<Self> {
        let (dlo, dhi) = curve.domain();
        let lo = range.0.max(dlo);
        let hi = range.1.min(dhi);
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "invalid chart range [{}, {}] for curve domain [{dlo}, {dhi}]",
                range.0, range.1
            )));
        }
        let n = DBAR_SAMPLES;
        let dt = (hi - lo) / (n - 1) as f64;
        let mut dbar = vec![0.0; n];
        for (i, d) in dbar.iter_mut().enumerate() {
            // Window the focal bound over neighbours: one rough curvature
            // spike should not poke a hole in the tube.
            let mut focal = f64::INFINITY;
            for w in -2i64..=2 {
                let t = (lo + (i as i64 + w) as f64 * dt).clamp(lo, hi);
                let fp = curve.eval(t, 1)?;
                let fpp = curve.eval(t, 2)?;
                let s2 = 1.0 + fp * fp;
                if fpp.abs() > 1e-300 {
                    focal = focal.min(FOCAL_SAFETY * s2.powf(1.5) / fpp.abs());
                }
            }
            let t = lo + i as f64 * dt;
            let f = curve.eval(t, 0)?;
            let fp = curve.eval(t, 1)?;
            // Keep the tube from reaching past the symmetry axis: the offset
            // at which the normal ray crosses r = 0 is t √(1+f'²)/|f'|. A
            // small slack keeps near-axis slices of shallow curves usable
            // (their rays graze the axis at micrometer depth).
            let axis = if fp.abs() > 1e-12 {
                AXIS_SAFETY * (t + 0.5) * (1.0 + fp * fp).sqrt() / fp.abs()
            } else {
                f64::INFINITY
            };
            *d = focal.min(axis).min(3.0 * f).max(0.0);
        }
        // |d̄'| <= 1/2 by a double Lipschitz sweep.
        for i in 1..n {
            dbar[i] = dbar[i].min(dbar[i - 1] + DBAR_LIPSCHITZ * dt);
        }
        for i in (0..n - 1).rev() {
            dbar[i] = dbar[i].min(dbar[i + 1] + DBAR_LIPSCHITZ * dt);
        }
        Ok(FermiChart {
            curve: curve.clone(),
            range: (lo, hi),
            dbar,
            cutoff_width: 2.0,
        })
    }

    pub fn with_cutoff_width(mut self, w: f64) -> Self {
        self.cutoff_width = w.max(1e-6);
        self
    }

    pub fn curve(&self) -> &NodalCurve {
        &self.curve
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    /// Validity radius d̄ at abscissa r1 (0 outside the chart range).
    pub fn half_width(&self, r1: f64) -> f64 {
        let (lo, hi) = self.range;
        if r1 < lo || r1 > hi {
            return 0.0;
        }
        let n = self.dbar.len();
        let x = (r1 - lo) / (hi - lo) * (n - 1) as f64;
        let i = (x.floor() as usize).min(n - 2);
        let frac = x - i as f64;
        self.dbar[i] * (1.0 - frac) + self.dbar[i + 1] * frac
    }

    /// C² cutoff: 1 for |z1| <= d̄ - w, 0 for |z1| >= d̄.
    pub fn cutoff(&self, r1: f64, z1: f64) -> f64 {
        let d = self.half_width(r1);
        smoothstep((d - z1.abs()) / self.cutoff_width)
    }

    fn in_validity(&self, r1: f64, z1: f64) -> bool {
        z1.abs() < self.half_width(r1)
    }

    /// Fermi coordinates -> physical coordinates.
    pub fn forward(&self, r1: f64, z1: f64) -> Result<(f64, f64)> {
        if !self.in_validity(r1, z1) {
            return Err(Error::ChartDomain {
                r: r1,
                z: z1,
                reason: format!("|z1| >= dbar({r1}) = {}", self.half_width(r1)),
            });
        }
        self.forward_unchecked(r1, z1)
    }

    /// Forward map without the validity gate (the ansatz builder needs the
    /// map on the cutoff transition shell as well).
    pub fn forward_unchecked(&self, r1: f64, z1: f64) -> Result<(f64, f64)> {
        let f = self.curve.eval(r1, 0)?;
        let fp = self.curve.eval(r1, 1)?;
        let s = (1.0 + fp * fp).sqrt();
        Ok((r1 - z1 * fp / s, f + z1 / s))
    }

    /// Physical coordinates -> Fermi coordinates, with validity check.
    pub fn inverse(&self, r: f64, z: f64) -> Result<(f64, f64)> {
        let (r1, z1) = self.project(r, z)?;
        if !self.in_validity(r1, z1) {
            return Err(Error::ChartDomain {
                r,
                z,
                reason: format!("projected |z1| = {} >= dbar({r1})", z1.abs()),
            });
        }
        Ok((r1, z1))
    }

    /// Nearest-point projection onto the curve: returns `(r1, z1)` solving
    /// `(r - r1) + (z - f(r1)) f'(r1) = 0`, without the validity gate.
    /// Newton from `r1 = r`, bisection fallback for steep curves.
    pub fn project(&self, r: f64, z: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.range;
        let pad = 1e-9 * (1.0 + hi.abs());
        let g = |r1: f64| -> Result<f64> {
            let f = self.curve.eval(r1, 0)?;
            let fp = self.curve.eval(r1, 1)?;
            Ok((r - r1) + (z - f) * fp)
        };
        let mut r1 = r.clamp(lo + pad, hi);
        let mut converged = false;
        for _ in 0..50 {
            let f = self.curve.eval(r1, 0)?;
            let fp = self.curve.eval(r1, 1)?;
            let fpp = self.curve.eval(r1, 2)?;
            let gv = (r - r1) + (z - f) * fp;
            let gp = -1.0 - fp * fp + (z - f) * fpp;
            if gp.abs() < 1e-300 {
                break;
            }
            let step = gv / gp;
            let next = (r1 - step).clamp(lo + pad, hi);
            let moved = (next - r1).abs();
            r1 = next;
            if moved < 1e-12 * (1.0 + r1.abs()) {
                converged = true;
                break;
            }
        }
        // Accept boundary-constrained projections: at the left edge the
        // distance must not decrease inward (G <= 0 there), mirrored on the
        // right. Otherwise fall back to bisection.
        let acceptable = if converged {
            let gv = g(r1)?;
            gv.abs() <= 1e-6 * (1.0 + r.abs() + z.abs())
                || (r1 <= lo + 2.0 * pad && gv < 0.0)
                || (r1 >= hi - 2.0 * pad && gv > 0.0)
        } else {
            false
        };
        if !acceptable {
            // Bisection over the chart range when the normal equation
            // brackets; otherwise a derivative-free minimisation of the
            // distance itself (robust near the focal set, where the normal
            // equation has clustered roots).
            let mut a = lo + pad;
            let mut b = hi;
            let (mut ga, gb) = (g(a)?, g(b)?);
            if ga * gb <= 0.0 {
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    let gm = g(m)?;
                    if ga * gm <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                        ga = gm;
                    }
                }
                r1 = 0.5 * (a + b);
            } else {
                r1 = self.project_by_scan(r, z)?;
            }
        }
        let f = self.curve.eval(r1, 0)?;
        let fp = self.curve.eval(r1, 1)?;
        let s = (1.0 + fp * fp).sqrt();
        let z1 = (-(r - r1) * fp + (z - f)) / s;
        Ok((r1, z1))
    }

    /// Coarse scan of the squared distance followed by golden-section
    /// refinement: slow but unconditional.
    fn project_by_scan(&self, r: f64, z: f64) -> Result<f64> {
        let (lo, hi) = self.range;
        let dist2 = |t: f64| -> Result<f64> {
            let f = self.curve.eval(t, 0)?;
            Ok((r - t) * (r - t) + (z - f) * (z - f))
        };
        let n = 512;
        let mut best = (0usize, f64::INFINITY);
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            let d = dist2(t)?;
            if d < best.1 {
                best = (i, d);
            }
        }
        let mut a = lo + (hi - lo) * best.0.saturating_sub(1) as f64 / n as f64;
        let mut b = lo + (hi - lo) * (best.0 + 1).min(n) as f64 / n as f64;
        let phi = 0.5 * (5.0f64.sqrt() - 1.0);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = dist2(x1)?;
        let mut f2 = dist2(x2)?;
        for _ in 0..80 {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = dist2(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = dist2(x2)?;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// Metric factors (A, B) at a chart point.
    pub fn metric_factors(&self, r1: f64, z1: f64) -> Result<(f64, f64)> {
        if !self.in_validity(r1, z1) {
            return Err(Error::ChartDomain {
                r: r1,
                z: z1,
                reason: "metric factors requested outside validity region".into(),
            });
        }
        let fp = self.curve.eval(r1, 1)?;
        let fpp = self.curve.eval(r1, 2)?;
        let s2 = 1.0 + fp * fp;
        let b = 1.0 - z1 * fpp / s2.powf(1.5);
        let a = s2 - 2.0 * z1 * fpp / s2.sqrt() + z1 * z1 * fpp * fpp / (s2 * s2);
        if b <= 0.0 {
            return Err(Error::ChartDomain {
                r: r1,
                z: z1,
                reason: format!("focal point reached (B = {b:.3e})"),
            });
        }
        Ok((a, b))
    }

    /// Coefficients {a_rr, a_zz, a_r, a_z} of the pulled-back flat Laplacian.
    pub fn laplacian_coeffs(&self, r1: f64, z1: f64) -> Result<LaplacianCoeffs> {
        let (a, _b) = self.metric_factors(r1, z1)?;
        let fp = self.curve.eval(r1, 1)?;
        let fpp = self.curve.eval(r1, 2)?;
        let fppp = self.curve.eval(r1, 3)?;
        let s2 = 1.0 + fp * fp;
        let da_dz1 = -2.0 * fpp / s2.sqrt() + 2.0 * z1 * fpp * fpp / (s2 * s2);
        let da_dr1 = 2.0 * fp * fpp - 2.0 * z1 * (fppp / s2.sqrt() - fp * fpp * fpp / s2.powf(1.5))
            + z1 * z1
                * (2.0 * fpp * fppp / (s2 * s2) - 4.0 * fp * fpp * fpp * fpp / (s2 * s2 * s2));
        Ok(LaplacianCoeffs {
            a_rr: 1.0 / a,
            a_zz: 1.0,
            a_r: -da_dr1 / (2.0 * a * a),
            a_z: da_dz1 / (2.0 * a),
        })
    }
}
