//! Adaptive Runge-Kutta integration of the reduced nodal-line equation in
//! flux form.
//!
//! State `(p, μ)` over the radius, with `μ = r p'/√(1+p'²)` so that
//! `p' = μ/√(r² - μ²)`; the flux form avoids differentiating `√(1+p'²)`.
//! Dormand-Prince 5(4) with an embedded error estimate.

use super::{reduced_flux_rhs, InteractionMode};
use crate::error::{Error, Result};
use crate::geometry::NodalCurve;
use crate::profile::Constants;

/// Integrator controls.
#[derive(Debug, Clone)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Optional pessimistic bound amplitude for the dropped `O(r⁻²)` forcing:
    /// adds `-amplitude/r²` to `dμ/dr`.
    pub i2_amplitude: f64,
    /// Step cap relative to the radius, so the stored nodes stay dense
    /// enough for the a-posteriori integral check.
    pub max_step_fraction: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 2_000_000,
            i2_amplitude: 0.0,
            max_step_fraction: 0.05,
        }
    }
}

/// A reduced trajectory: accepted integrator nodes with the recovered slope
/// and the balanced flux at each node.
#[derive(Debug, Clone)]
pub struct ReducedTrajectory {
    pub r: Vec<f64>,
    pub p: Vec<f64>,
    pub p_prime: Vec<f64>,
    pub mu: Vec<f64>,
    pub control: StepControl,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl ReducedTrajectory {
    /// Wrap a nodal curve as a trajectory (sampled, not integrated).
    pub fn from_curve(curve: &NodalCurve, window: (f64, f64), n: usize) -> Result<Self> {
        let (lo, hi) = window;
        if !(hi > lo) || n < 2 {
            return Err(Error::Domain(format!(
                "bad sampling window [{lo}, {hi}] / count {n}"
            )));
        }
        let mut t = ReducedTrajectory {
            r: Vec::with_capacity(n),
            p: Vec::with_capacity(n),
            p_prime: Vec::with_capacity(n),
            mu: Vec::with_capacity(n),
            control: StepControl::default(),
            steps_accepted: 0,
            steps_rejected: 0,
        };
        for i in 0..n {
            let r = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let p = curve.eval(r, 0)?;
            let pp = curve.eval(r, 1)?;
            t.r.push(r);
            t.p.push(p);
            t.p_prime.push(pp);
            t.mu.push(r * pp / (1.0 + pp * pp).sqrt());
        }
        Ok(t)
    }

    /// Linear interpolation of p at radius r (nodes are dense).
    pub fn p_at(&self, r: f64) -> Option<f64> {
        if r < self.r[0] || r > *self.r.last()? {
            return None;
        }
        let i = match self.r.binary_search_by(|v| v.partial_cmp(&r).unwrap()) {
            Ok(i) => return Some(self.p[i]),
            Err(i) => i.clamp(1, self.r.len() - 1),
        };
        let (r0, r1) = (self.r[i - 1], self.r[i]);
        let w = (r - r0) / (r1 - r0);
        Some(self.p[i - 1] * (1.0 - w) + self.p[i] * w)
    }

    /// Verify the integral identity `μ(t₂) - μ(t₁) = ∫ rhs` on the stored
    /// nodes. The height between nodes is rebuilt by quintic Hermite
    /// interpolation (p, p' stored; p'' from the flux law), then the right
    /// side is integrated with composite Simpson panels per step.
    pub fn integral_identity_error(&self, constants: Constants) -> IntegralCheck {
        let rhs = |p: f64, r: f64| {
            reduced_flux_rhs(p, r, InteractionMode::DEqualsTwoP, constants)
                - self.control.i2_amplitude / (r * r)
        };
        // p'' from (r, p, mu): differentiate p' = mu / sqrt(r² - mu²).
        let ppp = |idx: usize| -> f64 {
            let (r, p, mu) = (self.r[idx], self.p[idx], self.mu[idx]);
            let q2 = r * r - mu * mu;
            let q = q2.sqrt();
            let dmu = rhs(p, r);
            (dmu * q - mu * (r - mu * dmu) / q) / q2
        };
        let mut integral = 0.0;
        for i in 1..self.r.len() {
            let (r0, r1) = (self.r[i - 1], self.r[i]);
            let h = r1 - r0;
            let (p0, p1) = (self.p[i - 1], self.p[i]);
            let (d0, d1) = (self.p_prime[i - 1], self.p_prime[i]);
            let (s0, s1) = (ppp(i - 1), ppp(i));
            let p_of = |t: f64| -> f64 {
                // two-point quintic Hermite basis
                let t2 = t * t;
                let t3 = t2 * t;
                let t4 = t3 * t;
                let t5 = t4 * t;
                let a0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
                let a1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
                let a2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
                let b0 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
                let b1 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
                let b2 = 0.5 * (t3 - 2.0 * t4 + t5);
                p0 * a0 + h * d0 * a1 + h * h * s0 * a2 + p1 * b0 + h * d1 * b1 + h * h * s1 * b2
            };
            let panels = 8usize;
            let mut acc = 0.0;
            for m in 0..=2 * panels {
                let t = m as f64 / (2 * panels) as f64;
                let w = if m == 0 || m == 2 * panels {
                    1.0
                } else if m % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * rhs(p_of(t), r0 + t * h);
            }
            integral += acc * h / (6.0 * panels as f64);
        }
        let jump = self.mu.last().unwrap() - self.mu[0];
        IntegralCheck {
            flux_jump: jump,
            rhs_integral: integral,
            error: (jump - integral).abs(),
        }
    }

    /// CSV columns (r, p, p', mu).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,p,pp,mu\n");
        for i in 0..self.r.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.r[i], self.p[i], self.p_prime[i], self.mu[i]
            ));
        }
        out
    }
}

/// Result of the flux-vs-integral consistency check.
#[derive(Debug, Clone, Copy)]
pub struct IntegralCheck {
    pub flux_jump: f64,
    pub rhs_integral: f64,
    pub error: f64,
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate the flux form from `(p0, slope0)` at `r0` out to `r_end`.
pub fn integrate_reduced(
    p0: f64,
    slope0: f64,
    r0: f64,
    r_end: f64,
    control: StepControl,
    constants: Constants,
) -> Result<ReducedTrajectory> {
    if !(r0 > 0.0) || !(r_end > r0) || !(p0 > 0.0) {
        return Err(Error::Domain(format!(
            "integrate_reduced needs r0 > 0, r_end > r0, p0 > 0 (got {r0}, {r_end}, {p0})"
        )));
    }
    let mu0 = r0 * slope0 / (1.0 + slope0 * slope0).sqrt();

    let deriv = |r: f64, y: [f64; 2]| -> Result<[f64; 2]> {
        let (p, mu) = (y[0], y[1]);
        let denom2 = r * r - mu * mu;
        if denom2 <= r * r * 1e-14 {
            return Err(Error::BlowUp { r });
        }
        let pp = mu / denom2.sqrt();
        let dmu = reduced_flux_rhs(p, r, InteractionMode::DEqualsTwoP, constants)
            - control.i2_amplitude / (r * r);
        Ok([pp, dmu])
    };

    let mut traj = ReducedTrajectory {
        r: vec![r0],
        p: vec![p0],
        p_prime: vec![slope0],
        mu: vec![mu0],
        control: control.clone(),
        steps_accepted: 0,
        steps_rejected: 0,
    };

    let mut r = r0;
    let mut y = [p0, mu0];
    let mut h = (r0 * 1e-3).min(r_end - r0).max(1e-8);
    let mut k = [[0.0f64; 2]; 7];

    while r < r_end {
        if traj.steps_accepted + traj.steps_rejected > control.max_steps {
            return Err(Error::Stiffness { r, step: h });
        }
        h = h.min(r_end - r).min(control.max_step_fraction * r);
        if h < 1e-14 * r.max(1.0) {
            return Err(Error::Stiffness { r, step: h });
        }
        k[0] = deriv(r, y)?;
        let mut failed = false;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s - 1][j];
                if a != 0.0 {
                    ys[0] += h * a * kj[0];
                    ys[1] += h * a * kj[1];
                }
            }
            match deriv(r + C[s - 1] * h, ys) {
                Ok(v) => k[s] = v,
                Err(Error::BlowUp { .. }) => {
                    failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if failed {
            // Shrink and retry; a genuine vertical tangent keeps shrinking
            // until the step underflows or the stage point leaves the bad set.
            h *= 0.25;
            traj.steps_rejected += 1;
            if h < 1e-14 * r.max(1.0) {
                return Err(Error::BlowUp { r });
            }
            continue;
        }
        // 5th-order solution is stage row 6 of A (FSAL layout).
        let mut y5 = y;
        let mut y4 = y;
        for j in 0..7 {
            let b5 = if j < 6 { A[5][j] } else { 0.0 };
            y5[0] += h * b5 * k[j][0];
            y5[1] += h * b5 * k[j][1];
            y4[0] += h * B4[j] * k[j][0];
            y4[1] += h * B4[j] * k[j][1];
        }
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let sc = control.abs_tol + control.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4[i]) / sc).abs());
        }
        if err <= 1.0 {
            r += h;
            y = y5;
            let denom2 = r * r - y[1] * y[1];
            if denom2 <= 0.0 {
                return Err(Error::BlowUp { r });
            }
            traj.r.push(r);
            traj.p.push(y[0]);
            traj.p_prime.push(y[1] / denom2.sqrt());
            traj.mu.push(y[1]);
            traj.steps_accepted += 1;
        } else {
            traj.steps_rejected += 1;
        }
        let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= fac;
    }
    Ok(traj)
}

/// Sup-distance between a trajectory re-expressed as `r = p₁(z)` and the
/// catenoid `r = ε⁻¹ cosh(ε z)` over the trajectory's strictly increasing
/// part.
pub fn catenoid_match_error(traj: &ReducedTrajectory, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!(
            "catenoid scale must be positive (got {eps})"
        )));
    }
    // Invert z = p(r) on the window where p is strictly increasing.
    let mut sup: f64 = 0.0;
    let mut count = 0usize;
    for i in 0..traj.r.len() {
        if traj.p_prime[i] <= 1e-12 {
            continue;
        }
        let z = traj.p[i];
        let r = traj.r[i];
        let model = (eps * z).cosh() / eps;
        sup = sup.max((r - model).abs());
        count += 1;
    }
    if count == 0 {
        return Err(Error::Domain(
            "catenoid match window is empty (no strictly increasing part)".into(),
        ));
    }
    Ok(sup)
}
