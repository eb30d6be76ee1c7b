//! Effective one-dimensional interface models.
//!
//! The separation `q(r)` of two weakly interacting interfaces obeys the
//! radial Toda equation
//!
//! ```text
//! c₀ q'' + (c₀/r) q' - c₁ e^{-2√2 q} = 0,    q'(0) = 0,
//! ```
//!
//! whose solutions form the one-parameter family
//! `q_ε(r) = 𝚚(εr) - (√2/2) ln ε` with
//! `𝚚(r) = (1/(2√2)) ln((1 + a r²)²/8)` and `a = 2√2 c₁/c₀`. The nodal-line
//! equation away from the Toda regime is kept in flux form: with
//! `μ = r p'/√(1+p'²)`,
//!
//! ```text
//! dμ/dr = (c₁/c₀) r e^{-2√2 p},
//! ```
//!
//! identifying the interface separation with `2p`. The catenoid graph and
//! the Jacobi fields of the catenoid complete the model set.

mod integrate;
mod probe;

pub use integrate::{
    catenoid_match_error, integrate_reduced, IntegralCheck, ReducedTrajectory, StepControl,
};
pub use probe::{nonexistence_probe, ProbeControls, ProbeReport, TrialResult, TrialStatus};

use crate::error::{Error, Result};
use crate::geometry::NodalCurve;
use crate::profile::Constants;
use std::f64::consts::SQRT_2;

/// The explicit solution of the radial Toda equation for a given scale ε.
#[derive(Debug, Clone)]
pub struct TodaSolution {
    pub eps: f64,
    /// `a = 2√2 c₁/c₀` (= 24 for the exact constants).
    pub a: f64,
    offset: f64,
}

impl TodaSolution {
    pub fn new(eps: f64, constants: Constants) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Domain(format!(
                "Toda scale must be positive (got {eps})"
            )));
        }
        Ok(TodaSolution {
            eps,
            a: constants.toda_a(),
            offset: -SQRT_2 / 2.0 * eps.ln(),
        })
    }

    /// `𝚚`, `𝚚'` or `𝚚''` of the unit-scale solution.
    fn base(a: f64, r: f64, order: u8) -> f64 {
        let den = 1.0 + a * r * r;
        match order {
            0 => (den.ln() - (3.0 / 2.0) * 2f64.ln()) / SQRT_2,
            1 => SQRT_2 * a * r / den,
            2 => SQRT_2 * a * (1.0 - a * r * r) / (den * den),
            _ => unreachable!(),
        }
    }

    /// `q_ε`, `q_ε'` or `q_ε''` at r >= 0.
    pub fn eval(&self, r: f64, order: u8) -> f64 {
        let s = self.eps * r;
        match order {
            0 => Self::base(self.a, s, 0) + self.offset,
            1 => self.eps * Self::base(self.a, s, 1),
            2 => self.eps * self.eps * Self::base(self.a, s, 2),
            _ => f64::NAN,
        }
    }

    /// Third derivative (used by charts built on Toda curves).
    pub fn third_derivative(&self, r: f64) -> f64 {
        let a = self.a;
        let s = self.eps * r;
        let den = 1.0 + a * s * s;
        self.eps.powi(3) * (-2.0 * SQRT_2 * a * a * s * (3.0 - a * s * s) / den.powi(3))
    }
}

/// Evaluate `q_ε` (order 0), `q_ε'` (1) or `q_ε''` (2) at r.
pub fn toda_explicit(eps: f64, r: f64, order: u8, constants: Constants) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!(
            "toda_explicit: r = {r} out of range"
        )));
    }
    if order > 2 {
        return Err(Error::Domain(format!("toda_explicit: order {order} > 2")));
    }
    Ok(TodaSolution::new(eps, constants)?.eval(r, order))
}

/// Left side of the Toda equation for an arbitrary twice-differentiable `q`,
/// supplied as `q(r, order)` with order 0..=2. At `r = 0` the `q'/r` term is
/// evaluated in the limit sense (`q'(0) = 0` is assumed), which turns the
/// radial part into `2 c₀ q''(0)`.
pub fn toda_residual<Q: Fn(f64, u8) -> f64>(q: Q, r: f64, constants: Constants) -> f64 {
    let Constants { c0, c1 } = constants;
    let interaction = c1 * (-2.0 * SQRT_2 * q(r, 0)).exp();
    if r == 0.0 {
        2.0 * c0 * q(0.0, 2) - interaction
    } else {
        c0 * q(r, 2) + c0 * q(r, 1) / r - interaction
    }
}

/// Catenoid nodal curve `f(r) = k arccosh(r/k) + b`.
pub fn catenoid_curve(k: f64, b: f64) -> Result<NodalCurve> {
    NodalCurve::catenoid(k, b)
}

/// Interaction closure mode for the reduced flux equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionMode {
    /// Identify the interface separation with twice the nodal height.
    DEqualsTwoP,
}

/// Right side of the flux form of the reduced nodal-line equation:
/// `(c₁/c₀) r e^{-2√2 p}`. The `O(r⁻²)` forcing of the full equation is
/// deliberately dropped here; the probe can reinstate a pessimistic bound for
/// it through [`StepControl::i2_amplitude`].
pub fn reduced_flux_rhs(p: f64, r: f64, _mode: InteractionMode, constants: Constants) -> f64 {
    constants.c1 / constants.c0 * r * (-2.0 * SQRT_2 * p).exp()
}

/// Jacobi fields of the unit catenoid: solutions of
/// `ξ'' - 2 tanh(z) ξ' + ξ = 0`, together with their Wronskian
/// `W = ξ₁ ξ₂' - ξ₂ ξ₁' = cosh² z`.
pub fn jacobi_fields(z: f64) -> (f64, f64, f64) {
    let (x1, x2, w) = jacobi_fields_full(z);
    (x1.0, x2.0, w)
}

/// Jacobi fields with first and second derivatives: `((ξ, ξ', ξ''), ...)`.
pub fn jacobi_fields_full(z: f64) -> ((f64, f64, f64), (f64, f64, f64), f64) {
    let sh = z.sinh();
    let ch = z.cosh();
    let x1 = (sh, ch, sh);
    // ξ₂ = ∂_ε(ε⁻¹ cosh(εz))|_{ε=1}
    let x2 = (-ch + z * sh, z * ch, ch + z * sh);
    let w = x1.0 * x2.1 - x2.0 * x1.1;
    (x1, x2, w)
}
