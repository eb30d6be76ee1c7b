//! The one-dimensional interface profile and its interaction constants.
//!
//! `H(t) = tanh(t/√2)` is the heteroclinic connection of the double well
//! `F(u) = ¼(u²-1)²`: it solves `H'' + H - H³ = 0` with `H(0) = 0` and
//! `H(±∞) = ±1`. Two integrals of `H` drive every reduced model and every
//! projection integral in the crate:
//!
//! * `c₀ = ∫ H'(t)² dt = 2√2/3`,
//! * `c₁ = 3√2 ∫ H'(s)² e^{√2 s} ds = 8`.
//!
//! Both are computed by composite Gauss-Legendre quadrature and checked
//! against the closed forms; the stored values are what every other module
//! reads, so all formulas share identical constants.

use crate::error::{Error, Result};
use crate::util::quad_gl;
use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

/// Closed form of `c₀ = ∫ H'²`.
pub const C0_CLOSED: f64 = 2.0 * SQRT_2 / 3.0;
/// Closed form of `c₁ = 3√2 ∫ H'² e^{√2 s} ds`.
pub const C1_CLOSED: f64 = 8.0;

/// `H(t) = tanh(t/√2)`.
#[inline]
pub fn h(t: f64) -> f64 {
    (t / SQRT_2).tanh()
}

/// `H'(t) = sech²(t/√2)/√2`.
#[inline]
pub fn h1(t: f64) -> f64 {
    let c = (t / SQRT_2).cosh();
    1.0 / (SQRT_2 * c * c)
}

/// `H''(t) = H³ - H`.
#[inline]
pub fn h2(t: f64) -> f64 {
    let v = h(t);
    v * v * v - v
}

/// Evaluate `H`, `H'` or `H''` at `t`.
pub fn eval_profile(t: f64, order: u8) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("eval_profile: non-finite t = {t}")));
    }
    match order {
        0 => Ok(h(t)),
        1 => Ok(h1(t)),
        2 => Ok(h2(t)),
        _ => Err(Error::Domain(format!(
            "eval_profile: order must be 0, 1 or 2 (got {order})"
        ))),
    }
}

/// Quadrature rule used for the constants.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Truncation half-width `T`; integrals run over [-T, T].
    pub half_width: f64,
    /// Total node count (panels × order).
    pub nodes: usize,
    /// Nodes per panel.
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            half_width: 25.0,
            nodes: 2048,
            order: 16,
        }
    }
}

impl QuadratureSpec {
    fn panels(&self) -> usize {
        (self.nodes / self.order).max(2)
    }

    fn validate(&self) -> Result<()> {
        if self.half_width < 20.0 || self.nodes < 2000 {
            return Err(Error::Domain(format!(
                "quadrature spec requires T >= 20 and N >= 2000 (got T = {}, N = {})",
                self.half_width, self.nodes
            )));
        }
        Ok(())
    }
}

fn self_checked_quad<F: Fn(f64) -> f64 + Copy>(
    f: F,
    spec: &QuadratureSpec,
    budget: f64,
) -> Result<f64> {
    let panels = spec.panels();
    let fine = quad_gl(f, -spec.half_width, spec.half_width, panels, spec.order);
    let coarse = quad_gl(f, -spec.half_width, spec.half_width, panels / 2, spec.order);
    let estimate = (fine - coarse).abs();
    if estimate > budget {
        return Err(Error::Accuracy { estimate, budget });
    }
    Ok(fine)
}

/// `c₀ = ∫ H'(t)² dt` by quadrature. Must agree with `2√2/3` to 1e-10.
pub fn compute_c0(spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    self_checked_quad(|t| h1(t) * h1(t), spec, 1e-10)
}

/// `c₁ = 3√2 ∫ H'(s)² e^{√2 s} ds` by quadrature. Must agree with 8 to 1e-8.
///
/// The integrand decays like `e^{-√2 |s|}` at both ends (the factor `e^{√2 s}`
/// eats half of the `e^{-2√2 s}` decay on the right), which the truncation
/// check below relies on.
pub fn compute_c1(spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let f = |s: f64| h1(s) * h1(s) * (SQRT_2 * s).exp();
    // Tail sanity: the integrand at ±T must be below the accuracy budget.
    let t = spec.half_width;
    let tail = f(t).max(f(-t));
    if tail > 1e-9 {
        return Err(Error::Accuracy {
            estimate: tail,
            budget: 1e-9,
        });
    }
    Ok(3.0 * SQRT_2 * self_checked_quad(f, spec, 1e-8)?)
}

/// The stored interaction constants. Copy-cheap; every module reads these
/// instead of re-deriving the integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c0: f64,
    pub c1: f64,
}

impl Constants {
    /// Coefficient `a = 2√2 c₁/c₀` of the explicit Toda solution.
    pub fn toda_a(&self) -> f64 {
        2.0 * SQRT_2 * self.c1 / self.c0
    }

    /// Quadrature-backed constants, computed once per process.
    pub fn get() -> Constants {
        static CELL: OnceLock<Constants> = OnceLock::new();
        *CELL.get_or_init(|| {
            HeteroclinicProfile::new()
                .expect("default quadrature spec must resolve the constants")
                .constants()
        })
    }
}

/// The profile together with its constants and the quadrature rule that
/// produced them. Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct HeteroclinicProfile {
    pub c0: f64,
    pub c1: f64,
    pub quadrature: QuadratureSpec,
}

impl HeteroclinicProfile {
    pub fn new() -> Result<Self> {
        Self::with_spec(QuadratureSpec::default())
    }

    pub fn with_spec(spec: QuadratureSpec) -> Result<Self> {
        let c0 = compute_c0(&spec)?;
        let c1 = compute_c1(&spec)?;
        Ok(HeteroclinicProfile {
            c0,
            c1,
            quadrature: spec,
        })
    }

    pub fn eval(&self, t: f64, order: u8) -> Result<f64> {
        eval_profile(t, order)
    }

    pub fn constants(&self) -> Constants {
        Constants {
            c0: self.c0,
            c1: self.c1,
        }
    }
}
