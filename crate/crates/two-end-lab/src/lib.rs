//! Numerical laboratory for axially symmetric two-interface ("two-end")
//! solutions of the Allen-Cahn equation `-Δu = u - u³` in ℝ³.
//!
//! In cylindrical coordinates an axially symmetric solution that is even in
//! `z` satisfies
//!
//! ```text
//! u_zz + u_rr + u_r / r + u - u³ = 0,      u(r, z) = u(r, -z),  u_r(0, z) = 0,
//! ```
//!
//! with far field `u(r, ·) → H(· - k ln r - c)` where `H(t) = tanh(t/√2)` is
//! the one-dimensional interface profile and `k` the logarithmic growth rate
//! of the nodal curve. The crate provides:
//!
//! * [`profile`] — the profile `H` and the interaction constants `c₀`, `c₁`;
//! * [`geometry`] — nodal curves, Fermi (tubular) coordinate charts with the
//!   exact metric factors, and nodal-set extraction from grid fields;
//! * [`reduced`] — the radial Toda equation with its explicit solution, the
//!   catenoid family, the flux form of the reduced nodal-line equation, and a
//!   shooting probe for the low-growth-rate nonexistence mechanism;
//! * [`pde`] — a finite-difference Newton solver for the axisymmetric
//!   equation on a half-strip, interface ansatz construction, interface
//!   decomposition `u = ū + φ`, balancing-flux and monotonicity diagnostics;
//! * [`continuation`] — pseudo-arclength tracing of the one-parameter family
//!   of solutions in (field, growth rate) space;
//! * [`config`], [`report`], [`run`] — configuration, orchestration and
//!   artifact emission for the `two-end-lab` command line tool.

// Guards written as `!(x > 0.0)` are deliberate: they reject NaN together
// with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod continuation;
pub mod error;
pub mod geometry;
pub mod pde;
pub mod profile;
pub mod reduced;
pub mod report;
pub mod run;
pub mod util;

pub use error::{Error, Result};
pub use profile::{Constants, HeteroclinicProfile};
