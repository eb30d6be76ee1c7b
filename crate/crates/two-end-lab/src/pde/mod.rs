//! Finite-difference treatment of the axisymmetric Allen-Cahn equation on a
//! half-strip: grid, fields, ansatz construction, Newton solver, interface
//! decomposition and diagnostics.

pub mod ansatz;
pub mod decompose;
pub mod diag;
pub mod field;
pub mod flux;
pub mod grid;
pub mod newton;
pub mod residual;

pub use ansatz::{build_approximate_solution, interface_separation};
pub use decompose::{
    decompose_interface, decompose_interface_with, DecompositionOptions, InterfaceDecomposition,
};
pub use diag::{growth_rate_fit, monotonicity_check, GrowthFit, MonotonicityReport};
pub use field::{far_field_bc, FarFieldBc, ScalarField};
pub use flux::balancing_flux;
pub use grid::AxiGrid;
pub use newton::{newton_solve, newton_solve_with, LinearWorkspace, NewtonOutcome};
pub use residual::{residual, residual_norm};
