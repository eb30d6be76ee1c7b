//! Nodal curves and Fermi (tubular) coordinate charts.

mod chart;
pub(crate) mod curve;
mod extract;

pub use chart::{FermiChart, LaplacianCoeffs};
pub use curve::{fit_log_tail, CurveKind, NodalCurve};
pub use extract::{nodal_curve_from_field, nodal_curve_in_window};
