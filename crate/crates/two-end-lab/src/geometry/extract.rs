//! Zero-level-set extraction from grid fields.

use super::curve::NodalCurve;
use crate::error::{Error, Result};
use crate::pde::ScalarField;

/// Extract the nodal curve `z = f(r)` of a field on the upper half-strip.
/// Every grid column must change sign; use [`nodal_curve_in_window`] for
/// fields whose nodal set only spans part of the radial range.
pub fn nodal_curve_from_field(field: &ScalarField) -> Result<NodalCurve> {
    nodal_curve_in_window(field, (0.0, field.grid.r_extent))
}

/// Extract the nodal curve over the radial window `[r_lo, r_hi]`: per column,
/// the z-location of the first upward sign change by linear interpolation.
pub fn nodal_curve_in_window(field: &ScalarField, window: (f64, f64)) -> Result<NodalCurve> {
    let g = &field.grid;
    let i_lo = (window.0 / g.h_r).ceil() as usize;
    let i_hi = ((window.1 / g.h_r).floor() as usize).min(g.n_r - 1);
    if i_hi < i_lo + 3 {
        return Err(Error::Domain(format!(
            "extraction window [{}, {}] holds fewer than 4 columns",
            window.0, window.1
        )));
    }
    let mut rs = Vec::with_capacity(i_hi - i_lo + 1);
    let mut zs = Vec::with_capacity(i_hi - i_lo + 1);
    let mut missing = Vec::new();
    for i in i_lo..=i_hi {
        match column_crossing(field, i) {
            Some(z) => {
                rs.push(g.r(i));
                zs.push(z);
            }
            None => missing.push(i),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Extraction { columns: missing });
    }
    NodalCurve::from_samples(rs, zs)
}

/// First upward zero crossing along column i, or None. The bracketing pair
/// is refined through the column's cubic interpolant: the O(h²) bias of the
/// linear rule (~2e-4 at h = 0.1 for a profile-shaped column) is systematic
/// and would otherwise drown the interface-decomposition residual.
fn column_crossing(field: &ScalarField, i: usize) -> Option<f64> {
    let g = &field.grid;
    for j in 0..g.n_z - 1 {
        let a = field.get(i, j);
        let b = field.get(i, j + 1);
        if a == 0.0 {
            return Some(g.z(j));
        }
        if a < 0.0 && b >= 0.0 {
            let linear = g.z(j) + g.h_z * a / (a - b);
            if j == 0 || j + 2 >= g.n_z {
                return Some(linear);
            }
            // Catmull-Rom through the four neighbours, bisected on [z_j, z_j+1].
            let p = [field.get(i, j - 1), a, b, field.get(i, j + 2)];
            let value = |t: f64| -> f64 {
                let t2 = t * t;
                let t3 = t2 * t;
                0.5 * ((2.0 * p[1])
                    + (-p[0] + p[2]) * t
                    + (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * t2
                    + (-p[0] + 3.0 * p[1] - 3.0 * p[2] + p[3]) * t3)
            };
            let (mut ta, mut tb) = (0.0, 1.0);
            if value(ta) > 0.0 || value(tb) < 0.0 {
                return Some(linear);
            }
            for _ in 0..60 {
                let tm = 0.5 * (ta + tb);
                if value(tm) < 0.0 {
                    ta = tm;
                } else {
                    tb = tm;
                }
            }
            return Some(g.z(j) + g.h_z * 0.5 * (ta + tb));
        }
    }
    None
}
