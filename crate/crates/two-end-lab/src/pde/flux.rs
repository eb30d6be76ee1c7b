//! Balancing flux: the divergence-free current obtained from translating
//! the energy density along the axis,
//!
//! ```text
//! Φ = (½|∇u|² + F(u)) e_z - (∂_z u) ∇u,      F(u) = ¼(u²-1)²,
//! ```
//!
//! integrated over the boundary of a rectangle [r_a, r_b] × [0, z_top] of
//! revolution (measure weight 2πr). Exact solutions give zero; the computed
//! value is a discretization diagnostic.

use super::field::ScalarField;
use crate::error::{Error, Result};

fn well(u: f64) -> f64 {
    0.25 * (u * u - 1.0) * (u * u - 1.0)
}

/// Flux through the rectangle boundary, plus a warning flag when the
/// rectangle touches the outer Dirichlet boundary (contaminated data).
pub fn balancing_flux(field: &ScalarField, r_range: (f64, f64), z_top: f64) -> Result<(f64, bool)> {
    let g = &field.grid;
    let (ra, rb) = r_range;
    if !(ra >= 0.0 && rb > ra && z_top > 0.0 && rb <= g.r_extent && z_top <= g.z_extent) {
        return Err(Error::Domain(format!(
            "flux rectangle [{ra}, {rb}] x [0, {z_top}] not inside the grid"
        )));
    }
    let ia = (ra / g.h_r).round() as usize;
    let ib = (rb / g.h_r).round() as usize;
    let jt = (z_top / g.h_z).round() as usize;
    let warning = ib + 1 >= g.n_r || jt + 1 >= g.n_z;
    let two_pi = 2.0 * std::f64::consts::PI;

    // vertical faces: Φ·(±e_r) = ∓ u_z u_r
    let side = |i: usize| -> f64 {
        let mut acc = 0.0;
        for j in 0..=jt {
            let w = if j == 0 || j == jt { 0.5 } else { 1.0 };
            acc += w * field.du_dr(i, j) * field.du_dz(i, j);
        }
        acc * g.h_z * two_pi * g.r(i)
    };
    // horizontal faces: Φ·(±e_z) = ±(½u_r² - ½u_z² + F(u))
    let face = |j: usize| -> f64 {
        let mut acc = 0.0;
        for i in ia..=ib {
            let w = if i == ia || i == ib { 0.5 } else { 1.0 };
            let ur = field.du_dr(i, j);
            let uz = field.du_dz(i, j);
            let u = field.get(i, j);
            acc += w * (0.5 * ur * ur - 0.5 * uz * uz + well(u)) * g.r(i);
        }
        acc * g.h_r * two_pi
    };

    let total = face(jt) - face(0) - side(ib) + side(ia);
    Ok((total, warning))
}
