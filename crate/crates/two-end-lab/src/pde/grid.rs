//! Structured axisymmetric half-strip grid.

use crate::error::{Error, Result};

/// Uniform grid on [0, R] x [0, Z], nodes at (i h_r, j h_z). The bottom row
/// represents the even-symmetry plane z = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiGrid {
    pub r_extent: f64,
    pub z_extent: f64,
    pub n_r: usize,
    pub n_z: usize,
    pub h_r: f64,
    pub h_z: f64,
}

impl AxiGrid {
    pub fn new(r_extent: f64, z_extent: f64, spacing: f64) -> Result<Self> {
        if !(r_extent > 0.0 && z_extent > 0.0 && spacing > 0.0) {
            return Err(Error::Domain(format!(
                "grid extents and spacing must be positive (got R = {r_extent}, Z = {z_extent}, h = {spacing})"
            )));
        }
        if spacing > 0.25 {
            return Err(Error::Domain(format!(
                "grid spacing {spacing} too coarse to resolve the interface width (need h <= 0.25)"
            )));
        }
        let n_r = (r_extent / spacing).round() as usize + 1;
        let n_z = (z_extent / spacing).round() as usize + 1;
        let h_r = r_extent / (n_r - 1) as f64;
        let h_z = z_extent / (n_z - 1) as f64;
        Ok(AxiGrid {
            r_extent,
            z_extent,
            n_r,
            n_z,
            h_r,
            h_z,
        })
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.h_r
    }

    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.h_z
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n_r + i
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_dimensions() {
        let g = AxiGrid::new(60.0, 60.0, 0.1).unwrap();
        assert_eq!(g.n_r, 601);
        assert_eq!(g.n_z, 601);
        assert!((g.h_r - 0.1).abs() < 1e-12);
        assert!((g.r(600) - 60.0).abs() < 1e-9);
    }

    #[test]
    fn coarse_grids_are_rejected() {
        assert!(AxiGrid::new(10.0, 10.0, 0.3).is_err());
        assert!(AxiGrid::new(-1.0, 10.0, 0.1).is_err());
    }
}
