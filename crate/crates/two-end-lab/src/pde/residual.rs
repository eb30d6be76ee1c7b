//! Finite-difference residual of the axisymmetric Allen-Cahn equation and
//! the matching sparse Jacobian.
//!
//! Second-order central differences for `u_zz + u_rr + u_r/r + u - u³`; the
//! axis column uses the regularized limit `u_rr + u_r/r -> 2 u_rr` with even
//! reflection, the bottom row reflects evenly across z = 0, and the top row
//! and right column are Dirichlet (their residual rows are identities).

use super::field::ScalarField;
use super::grid::AxiGrid;
use faer::sparse::{SparseColMat, Triplet};

/// Pointwise PDE residual as a field (zero on the Dirichlet rows).
pub fn residual(field: &ScalarField) -> ScalarField {
    let g = field.grid.clone();
    let mut out = ScalarField::constant(&g, 0.0, field.bc);
    for j in 0..g.n_z - 1 {
        for i in 0..g.n_r - 1 {
            out.set(i, j, residual_at(field, i, j));
        }
    }
    out
}

/// Max-norm of the residual over the non-Dirichlet nodes (infinite when any
/// entry is not finite).
pub fn residual_norm(field: &ScalarField) -> f64 {
    let g = &field.grid;
    let mut m: f64 = 0.0;
    for j in 0..g.n_z - 1 {
        for i in 0..g.n_r - 1 {
            let v = residual_at(field, i, j);
            if !v.is_finite() {
                return f64::INFINITY;
            }
            m = m.max(v.abs());
        }
    }
    m
}

#[inline]
pub fn residual_at(field: &ScalarField, i: usize, j: usize) -> f64 {
    let g = &field.grid;
    let hr2 = g.h_r * g.h_r;
    let hz2 = g.h_z * g.h_z;
    let u = field.get(i, j);
    let (ii, jj) = (i as isize, j as isize);
    let u_e = field.ghost(ii + 1, jj);
    let u_w = field.ghost(ii - 1, jj);
    let u_n = field.ghost(ii, jj + 1);
    let u_s = field.ghost(ii, jj - 1);
    let radial = if i == 0 {
        // axis limit: u_rr + u_r/r -> 2 u_rr, with even ghost u_w = u_e
        4.0 * (u_e - u) / hr2
    } else {
        let r = g.r(i);
        (u_e - 2.0 * u + u_w) / hr2 + (u_e - u_w) / (2.0 * g.h_r * r)
    };
    let vertical = (u_n - 2.0 * u + u_s) / hz2;
    radial + vertical + u - u * u * u
}

/// Unknown layout: all nodes except the Dirichlet top row / right column.
#[derive(Debug, Clone)]
pub struct UnknownMap {
    pub n_r: usize,
    pub n_z: usize,
}

impl UnknownMap {
    pub fn new(grid: &AxiGrid) -> Self {
        UnknownMap {
            n_r: grid.n_r,
            n_z: grid.n_z,
        }
    }

    #[inline]
    pub fn count(&self) -> usize {
        (self.n_r - 1) * (self.n_z - 1)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        if i < self.n_r - 1 && j < self.n_z - 1 {
            Some(j * (self.n_r - 1) + i)
        } else {
            None
        }
    }

    #[inline]
    pub fn node(&self, idx: usize) -> (usize, usize) {
        (idx % (self.n_r - 1), idx / (self.n_r - 1))
    }
}

/// Residual restricted to the unknown nodes, as a flat vector.
pub fn residual_vector(field: &ScalarField, map: &UnknownMap) -> Vec<f64> {
    let mut out = vec![0.0; map.count()];
    for j in 0..map.n_z - 1 {
        for i in 0..map.n_r - 1 {
            out[map.index(i, j).unwrap()] = residual_at(field, i, j);
        }
    }
    out
}

/// Sparse Jacobian of the residual vector with respect to the unknowns:
/// the five-point stencil plus the diagonal `1 - 3u²`. Ghost reflections
/// fold the mirrored neighbours back into the stencil.
pub fn jacobian(field: &ScalarField, map: &UnknownMap) -> SparseColMat<usize, f64> {
    let g = &field.grid;
    let hr2 = g.h_r * g.h_r;
    let hz2 = g.h_z * g.h_z;
    let n = map.count();
    let mut trips: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(5 * n);
    for j in 0..map.n_z - 1 {
        for i in 0..map.n_r - 1 {
            let row = map.index(i, j).unwrap();
            let u = field.get(i, j);
            let mut diag = -2.0 / hz2 + 1.0 - 3.0 * u * u;
            let mut push = |col: Option<usize>, v: f64, diag: &mut f64| match col {
                Some(c) => trips.push(Triplet::new(row, c, v)),
                // Dirichlet neighbour: constant, no column.
                None => {
                    let _ = diag;
                }
            };
            // radial part
            if i == 0 {
                diag += -4.0 / hr2;
                push(map.index(1, j), 4.0 / hr2, &mut diag);
            } else {
                let r = g.r(i);
                diag += -2.0 / hr2;
                let c_e = 1.0 / hr2 + 1.0 / (2.0 * g.h_r * r);
                let c_w = 1.0 / hr2 - 1.0 / (2.0 * g.h_r * r);
                push(map.index(i + 1, j), c_e, &mut diag);
                push(map.index(i - 1, j), c_w, &mut diag);
            }
            // vertical part
            let c_z = 1.0 / hz2;
            if j == 0 {
                // even ghost: u_s = u_n
                push(map.index(i, 1), 2.0 * c_z, &mut diag);
            } else {
                push(map.index(i, j + 1), c_z, &mut diag);
                push(map.index(i, j - 1), c_z, &mut diag);
            }
            trips.push(Triplet::new(row, row, diag));
        }
    }
    SparseColMat::try_new_from_triplets(n, n, &trips).expect("valid Jacobian triplets")
}

/// Derivative of the residual vector with respect to the far-field growth
/// rate `k` (the Dirichlet data depends on k; only boundary-adjacent rows are
/// nonzero). `c` is held fixed.
pub fn residual_k_derivative(field: &ScalarField, map: &UnknownMap) -> Vec<f64> {
    let g = &field.grid;
    let hr2 = g.h_r * g.h_r;
    let hz2 = g.h_z * g.h_z;
    let mut out = vec![0.0; map.count()];
    let dg_dk = |r: f64, z: f64| -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let height = field.bc.k * r.ln() + field.bc.c;
        if height <= 0.0 {
            return 0.0;
        }
        -r.ln() * (crate::profile::h1(z - height) + crate::profile::h1(-z - height))
    };
    // right column neighbours
    let i = map.n_r - 2;
    let r_b = g.r(map.n_r - 1);
    for j in 0..map.n_z - 1 {
        let c_e = 1.0 / hr2 + 1.0 / (2.0 * g.h_r * g.r(i));
        out[map.index(i, j).unwrap()] += c_e * dg_dk(r_b, g.z(j));
    }
    // top row neighbours
    let j = map.n_z - 2;
    let z_t = g.z(map.n_z - 1);
    for i in 0..map.n_r - 1 {
        out[map.index(i, j).unwrap()] += dg_dk(g.r(i), z_t) / hz2;
    }
    out
}
