//! Scalar fields on the axisymmetric grid, their boundary conditions, the
//! far-field Dirichlet profile, and the text dump format.

use super::grid::AxiGrid;
use crate::error::{Error, Result};
use crate::profile::h;

/// Far-field profile parameters: the outer Dirichlet data is the even
/// two-interface composite with nodal asymptote `z = k ln r + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldBc {
    pub k: f64,
    pub c: f64,
}

/// Far-field composite `H(z - k ln r - c) + H(-z - k ln r - c) + 1`, even in
/// z. Columns whose asymptote height `k ln r + c` is non-positive carry no
/// interface; there the composite degenerates to the pure phase `+1` (the
/// formula's continuous limit).
pub fn far_field_bc(k: f64, c: f64, r: f64, z: f64) -> f64 {
    let height = if k == 0.0 {
        c
    } else {
        if r <= 0.0 {
            return 1.0;
        }
        k * r.ln() + c
    };
    if height <= 0.0 {
        return 1.0;
    }
    h(z - height) + h(-z - height) + 1.0
}

/// Grid values with boundary-condition metadata. Bottom row and axis column
/// are Neumann (even reflection); top row and right column are Dirichlet
/// from the far-field composite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: AxiGrid,
    pub values: Vec<f64>,
    pub bc: FarFieldBc,
}

impl ScalarField {
    pub fn constant(grid: &AxiGrid, value: f64, bc: FarFieldBc) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![value; grid.len()],
            bc,
        }
    }

    pub fn from_fn<F: FnMut(f64, f64) -> f64>(grid: &AxiGrid, bc: FarFieldBc, mut f: F) -> Self {
        let mut values = vec![0.0; grid.len()];
        for j in 0..grid.n_z {
            for i in 0..grid.n_r {
                values[grid.idx(i, j)] = f(grid.r(i), grid.z(j));
            }
        }
        ScalarField {
            grid: grid.clone(),
            values,
            bc,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.grid.idx(i, j);
        self.values[idx] = v;
    }

    /// Value with ghost handling: reflection across the axis (i < 0) and the
    /// symmetry plane (j < 0); clamped at the outer Dirichlet edges.
    #[inline]
    pub fn ghost(&self, i: isize, j: isize) -> f64 {
        let i = i.unsigned_abs().min(self.grid.n_r - 1);
        let j = j.unsigned_abs().min(self.grid.n_z - 1);
        self.values[self.grid.idx(i, j)]
    }

    /// Overwrite the Dirichlet rows (top and right) from the far-field data.
    pub fn apply_dirichlet(&mut self) {
        let (n_r, n_z) = (self.grid.n_r, self.grid.n_z);
        for i in 0..n_r {
            let v = far_field_bc(self.bc.k, self.bc.c, self.grid.r(i), self.grid.z(n_z - 1));
            self.set(i, n_z - 1, v);
        }
        for j in 0..n_z {
            let v = far_field_bc(self.bc.k, self.bc.c, self.grid.r(n_r - 1), self.grid.z(j));
            self.set(n_r - 1, j, v);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Central-difference u_r at an interior-or-axis node.
    pub fn du_dr(&self, i: usize, j: usize) -> f64 {
        (self.ghost(i as isize + 1, j as isize) - self.ghost(i as isize - 1, j as isize))
            / (2.0 * self.grid.h_r)
    }

    /// Central-difference u_z, even across the bottom row.
    pub fn du_dz(&self, i: usize, j: usize) -> f64 {
        (self.ghost(i as isize, j as isize + 1) - self.ghost(i as isize, j as isize - 1))
            / (2.0 * self.grid.h_z)
    }

    /// Bicubic (Catmull-Rom) interpolation with the same ghost conventions.
    pub fn sample(&self, r: f64, z: f64) -> f64 {
        let x = (r / self.grid.h_r).clamp(0.0, (self.grid.n_r - 1) as f64);
        let y = (z / self.grid.h_z).clamp(0.0, (self.grid.n_z - 1) as f64);
        let i0 = x.floor() as isize;
        let j0 = y.floor() as isize;
        let fx = x - i0 as f64;
        let fy = y - j0 as f64;
        let mut col = [0.0; 4];
        for (dj, c) in col.iter_mut().enumerate() {
            let j = j0 + dj as isize - 1;
            let row = [
                self.ghost(i0 - 1, j),
                self.ghost(i0, j),
                self.ghost(i0 + 1, j),
                self.ghost(i0 + 2, j),
            ];
            *c = catmull_rom(row, fx);
        }
        catmull_rom(col, fy)
    }

    /// Text dump: `axi-field v1 n_r n_z h_r h_z k c` header, then n_z rows of
    /// n_r space-separated values (bottom row first).
    pub fn dump(&self) -> String {
        let g = &self.grid;
        let mut out = format!(
            "axi-field v1 {} {} {} {} {} {}\n",
            g.n_r, g.n_z, g.h_r, g.h_z, self.bc.k, self.bc.c
        );
        for j in 0..g.n_z {
            let mut row = String::new();
            for i in 0..g.n_r {
                if i > 0 {
                    row.push(' ');
                }
                row.push_str(&format!("{}", self.get(i, j)));
            }
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    /// Parse the dump format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Domain("empty field dump".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 8 || parts[0] != "axi-field" || parts[1] != "v1" {
            return Err(Error::Domain(format!("bad field dump header: {header}")));
        }
        let n_r: usize = parts[2]
            .parse()
            .map_err(|_| Error::Domain("bad n_r".into()))?;
        let n_z: usize = parts[3]
            .parse()
            .map_err(|_| Error::Domain("bad n_z".into()))?;
        let h_r: f64 = parts[4]
            .parse()
            .map_err(|_| Error::Domain("bad h_r".into()))?;
        let h_z: f64 = parts[5]
            .parse()
            .map_err(|_| Error::Domain("bad h_z".into()))?;
        let k: f64 = parts[6]
            .parse()
            .map_err(|_| Error::Domain("bad k".into()))?;
        let c: f64 = parts[7]
            .parse()
            .map_err(|_| Error::Domain("bad c".into()))?;
        let grid = AxiGrid {
            r_extent: h_r * (n_r - 1) as f64,
            z_extent: h_z * (n_z - 1) as f64,
            n_r,
            n_z,
            h_r,
            h_z,
        };
        let mut values = Vec::with_capacity(grid.len());
        for line in lines {
            for tok in line.split_whitespace() {
                values.push(
                    tok.parse::<f64>()
                        .map_err(|_| Error::Domain(format!("bad value token {tok}")))?,
                );
            }
        }
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "field dump has {} values, expected {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(ScalarField {
            grid,
            values,
            bc: FarFieldBc { k, c },
        })
    }
}

fn catmull_rom(p: [f64; 4], t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    0.5 * ((2.0 * p[1])
        + (-p[0] + p[2]) * t
        + (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * t2
        + (-p[0] + 3.0 * p[1] - 3.0 * p[2] + p[3]) * t3)
}
