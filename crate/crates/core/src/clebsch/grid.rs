//! Uniform periodic grids in one or two dimensions with fourth-order
//! central-difference stencils.

use serde::{Deserialize, Serialize};

use super::ClebschError;
use crate::spacetime::Vec3;

/// Cells are vertex-centred: cell `i` sits at `x = i·h`. In 2D the linear
/// index is `j·n + i` with `i` along x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

impl Grid {
    pub const MIN_CELLS: usize = 8;

    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self, ClebschError> {
        let g = Self { dim, n, length };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ClebschError> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(ClebschError::InvalidGrid(format!("dim must be 1 or 2 (got {})", self.dim)));
        }
        if self.n < Self::MIN_CELLS {
            return Err(ClebschError::InvalidGrid(format!(
                "n must be >= {} (got {})",
                Self::MIN_CELLS,
                self.n
            )));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(ClebschError::InvalidGrid(format!("L must be > 0 (got {})", self.length)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Total number of cells, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.n, idx / self.n)
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let h = self.spacing();
        let (i, j) = self.coords(idx);
        if self.dim == 1 {
            Vec3::new(i as f64 * h, 0.0, 0.0)
        } else {
            Vec3::new(i as f64 * h, j as f64 * h, 0.0)
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(|i| self.position(i))
    }

    pub fn sample(&self, f: impl Fn(&Vec3) -> f64) -> Vec<f64> {
        self.positions().map(|p| f(&p)).collect()
    }

    /// Index of the neighbour `offset` cells away along `axis`, wrapping.
    #[inline]
    fn shift(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let n = self.n as isize;
        let (i, j) = self.coords(idx);
        if axis == 0 {
            let ii = (i as isize + offset).rem_euclid(n) as usize;
            j * self.n + ii
        } else {
            let jj = (j as isize + offset).rem_euclid(n) as usize;
            jj * self.n + i
        }
    }

    /// Fourth-order central first derivative along `axis`.
    pub fn derivative(&self, f: &[f64], axis: usize) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.len());
        debug_assert!(axis < self.dim);
        let inv = 1.0 / (12.0 * self.spacing());
        (0..f.len())
            .map(|k| {
                let p1 = f[self.shift(k, axis, 1)];
                let m1 = f[self.shift(k, axis, -1)];
                let p2 = f[self.shift(k, axis, 2)];
                let m2 = f[self.shift(k, axis, -2)];
                (8.0 * (p1 - m1) - (p2 - m2)) * inv
            })
            .collect()
    }

    /// Gradient; components along axes outside the grid are zero.
    pub fn gradient(&self, f: &[f64]) -> Vec<Vec3> {
        let dx = self.derivative(f, 0);
        if self.dim == 1 {
            dx.into_iter().map(|d| Vec3::new(d, 0.0, 0.0)).collect()
        } else {
            let dy = self.derivative(f, 1);
            dx.into_iter().zip(dy).map(|(a, b)| Vec3::new(a, b, 0.0)).collect()
        }
    }

    /// Divergence of a vector field (grid axes only).
    pub fn divergence(&self, flux: &[Vec3]) -> Vec<f64> {
        let fx: Vec<f64> = flux.iter().map(|v| v.x).collect();
        let mut div = self.derivative(&fx, 0);
        if self.dim == 2 {
            let fy: Vec<f64> = flux.iter().map(|v| v.y).collect();
            for (d, e) in div.iter_mut().zip(self.derivative(&fy, 1)) {
                *d += e;
            }
        }
        div
    }

    /// `v⃗·∇f` with the same stencils.
    pub fn advect(&self, v: &[Vec3], f: &[f64]) -> Vec<f64> {
        self.gradient(f).iter().zip(v).map(|(g, v)| g.dot(v)).collect()
    }

    /// Rectangle-rule integral, spectrally accurate for smooth periodic data.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.cell_volume()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(3, 16, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0).is_err());
        assert!(Grid::new(1, 16, 0.0).is_err());
        assert!(Grid::new(2, 8, 2.0).is_ok());
    }

    #[test]
    fn indexing_round_trips() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        assert_eq!(g.len(), 64);
        let (i, j) = g.coords(19);
        assert_eq!((i, j), (3, 2));
        assert_eq!(g.position(19), Vec3::new(3.0 / 8.0, 2.0 / 8.0, 0.0));
        assert_eq!(g.shift(0, 0, -1), 7);
        assert_eq!(g.shift(0, 1, -1), 56);
    }

    #[test]
    fn derivative_is_fourth_order() {
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for n in [16, 32, 64] {
            let g = Grid::new(1, n, 1.0).unwrap();
            let f = g.sample(|p| (2.0 * PI * p.x).sin());
            let d = g.derivative(&f, 0);
            let e = g
                .positions()
                .zip(&d)
                .map(|(p, d)| (d - 2.0 * PI * (2.0 * PI * p.x).cos()).abs())
                .fold(0.0, f64::max);
            errs.push(e);
            hs.push(g.spacing());
        }
        let order = crate::numerics::log_log_slope(&hs, &errs).unwrap();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn divergence_telescopes() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let flux: Vec<Vec3> = g
            .positions()
            .map(|p| Vec3::new((2.0 * PI * p.x).sin() + p.y, (2.0 * PI * p.y).cos() * 3.0, 0.0))
            .collect();
        let total: f64 = g.divergence(&flux).iter().sum();
        assert!(total.abs() < 1e-12, "{total}");
    }

    #[test]
    fn second_axis_derivative() {
        let g = Grid::new(2, 64, 2.0).unwrap();
        let f = g.sample(|p| (PI * p.y).cos());
        let d = g.derivative(&f, 1);
        for (p, d) in g.positions().zip(d) {
            assert!((d + PI * (PI * p.y).sin()).abs() < 1e-4);
        }
    }
}
