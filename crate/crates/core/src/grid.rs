use alloc::format;
use alloc::vec::Vec;

use crate::error::CoreError;

/// Boundary treatment of the mesh.
///
/// `Box` means homogeneous Dirichlet walls at the domain edges: field values
/// are pinned to zero there. Box nodes are cell-centered, so the walls sit
/// half a spacing outside the first and last node of each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Box,
}

/// Uniform 1-D or 2-D mesh, centered on the origin.
///
/// Periodic axes are node-indexed (`x_i = -L/2 + i·dx`, `dx = L/n`); box
/// axes are cell-centered (`x_i = -L/2 + (i+½)·dx`, `dx = L/n`). Data for
/// 2-D fields is stored row-major with axis 0 slow: `idx = i0·n1 + i1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    points: [usize; 2],
    length: [f64; 2],
    boundary: Boundary,
}

impl Grid {
    pub fn new(
        dim: usize,
        points: &[usize],
        length: &[f64],
        boundary: Boundary,
    ) -> Result<Self, CoreError> {
        if dim != 1 && dim != 2 {
            return Err(CoreError::Config(format!("dim must be 1 or 2 (got {dim})")));
        }
        if points.len() != dim || length.len() != dim {
            return Err(CoreError::Config(format!(
                "expected {dim} points/length entries (got {} and {})",
                points.len(),
                length.len()
            )));
        }
        let mut p = [1usize; 2];
        let mut l = [1.0f64; 2];
        for axis in 0..dim {
            if points[axis] < 8 {
                return Err(CoreError::Config(format!(
                    "axis {axis}: need at least 8 points (got {})",
                    points[axis]
                )));
            }
            if !(length[axis] > 0.0) {
                return Err(CoreError::Config(format!(
                    "axis {axis}: length must be positive (got {})",
                    length[axis]
                )));
            }
            p[axis] = points[axis];
            l[axis] = length[axis];
        }
        Ok(Self { dim, points: p, length: l, boundary })
    }

    /// Convenience constructor for a 1-D grid.
    pub fn line(points: usize, length: f64, boundary: Boundary) -> Result<Self, CoreError> {
        Self::new(1, &[points], &[length], boundary)
    }

    /// Convenience constructor for a square 2-D grid.
    pub fn square(points: usize, length: f64, boundary: Boundary) -> Result<Self, CoreError> {
        Self::new(2, &[points, points], &[length, length], boundary)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn points(&self, axis: usize) -> usize {
        self.points[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.length[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.length[axis] / self.points[axis] as f64
    }

    /// Total number of nodes.
    pub fn node_count(&self) -> usize {
        self.points[0] * self.points[1]
    }

    /// Volume of one cell (product of spacings).
    pub fn cell_volume(&self) -> f64 {
        let mut v = 1.0;
        for axis in 0..self.dim {
            v *= self.spacing(axis);
        }
        v
    }

    /// Coordinate of node `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let dx = self.spacing(axis);
        let offset = match self.boundary {
            Boundary::Periodic => 0.0,
            Boundary::Box => 0.5,
        };
        -0.5 * self.length[axis] + (i as f64 + offset) * dx
    }

    /// Coordinates along `axis` as a vector.
    pub fn coords(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|i| self.coord(axis, i)).collect()
    }

    /// Flat index of the node with per-axis indices `(i0, i1)`.
    /// In 1-D, `i1` must be zero.
    pub fn index(&self, i0: usize, i1: usize) -> usize {
        debug_assert!(i0 < self.points[0] && i1 < self.points[1]);
        i0 * self.points[1] + i1
    }

    /// Per-axis indices of the node with flat index `idx`.
    pub fn unindex(&self, idx: usize) -> (usize, usize) {
        (idx / self.points[1], idx % self.points[1])
    }

    /// Position of node `idx` (second component is 0.0 in 1-D).
    pub fn position(&self, idx: usize) -> (f64, f64) {
        let (i0, i1) = self.unindex(idx);
        let x = self.coord(0, i0);
        let y = if self.dim == 2 { self.coord(1, i1) } else { 0.0 };
        (x, y)
    }

    /// Quadrature weight of node `idx`. Uniform rectangle/midpoint weights:
    /// spectrally accurate on periodic grids, and the native cell-centered
    /// rule on box grids (it keeps the Crank–Nicolson norm exactly
    /// conserved in the same inner product the diagnostics use).
    pub fn quad_weight(&self, _idx: usize) -> f64 {
        self.cell_volume()
    }

    /// Σ f_i w_i over all nodes.
    pub fn integrate(&self, data: &[f64]) -> f64 {
        debug_assert_eq!(data.len(), self.node_count());
        let w = self.cell_volume();
        data.iter().sum::<f64>() * w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_line_spacing() {
        let g = Grid::line(8, 8.0, Boundary::Periodic).unwrap();
        assert_eq!(g.spacing(0), 1.0);
        assert_eq!(g.coord(0, 0), -4.0);
        assert_eq!(g.coord(0, 7), 3.0);
        assert_eq!(g.node_count(), 8);
    }

    #[test]
    fn box_square_spacing() {
        let g = Grid::new(2, &[64, 64], &[10.0, 10.0], Boundary::Box).unwrap();
        assert_eq!(g.node_count(), 4096);
        assert!((g.spacing(0) - 10.0 / 64.0).abs() < 1e-15);
        assert!((g.spacing(1) - 10.0 / 64.0).abs() < 1e-15);
        // cell-centered: first node half a spacing inside the wall
        assert!((g.coord(0, 0) + 5.0 - 0.5 * g.spacing(0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Grid::line(4, 1.0, Boundary::Periodic).is_err());
        assert!(Grid::line(16, -1.0, Boundary::Periodic).is_err());
        assert!(Grid::new(3, &[8, 8, 8], &[1.0, 1.0, 1.0], Boundary::Periodic).is_err());
        assert!(Grid::new(2, &[8], &[1.0], Boundary::Periodic).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::square(16, 2.0, Boundary::Periodic).unwrap();
        for idx in 0..g.node_count() {
            let (i0, i1) = g.unindex(idx);
            assert_eq!(g.index(i0, i1), idx);
        }
    }
}
