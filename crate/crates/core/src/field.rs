use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::Grid;
use crate::C64;

/// A value per grid node. Fields are immutable snapshots in practice: every
/// operation returns a new field, so they are safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: Grid,
    data: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type ComplexField = Field<C64>;

impl<T: Copy> Field<T> {
    pub fn new(grid: Grid, data: Vec<T>) -> Self {
        assert_eq!(data.len(), grid.node_count(), "data length must match grid");
        Self { grid, data }
    }

    pub fn constant(grid: Grid, value: T) -> Self {
        let n = grid.node_count();
        Self { grid, data: vec![value; n] }
    }

    /// Build from a function of the node position `(x, y)` (`y = 0` in 1-D).
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> T) -> Self {
        let data = (0..grid.node_count())
            .map(|idx| {
                let (x, y) = grid.position(idx);
                f(x, y)
            })
            .collect();
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(&T) -> U) -> Field<U> {
        Field { grid: self.grid.clone(), data: self.data.iter().map(f).collect() }
    }

    pub fn zip_map<U: Copy, V: Copy>(
        &self,
        other: &Field<U>,
        mut f: impl FnMut(T, U) -> V,
    ) -> Field<V> {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| f(*a, *b))
            .collect();
        Field { grid: self.grid.clone(), data }
    }
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Σ f_i w_i.
    pub fn integrate(&self) -> f64 {
        self.grid.integrate(&self.data)
    }

    /// sqrt(Σ f_i² w_i).
    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl ComplexField {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, C64::new(0.0, 0.0))
    }

    /// Σ |f_i|² w_i.
    pub fn norm_sq_integral(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    /// sqrt(Σ |f_i − g_i|² w_i).
    pub fn l2_distance(&self, other: &ComplexField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let sum: f64 = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (sum * self.grid.cell_volume()).sqrt()
    }

    /// ⟨self|other⟩ = Σ conj(f_i) g_i w_i.
    pub fn inner(&self, other: &ComplexField) -> C64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.cell_volume()
    }
}

/// Complex amplitude on a grid with its normalization convention:
/// `norm_target = 1` for the probabilistic field ψ, `N` for Ψ = √N ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub field: ComplexField,
    pub norm_target: f64,
}

impl WaveField {
    pub fn new(field: ComplexField, norm_target: f64) -> Self {
        Self { field, norm_target }
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn values(&self) -> &[C64] {
        self.field.data()
    }

    /// ∫|ψ|² dx; the caller compares with `norm_target`.
    pub fn check_normalization(&self) -> f64 {
        self.field.norm_sq_integral()
    }

    /// Rescale so that `check_normalization` returns `norm_target`.
    pub fn normalize(&mut self) {
        let n = self.check_normalization();
        if n > 0.0 {
            let s = (self.norm_target / n).sqrt();
            for v in self.field.data_mut() {
                *v *= s;
            }
        }
    }
}
