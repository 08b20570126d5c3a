//! Uniform periodic grid on `[-L, L)^2` and the fields sampled on it.
//!
//! Samples are stored row-major with the row index running over `y` and the
//! column index over `x`: sample `(ix, iy)` lives at flat index `iy * n + ix`.

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::CoherentStateSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    half_extent: f64,
    n: usize,
}

impl Grid2D {
    pub fn new(half_extent: f64, n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidParameter {
                name: "half_extent",
                reason: format!("must be finite and positive, got {half_extent}"),
            });
        }
        Ok(Grid2D { half_extent, n })
    }

    /// Grid wide enough that the packet tail at the boundary is negligible over
    /// a whole orbit: `L = |xi0| + |v0|/omega + 12 sigma`.
    pub fn for_spec(spec: &CoherentStateSpec, n: usize) -> Result<Self> {
        Self::new(default_half_extent(spec), n)
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    /// Area element for trapezoid sums.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// `x_j = -L + j h`, identical on both axes.
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    pub fn point(&self, ix: usize, iy: usize) -> Vector2<f64> {
        Vector2::new(self.coord(ix), self.coord(iy))
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    /// Points in storage order.
    pub fn points(&self) -> impl Iterator<Item = Vector2<f64>> + '_ {
        (0..self.n).flat_map(move |iy| (0..self.n).map(move |ix| self.point(ix, iy)))
    }

    /// Node index nearest to coordinate `c` along either axis, clamped to the grid.
    pub fn nearest_index(&self, c: f64) -> usize {
        let j = ((c + self.half_extent) / self.spacing()).round();
        j.clamp(0.0, (self.n - 1) as f64) as usize
    }
}

/// Orbit bound plus a `12 sigma` margin.
///
/// At the boundary the amplitude is below `exp(-36)` of its peak, so the
/// periodic wrap stays under round-off even after division by the density
/// guard.
pub fn default_half_extent(spec: &CoherentStateSpec) -> f64 {
    spec.orbit_bound() + BOUNDARY_MARGIN_SIGMAS * spec.params.sigma()
}

/// Distance from the orbit to the boundary, in packet widths.
pub const BOUNDARY_MARGIN_SIGMAS: f64 = 12.0;

fn check_len(grid: &Grid2D, got: usize) -> Result<()> {
    if got != grid.len() {
        return Err(Error::SizeMismatch {
            expected: grid.len(),
            got,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(Vector2<f64>) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoid rule on the periodic grid.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid2D,
    values: Vec<Vector2<f64>>,
}

impl VectorField {
    pub fn new(grid: Grid2D, values: Vec<Vector2<f64>>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if let Some(i) = values.iter().position(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(VectorField { grid, values })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(Vector2<f64>) -> Vector2<f64>) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Vector2<f64>] {
        &self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> Vector2<f64> {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn component(&self, axis: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[axis]).collect()
    }

    /// Largest Euclidean norm over all samples.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(Vector2<f64>) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn density(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    /// `sum |psi|^2 h^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    /// Relative L2 distance `||self - other|| / ||other||`.
    pub fn relative_l2_error(&self, reference: &ComplexField) -> Result<f64> {
        if self.grid != reference.grid {
            return Err(Error::GridMismatch);
        }
        let diff: f64 = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let norm: f64 = reference.values.iter().map(|b| b.norm_sqr()).sum();
        Ok((diff / norm).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PhysParams;

    #[test]
    fn small_grid_layout() {
        let g = Grid2D::new(1.0, 8).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.coord(0), -1.0);
        assert_eq!(g.coord(7), 0.75);
        assert_eq!(g.index(3, 2), 19);
        assert_eq!(g.point(3, 2), Vector2::new(-0.25, -0.5));
    }

    #[test]
    fn spacing_for_eight_sigma() {
        let sigma = PhysParams::natural().sigma();
        let g = Grid2D::new(8.0 * sigma, 256).unwrap();
        assert_eq!(g.spacing(), 16.0 * sigma / 256.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(Grid2D::new(1.0, 7), Err(Error::GridSize(7)));
        assert_eq!(Grid2D::new(1.0, 4), Err(Error::GridSize(4)));
        assert_eq!(Grid2D::new(1.0, 24), Err(Error::GridSize(24)));
        assert!(Grid2D::new(0.0, 8).is_err());
        assert!(Grid2D::new(-1.0, 8).is_err());
        assert!(Grid2D::new(f64::INFINITY, 8).is_err());
    }

    #[test]
    fn coordinates_are_reproducible() {
        let a = Grid2D::new(3.7, 64).unwrap().coords();
        let b = Grid2D::new(3.7, 64).unwrap().coords();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn fields_validate_samples() {
        let g = Grid2D::new(1.0, 8).unwrap();
        assert_eq!(
            ScalarField::new(g, vec![0.0; 63]),
            Err(Error::SizeMismatch { expected: 64, got: 63 })
        );
        let mut v = vec![0.0; 64];
        v[5] = f64::NAN;
        assert_eq!(ScalarField::new(g, v), Err(Error::NonFinite(5)));
        let mut c = vec![Complex64::new(0.0, 0.0); 64];
        c[9] = Complex64::new(0.0, f64::INFINITY);
        assert_eq!(ComplexField::new(g, c), Err(Error::NonFinite(9)));
        assert!(VectorField::new(g, vec![Vector2::zeros(); 65]).is_err());
    }

    #[test]
    fn nearest_index_clamps() {
        let g = Grid2D::new(1.0, 8).unwrap();
        assert_eq!(g.nearest_index(0.0), 4);
        assert_eq!(g.nearest_index(-5.0), 0);
        assert_eq!(g.nearest_index(5.0), 7);
    }
}
