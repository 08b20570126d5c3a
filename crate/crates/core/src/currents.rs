//! Probability currents with the spin term, and the rigid-body reading of the
//! resulting velocity field.
//!
//! Cross products with the out-of-plane axis are embedded in the plane once:
//! `k x (a_x, a_y) = (-a_y, a_x)` and `(grad rho) x k = (d_y rho, -d_x rho)`.

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::analytic::classical_trajectory;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid2D, ScalarField, VectorField};
use crate::params::{CoherentStateSpec, PhysParams};
use crate::spectral::Spectral2D;

/// Densities below `DENSITY_GUARD * max(rho)` carry no velocity.
pub const DENSITY_GUARD: f64 = 1e-10;

/// `k x a` restricted to the plane.
pub fn k_cross(a: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-a.y, a.x)
}

/// `a x k` restricted to the plane.
pub fn cross_k(a: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(a.y, -a.x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentDecomposition {
    /// `rho grad S / m`
    pub convection: VectorField,
    /// `(hbar / 2m) grad rho x u`
    pub spin: VectorField,
    pub total: VectorField,
}

fn spin_from_gradient(grad_rho: &[Vector2<f64>], params: &PhysParams) -> Vec<Vector2<f64>> {
    let scale = params.hbar() / (2.0 * params.mass()) * params.spin().value();
    grad_rho.iter().map(|g| cross_k(*g) * scale).collect()
}

/// Spin-dependent current `(hbar / 2m) grad rho x u` with `u = spin_sign k`.
pub fn spin_current(rho: &ScalarField, params: &PhysParams) -> Result<VectorField> {
    if let Some((index, &value)) = rho.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeDensity { index, value });
    }
    let spectral = Spectral2D::new(*rho.grid());
    let grad = spectral.gradient_real(rho.values());
    VectorField::new(*rho.grid(), spin_from_gradient(&grad, params))
}

/// Convection current `(hbar / m) Im(psi* grad psi)`, which equals `rho grad S / m`
/// without unwrapping the phase.
pub fn convection_current(psi: &ComplexField, params: &PhysParams) -> Result<VectorField> {
    let spectral = Spectral2D::new(*psi.grid());
    let (dx, dy) = spectral.gradient(psi.values());
    VectorField::new(*psi.grid(), convection_from_gradient(psi.values(), &dx, &dy, params))
}

fn convection_from_gradient(
    psi: &[Complex64],
    dx: &[Complex64],
    dy: &[Complex64],
    params: &PhysParams,
) -> Vec<Vector2<f64>> {
    let scale = params.hbar() / params.mass();
    psi.iter()
        .zip(dx.iter().zip(dy))
        .map(|(p, (gx, gy))| Vector2::new((p.conj() * gx).im, (p.conj() * gy).im) * scale)
        .collect()
}

/// Convection, spin and total currents of `psi`.
///
/// The density gradient entering the spin term is formed by the product rule,
/// `grad rho = 2 Re(psi* grad psi)`, from the same spectral derivative of `psi`
/// used by the convection term. This keeps `J / rho` accurate down to the
/// density guard, where a transform of `rho` itself would be swamped by
/// round-off.
pub fn total_current(psi: &ComplexField, params: &PhysParams) -> Result<CurrentDecomposition> {
    let grid = *psi.grid();
    let spectral = Spectral2D::new(grid);
    let (dx, dy) = spectral.gradient(psi.values());
    let convection = convection_from_gradient(psi.values(), &dx, &dy, params);
    let grad_rho: Vec<Vector2<f64>> = psi
        .values()
        .iter()
        .zip(dx.iter().zip(&dy))
        .map(|(p, (gx, gy))| Vector2::new(2.0 * (p.conj() * gx).re, 2.0 * (p.conj() * gy).re))
        .collect();
    let spin = spin_from_gradient(&grad_rho, params);
    let total = convection.iter().zip(&spin).map(|(a, b)| a + b).collect();
    Ok(CurrentDecomposition {
        convection: VectorField::new(grid, convection)?,
        spin: VectorField::new(grid, spin)?,
        total: VectorField::new(grid, total)?,
    })
}

/// Velocity sampled only where the density clears the guard.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardedVelocity {
    grid: Grid2D,
    values: Vec<Option<Vector2<f64>>>,
}

impl GuardedVelocity {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Option<Vector2<f64>>] {
        &self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> Option<Vector2<f64>> {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn mask(&self) -> Vec<bool> {
        self.values.iter().map(Option::is_some).collect()
    }

    pub fn usable(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Sup-norm distance to `reference` over guarded-in nodes.
    pub fn max_deviation(&self, reference: impl Fn(Vector2<f64>) -> Vector2<f64>) -> f64 {
        self.grid
            .points()
            .zip(&self.values)
            .filter_map(|(x, v)| v.map(|v| (v - reference(x)).norm()))
            .fold(0.0, f64::max)
    }

    /// Guarded-out nodes filled with `fill`, for consumers that need a dense field.
    pub fn to_field(&self, fill: Vector2<f64>) -> Result<VectorField> {
        VectorField::new(self.grid, self.values.iter().map(|v| v.unwrap_or(fill)).collect())
    }
}

/// `J / rho` on nodes with `rho > DENSITY_GUARD * max(rho)`.
pub fn velocity_from_current(current: &VectorField, rho: &ScalarField) -> Result<GuardedVelocity> {
    if current.grid() != rho.grid() {
        return Err(Error::GridMismatch);
    }
    let floor = DENSITY_GUARD * rho.max();
    let values = current
        .values()
        .iter()
        .zip(rho.values())
        .map(|(j, &r)| (r > floor).then(|| j / r))
        .collect();
    Ok(GuardedVelocity {
        grid: *rho.grid(),
        values,
    })
}

/// Picture velocity `J_total / rho` of a sampled wavefunction.
pub fn velocity_from_psi(psi: &ComplexField, params: &PhysParams) -> Result<GuardedVelocity> {
    let currents = total_current(psi, params)?;
    velocity_from_current(&currents.total, &psi.density())
}

/// Closed-form rigid velocity `v(t) + spin_sign omega k x (x - xi(t))`.
pub fn velocity_field(spec: &CoherentStateSpec, x: Vector2<f64>, t: f64) -> Vector2<f64> {
    let c = classical_trajectory(spec, t);
    rigid_velocity(spec, c.xi, c.vel, x)
}

/// Rotation part `spin_sign omega k x (x - xi(t))` of [`velocity_field`].
pub fn rotation_velocity(spec: &CoherentStateSpec, x: Vector2<f64>, t: f64) -> Vector2<f64> {
    rotation_about(spec, classical_trajectory(spec, t).xi, x)
}

fn rotation_about(spec: &CoherentStateSpec, xi: Vector2<f64>, x: Vector2<f64>) -> Vector2<f64> {
    k_cross(x - xi) * (spec.params.omega() * spec.params.spin().value())
}

fn rigid_velocity(spec: &CoherentStateSpec, xi: Vector2<f64>, vel: Vector2<f64>, x: Vector2<f64>) -> Vector2<f64> {
    vel + rotation_about(spec, xi, x)
}

pub fn velocity_field_sampled(spec: &CoherentStateSpec, grid: Grid2D, t: f64) -> Result<VectorField> {
    let c = classical_trajectory(spec, t);
    VectorField::from_fn(grid, |x| rigid_velocity(spec, c.xi, c.vel, x))
}

/// Rigid motion `v(x) = center_velocity + omega_fitted k x x` fitted to a sampled field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyFit {
    /// Half the mean curl.
    pub omega_fitted: f64,
    /// Velocity the fitted motion assigns to the coordinate origin.
    pub center_velocity: Vector2<f64>,
    /// Largest Frobenius norm of the symmetrized velocity gradient.
    pub strain_residual: f64,
    /// Largest `|curl - 2 omega_fitted|`.
    pub curl_residual: f64,
    /// Interior nodes that entered the fit.
    pub nodes: usize,
}

impl RigidBodyFit {
    pub fn velocity_at(&self, x: Vector2<f64>) -> Vector2<f64> {
        self.center_velocity + k_cross(x) * self.omega_fitted
    }
}

/// Fit over all interior nodes using second-order central differences.
pub fn rigid_body_fit(field: &VectorField) -> Result<RigidBodyFit> {
    rigid_body_fit_masked(field, None)
}

/// As [`rigid_body_fit`], restricted to interior nodes whose 5-point stencil lies inside `mask`.
pub fn rigid_body_fit_masked(field: &VectorField, mask: Option<&[bool]>) -> Result<RigidBodyFit> {
    let grid = field.grid();
    let n = grid.n();
    if let Some(m) = mask {
        if m.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: m.len(),
            });
        }
    }
    let ok = |ix: usize, iy: usize| mask.is_none_or(|m| m[grid.index(ix, iy)]);
    let two_h = 2.0 * grid.spacing();

    struct Sample {
        x: Vector2<f64>,
        v: Vector2<f64>,
        curl: f64,
        strain: f64,
    }
    let mut samples = Vec::new();
    for iy in 1..n - 1 {
        for ix in 1..n - 1 {
            if !(ok(ix, iy) && ok(ix - 1, iy) && ok(ix + 1, iy) && ok(ix, iy - 1) && ok(ix, iy + 1)) {
                continue;
            }
            let ddx = (field.at(ix + 1, iy) - field.at(ix - 1, iy)) / two_h;
            let ddy = (field.at(ix, iy + 1) - field.at(ix, iy - 1)) / two_h;
            let shear = 0.5 * (ddy.x + ddx.y);
            let strain = (ddx.x * ddx.x + ddy.y * ddy.y + 2.0 * shear * shear).sqrt();
            samples.push(Sample {
                x: grid.point(ix, iy),
                v: field.at(ix, iy),
                curl: ddx.y - ddy.x,
                strain,
            });
        }
    }
    if samples.len() < 16 {
        return Err(Error::GridTooSmall(samples.len()));
    }

    let count = samples.len() as f64;
    let omega_fitted = samples.iter().map(|s| s.curl).sum::<f64>() / count / 2.0;
    let center_velocity = samples
        .iter()
        .fold(Vector2::zeros(), |acc, s| acc + (s.v - k_cross(s.x) * omega_fitted))
        / count;
    Ok(RigidBodyFit {
        omega_fitted,
        center_velocity,
        strain_residual: samples.iter().map(|s| s.strain).fold(0.0, f64::max),
        curl_residual: samples
            .iter()
            .map(|s| (s.curl - 2.0 * omega_fitted).abs())
            .fold(0.0, f64::max),
        nodes: samples.len(),
    })
}
