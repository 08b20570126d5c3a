//! Grid-quadrature moments of the spread-particle picture.
//!
//! All integrals are trapezoid sums on the periodic grid, which converge
//! spectrally for Gaussian integrands that have decayed at the boundary.
//! Spreads are per Cartesian component.

use nalgebra::Vector2;

use crate::analytic::{classical_trajectory, polar_form};
use crate::currents::velocity_field;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid2D};
use crate::params::{CoherentStateSpec, PhysParams};
use crate::spectral::Spectral2D;

/// Largest tolerated probability mass missing from the grid.
pub const TAIL_MASS_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDecomposition {
    /// `<m v(t)^2 / 2>`
    pub translational: f64,
    /// `<m |v(x,t) - v(t)|^2 / 2>`
    pub rotational: f64,
    /// `<m w^2 xi(t)^2 / 2>`
    pub potential_of_center: f64,
    /// `<m w^2 |x - xi(t)|^2 / 2>`
    pub potential_spread: f64,
}

impl EnergyDecomposition {
    pub fn sum(&self) -> f64 {
        self.translational + self.rotational + self.potential_of_center + self.potential_spread
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta_px: f64,
    pub delta_py: f64,
    /// `(dx dpx, dy dpy) / hbar`
    pub products: [f64; 2],
    pub energy: f64,
    pub energy_decomposition: EnergyDecomposition,
}

/// Density samples of the packet at `t`, after checking the grid holds it.
fn density_on(spec: &CoherentStateSpec, t: f64, grid: &Grid2D) -> Result<Vec<f64>> {
    let center = classical_trajectory(spec, t).xi;
    let reach = 8.0 * spec.params.sigma();
    // the domain is periodic, so the full cell [-L, L) counts
    let l = grid.half_extent();
    let inside = |c: f64| c - reach >= -l && c + reach <= l;
    let rho: Vec<f64> = grid.points().map(|x| polar_form(spec, x, t).rho).collect();
    let mass = rho.iter().sum::<f64>() * grid.cell_area();
    let tail = (1.0 - mass).abs();
    if !(inside(center.x) && inside(center.y)) || tail > TAIL_MASS_LIMIT {
        return Err(Error::InsufficientCoverage(tail));
    }
    Ok(rho)
}

fn average(grid: &Grid2D, rho: &[f64], f: impl Fn(Vector2<f64>) -> f64) -> f64 {
    grid.points().zip(rho).map(|(x, r)| f(x) * r).sum::<f64>() * grid.cell_area()
}

/// `(Delta x, Delta y)` with `(Delta x)^2 = <(x - xi_x(t))^2>`.
pub fn position_spread(spec: &CoherentStateSpec, t: f64, grid: &Grid2D) -> Result<(f64, f64)> {
    let rho = density_on(spec, t, grid)?;
    let xi = classical_trajectory(spec, t).xi;
    let vx = average(grid, &rho, |x| (x.x - xi.x).powi(2));
    let vy = average(grid, &rho, |x| (x.y - xi.y).powi(2));
    Ok((vx.sqrt(), vy.sqrt()))
}

/// `(Delta p_x, Delta p_y)` from the picture velocity: `<(m v(x,t) - m v(t))^2>` per component.
pub fn momentum_spread_picture(spec: &CoherentStateSpec, t: f64, grid: &Grid2D) -> Result<(f64, f64)> {
    let rho = density_on(spec, t, grid)?;
    let m = spec.params.mass();
    let vel = classical_trajectory(spec, t).vel;
    let dev = |x: Vector2<f64>| (velocity_field(spec, x, t) - vel) * m;
    let px = average(grid, &rho, |x| dev(x).x.powi(2));
    let py = average(grid, &rho, |x| dev(x).y.powi(2));
    Ok((px.sqrt(), py.sqrt()))
}

/// Operator spreads `<(p - <p>)^2>^(1/2)` per component, from the Fourier
/// transform of a sampled wavefunction.
pub fn momentum_spread_operator(psi: &ComplexField, params: &PhysParams) -> (f64, f64) {
    let grid = *psi.grid();
    let spectral = Spectral2D::new(grid);
    let mut hat = psi.values().to_vec();
    spectral.forward(&mut hat);
    let n = grid.n();
    let ks = spectral.wavenumbers();
    let (mut w, mut kx, mut ky, mut kx2, mut ky2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for iy in 0..n {
        for ix in 0..n {
            let p = hat[iy * n + ix].norm_sqr();
            w += p;
            kx += ks[ix] * p;
            ky += ks[iy] * p;
            kx2 += ks[ix] * ks[ix] * p;
            ky2 += ks[iy] * ks[iy] * p;
        }
    }
    let (kx, ky) = (kx / w, ky / w);
    let hbar = params.hbar();
    (hbar * (kx2 / w - kx * kx).sqrt(), hbar * (ky2 / w - ky * ky).sqrt())
}

/// Picture energy `<m v(x,t)^2 / 2 + m w^2 x^2 / 2>` and its four parts.
pub fn energy_expectation_picture(
    spec: &CoherentStateSpec,
    t: f64,
    grid: &Grid2D,
) -> Result<(f64, EnergyDecomposition)> {
    let rho = density_on(spec, t, grid)?;
    let p = &spec.params;
    let (m, w2) = (p.mass(), p.omega() * p.omega());
    let c = classical_trajectory(spec, t);
    let energy = average(grid, &rho, |x| {
        0.5 * m * velocity_field(spec, x, t).norm_squared() + 0.5 * m * w2 * x.norm_squared()
    });
    let parts = EnergyDecomposition {
        translational: average(grid, &rho, |_| 0.5 * m * c.vel.norm_squared()),
        rotational: average(grid, &rho, |x| {
            0.5 * m * (velocity_field(spec, x, t) - c.vel).norm_squared()
        }),
        potential_of_center: average(grid, &rho, |_| 0.5 * m * w2 * c.xi.norm_squared()),
        potential_spread: average(grid, &rho, |x| 0.5 * m * w2 * (x - c.xi).norm_squared()),
    };
    Ok((energy, parts))
}

pub fn moment_report(spec: &CoherentStateSpec, t: f64, grid: &Grid2D) -> Result<MomentReport> {
    let (delta_x, delta_y) = position_spread(spec, t, grid)?;
    let (delta_px, delta_py) = momentum_spread_picture(spec, t, grid)?;
    let (energy, energy_decomposition) = energy_expectation_picture(spec, t, grid)?;
    let hbar = spec.params.hbar();
    Ok(MomentReport {
        delta_x,
        delta_y,
        delta_px,
        delta_py,
        products: [delta_x * delta_px / hbar, delta_y * delta_py / hbar],
        energy,
        energy_decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SpinSign;

    #[test]
    fn ground_state_moments() {
        let spec = CoherentStateSpec::ground(PhysParams::natural());
        let grid = Grid2D::for_spec(&spec, 128).unwrap();
        let r = moment_report(&spec, 0.0, &grid).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.delta_x - s).abs() < 1e-10 && (r.delta_y - s).abs() < 1e-10);
        assert!((r.delta_px - s).abs() < 1e-10 && (r.delta_py - s).abs() < 1e-10);
        assert!((r.energy - 1.0).abs() < 1e-10);
        let d = r.energy_decomposition;
        assert!(d.translational == 0.0 && d.potential_of_center == 0.0);
        assert!((d.rotational - 0.5).abs() < 1e-10 && (d.potential_spread - 0.5).abs() < 1e-10);
    }

    #[test]
    fn stiffer_trap_narrows_packet() {
        let p = PhysParams::new(1.0, 1.0, 2.0, SpinSign::Up).unwrap();
        let spec = CoherentStateSpec::ground(p);
        let grid = Grid2D::for_spec(&spec, 128).unwrap();
        let (dx, dy) = position_spread(&spec, 0.3, &grid).unwrap();
        assert!((dx - 0.5).abs() < 1e-10 && (dy - 0.5).abs() < 1e-10);
    }

    #[test]
    fn small_grid_is_rejected() {
        let spec = CoherentStateSpec::ground(PhysParams::natural());
        let grid = Grid2D::new(3.0, 64).unwrap();
        assert!(matches!(
            position_spread(&spec, 0.0, &grid),
            Err(Error::InsufficientCoverage(_))
        ));
        // wide enough box but too coarse to resolve the packet
        let coarse = Grid2D::new(40.0, 8).unwrap();
        assert!(matches!(
            momentum_spread_picture(&spec, 0.0, &coarse),
            Err(Error::InsufficientCoverage(_))
        ));
    }
}
