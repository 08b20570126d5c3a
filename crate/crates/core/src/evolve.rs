//! Strang split-step spectral propagation in the harmonic trap.
//!
//! One step applies `exp(-i V dt / 2 hbar)` in position space, the free
//! propagator `exp(-i hbar |k|^2 dt / 2m)` in Fourier space, then the second
//! potential half step. The potential is evaluated on every node, corners
//! included; there is no absorbing layer.

use num_complex::Complex64;

use crate::currents::{convection_current, spin_current};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid2D};
use crate::params::PhysParams;
use crate::spectral::Spectral2D;

/// Tolerance on the grid norm of an initial state.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub grid: Grid2D,
    pub dt: f64,
    pub steps: usize,
    pub params: PhysParams,
}

impl EvolveConfig {
    pub fn new(grid: Grid2D, dt: f64, steps: usize, params: PhysParams) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be finite and positive, got {dt}"),
            });
        }
        Ok(EvolveConfig {
            grid,
            dt,
            steps,
            params,
        })
    }

    /// Step count that covers `duration` with steps of about `dt`; `dt` is
    /// shrunk so the run ends exactly at `duration`.
    pub fn covering(grid: Grid2D, dt: f64, duration: f64, params: PhysParams) -> Result<Self> {
        let cfg = Self::new(grid, dt, 0, params)?;
        let steps = (duration / cfg.dt).round().max(1.0) as usize;
        Self::new(grid, duration / steps as f64, steps, params)
    }

    /// `dt omega <= 0.01`.
    pub fn is_acceptance_grade(&self) -> bool {
        self.dt * self.params.omega() <= 0.01
    }

    pub fn duration(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

/// Owns the evolving wavefunction; callers observe it through snapshots.
#[derive(Debug)]
pub struct SplitStepper {
    spectral: Spectral2D,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    psi: Vec<Complex64>,
    dt: f64,
    steps_taken: usize,
}

impl SplitStepper {
    pub fn new(psi0: &ComplexField, cfg: &EvolveConfig) -> Result<Self> {
        if *psi0.grid() != cfg.grid {
            return Err(Error::GridMismatch);
        }
        let norm = psi0.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        let grid = cfg.grid;
        let p = cfg.params;
        let spectral = Spectral2D::new(grid);
        let half_potential = grid
            .points()
            .map(|x| Complex64::from_polar(1.0, -p.potential(x) * cfg.dt / (2.0 * p.hbar())))
            .collect();
        let n = grid.n();
        let ks = spectral.wavenumbers();
        let mut kinetic = Vec::with_capacity(grid.len());
        for iy in 0..n {
            for ix in 0..n {
                let k2 = ks[ix] * ks[ix] + ks[iy] * ks[iy];
                kinetic.push(Complex64::from_polar(1.0, -p.hbar() * k2 * cfg.dt / (2.0 * p.mass())));
            }
        }
        Ok(SplitStepper {
            spectral,
            half_potential,
            kinetic,
            psi: psi0.values().to_vec(),
            dt: cfg.dt,
            steps_taken: 0,
        })
    }

    pub fn step(&mut self) {
        for (v, u) in self.psi.iter_mut().zip(&self.half_potential) {
            *v *= u;
        }
        self.spectral.forward(&mut self.psi);
        for (v, u) in self.psi.iter_mut().zip(&self.kinetic) {
            *v *= u;
        }
        self.spectral.inverse(&mut self.psi);
        for (v, u) in self.psi.iter_mut().zip(&self.half_potential) {
            *v *= u;
        }
        self.steps_taken += 1;
    }

    pub fn advance(&mut self, steps: usize) {
        for _ in 0..steps {
            self.step();
        }
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Elapsed time `steps_taken * dt`.
    pub fn time(&self) -> f64 {
        self.steps_taken as f64 * self.dt
    }

    pub fn snapshot(&self) -> ComplexField {
        ComplexField::new(*self.spectral.grid(), self.psi.clone())
            .expect("split-step phases are unimodular, samples stay finite")
    }
}

/// Propagate `psi0` by `cfg.steps` Strang steps.
pub fn split_step_evolve(psi0: &ComplexField, cfg: &EvolveConfig) -> Result<ComplexField> {
    let mut stepper = SplitStepper::new(psi0, cfg)?;
    if cfg.steps == 0 {
        return Ok(psi0.clone());
    }
    stepper.advance(cfg.steps);
    Ok(stepper.snapshot())
}

/// `<psi|H|psi>` with the kinetic term from Parseval and the potential by grid quadrature.
pub fn energy_expectation(psi: &ComplexField, params: &PhysParams) -> f64 {
    let grid = *psi.grid();
    let spectral = Spectral2D::new(grid);
    let mut hat = psi.values().to_vec();
    spectral.forward(&mut hat);
    let n = grid.n();
    let ks = spectral.wavenumbers();
    let mut kinetic = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let k2 = ks[ix] * ks[ix] + ks[iy] * ks[iy];
            kinetic += k2 * hat[iy * n + ix].norm_sqr();
        }
    }
    kinetic *= params.hbar() * params.hbar() / (2.0 * params.mass()) * grid.cell_area() / grid.len() as f64;
    let potential: f64 = grid
        .points()
        .zip(psi.values())
        .map(|(x, v)| params.potential(x) * v.norm_sqr())
        .sum::<f64>()
        * grid.cell_area();
    kinetic + potential
}

/// Sup norm of `d rho/dt + div J` at the middle snapshot.
///
/// `d rho/dt` is a central difference over `[t - dt, t + dt]`; `J` is the
/// convection current, plus the spin current when `use_spin_current` is set.
pub fn continuity_residual(
    snapshots: [&ComplexField; 3],
    dt: f64,
    params: &PhysParams,
    use_spin_current: bool,
) -> Result<f64> {
    let [before, now, after] = snapshots;
    if before.grid() != now.grid() || after.grid() != now.grid() {
        return Err(Error::GridMismatch);
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be finite and positive, got {dt}"),
        });
    }
    let grid = *now.grid();
    let spectral = Spectral2D::new(grid);
    let rho = now.density();
    let mut current = convection_current(now, params)?.values().to_vec();
    if use_spin_current {
        let spin = spin_current(&rho, params)?;
        for (j, s) in current.iter_mut().zip(spin.values()) {
            *j += s;
        }
    }
    let div = spectral.divergence(&current);
    Ok(before
        .values()
        .iter()
        .zip(after.values())
        .zip(&div)
        .map(|((b, a), d)| ((a.norm_sqr() - b.norm_sqr()) / (2.0 * dt) + d).abs())
        .fold(0.0, f64::max))
}
