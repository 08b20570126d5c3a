//! Closed-form coherent state of the 2D isotropic oscillator.
//!
//! The packet is a Gaussian of fixed width `sigma` whose center `xi(t)` and
//! phase gradient `m v(t) / hbar` follow the classical orbit:
//!
//! ```text
//! xi(t) = xi0 cos(wt) + (v0/w) sin(wt)
//! v(t)  = v0 cos(wt) - xi0 w sin(wt)
//! psi   = (2 pi sigma^2)^(-1/2) exp(-|x - xi|^2 / (4 sigma^2)) exp(i (m v.x - g(t)) / hbar)
//! ```
//!
//! with `g(t) = int_0^t (hbar w + m v^2/2 - m w^2 xi^2 / 2) ds`.

use std::f64::consts::PI;

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{ComplexField, Grid2D};
use crate::params::CoherentStateSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub t: f64,
    pub xi: Vector2<f64>,
    pub vel: Vector2<f64>,
}

impl ClassicalState {
    /// `m v^2 / 2 + m w^2 xi^2 / 2`.
    pub fn energy(&self, spec: &CoherentStateSpec) -> f64 {
        let p = &spec.params;
        0.5 * p.mass() * (self.vel.norm_squared() + p.omega() * p.omega() * self.xi.norm_squared())
    }
}

/// Density, phase gradient and phase of `psi = sqrt(rho) exp(i S / hbar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarForm {
    pub rho: f64,
    /// `grad S / m`; uniform in space and equal to `v(t)`.
    pub grad_s_over_m: Vector2<f64>,
    /// `S` reduced to `[0, 2 pi hbar)`.
    pub s_phase: f64,
}

pub fn classical_trajectory(spec: &CoherentStateSpec, t: f64) -> ClassicalState {
    let w = spec.params.omega();
    let (s, c) = (w * t).sin_cos();
    let xi0 = spec.xi0();
    let v0 = spec.v0();
    ClassicalState {
        t,
        xi: xi0 * c + (v0 / w) * s,
        vel: v0 * c - xi0 * (w * s),
    }
}

/// Exact antiderivative of the phase integrand.
///
/// `v^2 - w^2 xi^2 = (v0^2 - w^2 xi0^2) cos 2wt - 2w (v0.xi0) sin 2wt`, so
/// `g(t) = hbar w t + m (v0^2 - w^2 xi0^2) sin(2wt) / (4w) - m (v0.xi0) sin^2(wt)`.
pub fn phase_integral(spec: &CoherentStateSpec, t: f64) -> f64 {
    let p = &spec.params;
    let (m, w) = (p.mass(), p.omega());
    let xi0 = spec.xi0();
    let v0 = spec.v0();
    let contrast = v0.norm_squared() - w * w * xi0.norm_squared();
    let s = (w * t).sin();
    p.hbar() * w * t + m * contrast * (2.0 * w * t).sin() / (4.0 * w) - m * v0.dot(&xi0) * s * s
}

/// Time derivative of [`phase_integral`]: `hbar w + m v(t)^2/2 - m w^2 xi(t)^2/2`.
pub fn phase_rate(spec: &CoherentStateSpec, t: f64) -> f64 {
    let p = &spec.params;
    let c = classical_trajectory(spec, t);
    p.hbar() * p.omega() + 0.5 * p.mass() * c.vel.norm_squared()
        - 0.5 * p.mass() * p.omega() * p.omega() * c.xi.norm_squared()
}

fn packet(
    spec: &CoherentStateSpec,
    center: Vector2<f64>,
    vel: Vector2<f64>,
    phase_offset: f64,
    x: Vector2<f64>,
) -> Complex64 {
    let p = &spec.params;
    let sigma2 = p.sigma() * p.sigma();
    let amplitude = (2.0 * PI * sigma2).sqrt().recip();
    let d2 = (x - center).norm_squared();
    let exponent = Complex64::new(-d2 / (4.0 * sigma2), (p.mass() * vel.dot(&x) - phase_offset) / p.hbar());
    amplitude * exponent.exp()
}

/// Initial wavefunction `(2 pi sigma^2)^(-1/2) exp(-|x - xi0|^2 / 4 sigma^2 + i m v0.x / hbar)`.
pub fn initial_wavefunction(spec: &CoherentStateSpec, x: Vector2<f64>) -> Complex64 {
    packet(spec, spec.xi0(), spec.v0(), 0.0, x)
}

pub fn coherent_state(spec: &CoherentStateSpec, x: Vector2<f64>, t: f64) -> Complex64 {
    let c = classical_trajectory(spec, t);
    packet(spec, c.xi, c.vel, phase_integral(spec, t), x)
}

/// Sample [`coherent_state`] on every grid node.
pub fn coherent_state_field(spec: &CoherentStateSpec, grid: Grid2D, t: f64) -> Result<ComplexField> {
    let c = classical_trajectory(spec, t);
    let g = phase_integral(spec, t);
    ComplexField::from_fn(grid, |x| packet(spec, c.xi, c.vel, g, x))
}

pub fn polar_form(spec: &CoherentStateSpec, x: Vector2<f64>, t: f64) -> PolarForm {
    let p = &spec.params;
    let c = classical_trajectory(spec, t);
    let sigma2 = p.sigma() * p.sigma();
    let rho = (-(x - c.xi).norm_squared() / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2);
    let s = p.mass() * c.vel.dot(&x) - phase_integral(spec, t);
    PolarForm {
        rho,
        grad_s_over_m: c.vel,
        s_phase: s.rem_euclid(2.0 * PI * p.hbar()),
    }
}

/// Local energy `E(x, t) = i hbar (d psi / dt) / psi`.
///
/// Equals `g'(t) - m (dv/dt).x + i hbar (x - xi(t)).v(t) / (2 sigma^2)`; on
/// the trajectory the imaginary part vanishes and the real part is the
/// conserved value `hbar w + m v0^2/2 + m w^2 xi0^2/2`.
pub fn energy_field(spec: &CoherentStateSpec, x: Vector2<f64>, t: f64) -> Complex64 {
    let p = &spec.params;
    let c = classical_trajectory(spec, t);
    let accel = -c.xi * (p.omega() * p.omega());
    let sigma2 = p.sigma() * p.sigma();
    Complex64::new(
        phase_rate(spec, t) - p.mass() * accel.dot(&x),
        p.hbar() * (x - c.xi).dot(&c.vel) / (2.0 * sigma2),
    )
}

/// `hbar w + m v0^2 / 2 + m w^2 xi0^2 / 2`.
pub fn trajectory_energy(spec: &CoherentStateSpec) -> f64 {
    let p = &spec.params;
    p.hbar() * p.omega() + classical_trajectory(spec, 0.0).energy(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PhysParams;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn orbit() -> CoherentStateSpec {
        CoherentStateSpec::new(PhysParams::natural(), Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)).unwrap()
    }

    #[test]
    fn trajectory_quarter_period() {
        let s = classical_trajectory(&orbit(), 0.0);
        assert_eq!(s.xi, Vector2::new(1.0, 0.0));
        assert_eq!(s.vel, Vector2::new(0.0, 1.0));
        let s = classical_trajectory(&orbit(), FRAC_PI_2);
        assert!((s.xi - Vector2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((s.vel - Vector2::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_integral_limits() {
        let ground = CoherentStateSpec::ground(PhysParams::natural());
        assert_eq!(phase_integral(&ground, 2.5), 2.5);
        assert_eq!(phase_integral(&orbit(), 0.0), 0.0);
    }

    #[test]
    fn peak_density() {
        let spec = orbit();
        for t in [0.0, 0.4, 3.0] {
            let xi = classical_trajectory(&spec, t).xi;
            assert!((coherent_state(&spec, xi, t).norm_sqr() - 1.0 / PI).abs() < 1e-15);
            assert!((polar_form(&spec, xi, t).rho - 1.0 / PI).abs() < 1e-15);
        }
        let ground = CoherentStateSpec::ground(PhysParams::natural());
        let rho = coherent_state(&ground, Vector2::new(1.0, 0.0), 0.0).norm_sqr();
        assert!((rho - (-1.0f64).exp() / PI).abs() < 1e-15);
        assert!((rho - 0.117_099_663_0).abs() < 1e-10);
    }

    #[test]
    fn initial_state_is_bit_identical() {
        let spec =
            CoherentStateSpec::new(PhysParams::natural(), Vector2::new(0.3, -1.2), Vector2::new(0.7, 0.2)).unwrap();
        for x in [Vector2::new(0.0, 0.0), Vector2::new(1.3, -2.1), Vector2::new(-4.0, 0.5)] {
            let a = coherent_state(&spec, x, 0.0);
            let b = initial_wavefunction(&spec, x);
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn ground_state_energy_is_uniform() {
        let ground = CoherentStateSpec::ground(PhysParams::natural());
        for x in [Vector2::new(0.0, 0.0), Vector2::new(2.0, -1.0)] {
            let e = energy_field(&ground, x, 1.3);
            assert_eq!(e, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn energy_on_trajectory_is_constant() {
        let spec = orbit();
        assert_eq!(trajectory_energy(&spec), 2.0);
        for t in [0.0, 0.3, 1.0, 2.2, 5.9] {
            let xi = classical_trajectory(&spec, t).xi;
            let e = energy_field(&spec, xi, t);
            assert!((e.re - 2.0).abs() < 1e-12 * 2.0);
            assert!(e.im.abs() <= 1e-14);
        }
    }

    #[test]
    fn polar_form_of_ground_state_has_no_flow() {
        let ground = CoherentStateSpec::ground(PhysParams::natural());
        let pf = polar_form(&ground, Vector2::new(0.4, 1.0), 2.0);
        assert_eq!(pf.grad_s_over_m, Vector2::zeros());
        assert!(pf.s_phase >= 0.0 && pf.s_phase < 2.0 * PI);
    }
}
