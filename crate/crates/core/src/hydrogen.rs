//! Hydrogen 1s ground state as a spread particle.
//!
//! Density `rho(r) = exp(-2r/a0) / (pi a0^3)`; each point rotates about the
//! spin axis with speed `alpha c sin(theta)`. Spreads use the vector norm,
//! `(Delta r)^2 = <|r|^2> - |<r>|^2`, which is the reading that yields
//! `Delta r Delta p = sqrt(2) hbar`.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate_adaptive};

/// Radial cutoff of the quadrature, in Bohr radii.
pub const RADIAL_CUTOFF: f64 = 40.0;
/// Gauss–Legendre nodes of the polar rule.
pub const POLAR_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenParams {
    hbar: f64,
    mass: f64,
    alpha: f64,
    c: f64,
    a0: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and positive, got {value}"),
        })
    }
}

impl HydrogenParams {
    /// Bohr radius derived as `a0 = hbar / (m alpha c)`.
    pub fn new(hbar: f64, mass: f64, alpha: f64, c: f64) -> Result<Self> {
        let (hbar, mass, alpha, c) = (
            positive("hbar", hbar)?,
            positive("mass", mass)?,
            positive("alpha", alpha)?,
            positive("c", c)?,
        );
        Ok(HydrogenParams {
            hbar,
            mass,
            alpha,
            c,
            a0: positive("a0", hbar / (mass * alpha * c))?,
        })
    }

    /// Atomic units: `hbar = m = 1`, `c = 1/alpha = 137.035999084`.
    pub fn atomic() -> Self {
        let c = 137.035_999_084;
        Self::new(1.0, 1.0, 1.0 / c, c).expect("atomic units are valid")
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Rotation speed at the equator, `alpha c`.
    pub fn equator_speed(&self) -> f64 {
        self.alpha * self.c
    }
}

pub fn hydrogen_density(p: &HydrogenParams, r: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::NegativeRadius(r));
    }
    Ok((-2.0 * r / p.a0).exp() / (PI * p.a0.powi(3)))
}

/// Azimuthal speed `alpha c sin(theta)`, independent of `r` and `phi`.
pub fn hydrogen_velocity(p: &HydrogenParams, r: f64, theta: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::NegativeRadius(r));
    }
    if r == 0.0 {
        return Err(Error::AtOrigin);
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("polar angle must lie in [0, pi], got {theta}"),
        });
    }
    Ok(p.equator_speed() * theta.sin())
}

/// Cartesian velocity `alpha c k x r / |r|`.
pub fn hydrogen_velocity_vector(p: &HydrogenParams, x: Vector3<f64>) -> Result<Vector3<f64>> {
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::AtOrigin);
    }
    Ok(Vector3::z().cross(&x) * (p.equator_speed() / r))
}

/// Current `rho alpha c sin(theta) u_phi`, returned as its azimuthal component.
pub fn dirac_current_1s(p: &HydrogenParams, r: f64, theta: f64) -> Result<f64> {
    Ok(hydrogen_density(p, r)? * p.equator_speed() * theta.sin())
}

/// `<f(r, theta)>` over the 1s density, by adaptive radial Gauss–Kronrod on
/// `[0, 40 a0]` times a 64-node Gauss–Legendre rule in `cos(theta)`.
pub fn spherical_average(p: &HydrogenParams, f: impl Fn(f64, f64) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(POLAR_NODES);
    let thetas: Vec<f64> = nodes.iter().map(|u| u.acos()).collect();
    let shell = |r: f64| 2.0 * PI * r * r * (-2.0 * r / p.a0).exp() / (PI * p.a0.powi(3));
    let radial = |r: f64| shell(r) * thetas.iter().zip(&weights).map(|(&th, w)| w * f(r, th)).sum::<f64>();
    // tolerance relative to <|f|>, which stays meaningful when f cancels over the sphere
    let magnitude = |r: f64| {
        shell(r)
            * thetas
                .iter()
                .zip(&weights)
                .map(|(&th, w)| w * f(r, th).abs())
                .sum::<f64>()
    };
    let upper = RADIAL_CUTOFF * p.a0;
    let scale = integrate_adaptive(magnitude, 0.0, upper, f64::INFINITY);
    integrate_adaptive(radial, 0.0, upper, 1e-15 * scale.max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenUncertainties {
    pub delta_r: f64,
    pub delta_p: f64,
    pub product_over_hbar: f64,
    pub mean_r2: f64,
    pub mean_sin2: f64,
    /// `|<r>|`, zero by symmetry.
    pub mean_position: f64,
}

pub fn hydrogen_uncertainties(p: &HydrogenParams) -> HydrogenUncertainties {
    let mean_r2 = spherical_average(p, |r, _| r * r);
    let mean_sin2 = spherical_average(p, |_, th| th.sin().powi(2));
    // <x> and <y> vanish under the azimuthal integral; <z> is checked by quadrature
    let mean_position = spherical_average(p, |r, th| r * th.cos()).abs();
    let delta_r = (mean_r2 - mean_position * mean_position).sqrt();
    // <m v> vanishes: v is azimuthal and averages to zero over phi
    let delta_p = p.mass * p.equator_speed() * mean_sin2.sqrt();
    HydrogenUncertainties {
        delta_r,
        delta_p,
        product_over_hbar: delta_r * delta_p / p.hbar,
        mean_r2,
        mean_sin2,
        mean_position,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenEnergy {
    /// `<m |v|^2 / 2>`
    pub picture_energy: f64,
    /// `-m alpha^2 c^2 / 2`
    pub quantum_energy: f64,
    pub mismatch: bool,
}

pub fn hydrogen_energy_picture(p: &HydrogenParams) -> HydrogenEnergy {
    let v2 = p.equator_speed().powi(2);
    let picture_energy = spherical_average(p, |_, th| 0.5 * p.mass * v2 * th.sin().powi(2));
    let quantum_energy = -0.5 * p.mass * v2;
    let scale = picture_energy.abs().max(quantum_energy.abs());
    HydrogenEnergy {
        picture_energy,
        quantum_energy,
        mismatch: (picture_energy - quantum_energy).abs() > 1e-9 * scale,
    }
}

/// RK4 tracer of `dx/dt = alpha c k x r / |r|` with `steps` equal steps over `[0, t1]`.
pub fn integrate_hydrogen_tracer(
    p: &HydrogenParams,
    x0: Vector3<f64>,
    t1: f64,
    steps: usize,
) -> Result<Vec<Vector3<f64>>> {
    positive("t1", t1)?;
    let h = t1 / steps.max(1) as f64;
    let mut x = x0;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x);
    for _ in 0..steps.max(1) {
        let k1 = hydrogen_velocity_vector(p, x)?;
        let k2 = hydrogen_velocity_vector(p, x + k1 * (h / 2.0))?;
        let k3 = hydrogen_velocity_vector(p, x + k2 * (h / 2.0))?;
        let k4 = hydrogen_velocity_vector(p, x + k3 * h)?;
        x += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        out.push(x);
    }
    Ok(out)
}
