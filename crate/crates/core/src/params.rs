//! Physical constants and the data that fixes a coherent state.

use nalgebra::Vector2;

use crate::error::{Error, Result};

/// Orientation of the spin vector `u = ±k` along the out-of-plane axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinSign {
    Up,
    Down,
}

impl SpinSign {
    pub fn from_int(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(SpinSign::Up),
            -1 => Ok(SpinSign::Down),
            other => Err(Error::InvalidParameter {
                name: "spin_sign",
                reason: format!("must be +1 or -1, got {other}"),
            }),
        }
    }

    pub fn as_int(self) -> i32 {
        match self {
            SpinSign::Up => 1,
            SpinSign::Down => -1,
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.as_int())
    }

    pub fn flipped(self) -> Self {
        match self {
            SpinSign::Up => SpinSign::Down,
            SpinSign::Down => SpinSign::Up,
        }
    }
}

/// Unit system of a run: `hbar`, `mass`, `omega` and the spin orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    hbar: f64,
    mass: f64,
    omega: f64,
    spin: SpinSign,
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

impl PhysParams {
    pub fn new(hbar: f64, mass: f64, omega: f64, spin: SpinSign) -> Result<Self> {
        let params = PhysParams {
            hbar: positive("hbar", hbar)?,
            mass: positive("mass", mass)?,
            omega: positive("omega", omega)?,
            spin,
        };
        positive("sigma", params.sigma())?;
        Ok(params)
    }

    /// `hbar = mass = omega = 1`, spin up.
    pub fn natural() -> Self {
        PhysParams {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            spin: SpinSign::Up,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn spin(&self) -> SpinSign {
        self.spin
    }

    pub fn with_spin(self, spin: SpinSign) -> Self {
        PhysParams { spin, ..self }
    }

    /// Packet width `sqrt(hbar / (2 m omega))`.
    pub fn sigma(&self) -> f64 {
        (self.hbar / (2.0 * self.mass * self.omega)).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    /// Harmonic potential `m omega^2 (x^2 + y^2) / 2`.
    pub fn potential(&self, x: Vector2<f64>) -> f64 {
        0.5 * self.mass * self.omega * self.omega * x.norm_squared()
    }
}

/// Free function form of [`PhysParams::sigma`].
pub fn sigma(params: &PhysParams) -> f64 {
    params.sigma()
}

/// Initial displacement and velocity of the packet. Both are independent of `hbar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentStateSpec {
    pub params: PhysParams,
    xi0: Vector2<f64>,
    v0: Vector2<f64>,
}

impl CoherentStateSpec {
    pub fn new(params: PhysParams, xi0: Vector2<f64>, v0: Vector2<f64>) -> Result<Self> {
        if !xi0.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "xi0",
                reason: format!("must be finite, got ({}, {})", xi0.x, xi0.y),
            });
        }
        if !v0.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "v0",
                reason: format!("must be finite, got ({}, {})", v0.x, v0.y),
            });
        }
        Ok(CoherentStateSpec { params, xi0, v0 })
    }

    /// Ground state: packet at rest at the origin.
    pub fn ground(params: PhysParams) -> Self {
        CoherentStateSpec {
            params,
            xi0: Vector2::zeros(),
            v0: Vector2::zeros(),
        }
    }

    pub fn xi0(&self) -> Vector2<f64> {
        self.xi0
    }

    pub fn v0(&self) -> Vector2<f64> {
        self.v0
    }

    pub fn with_spin(self, spin: SpinSign) -> Self {
        CoherentStateSpec {
            params: self.params.with_spin(spin),
            ..self
        }
    }

    /// Upper bound on the orbit radius, `|xi0| + |v0| / omega`.
    pub fn orbit_bound(&self) -> f64 {
        self.xi0.norm() + self.v0.norm() / self.params.omega()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_values() {
        let p = PhysParams::natural();
        assert_eq!(sigma(&p), std::f64::consts::FRAC_1_SQRT_2);
        let p = PhysParams::new(1.0, 1.0, 2.0, SpinSign::Up).unwrap();
        assert_eq!(p.sigma(), 0.5);
        let p = PhysParams::new(2.0, 1.0, 1.0, SpinSign::Up).unwrap();
        assert_eq!(p.sigma(), 1.0);
    }

    #[test]
    fn rejects_non_positive_constants() {
        assert!(PhysParams::new(0.0, 1.0, 1.0, SpinSign::Up).is_err());
        assert!(PhysParams::new(1.0, -1.0, 1.0, SpinSign::Up).is_err());
        assert!(PhysParams::new(1.0, 1.0, f64::NAN, SpinSign::Up).is_err());
        // sigma overflows to infinity
        assert!(PhysParams::new(f64::MAX, f64::MIN_POSITIVE, 1e-300, SpinSign::Up).is_err());
    }

    #[test]
    fn spin_sign_from_int() {
        assert_eq!(SpinSign::from_int(1).unwrap(), SpinSign::Up);
        assert_eq!(SpinSign::from_int(-1).unwrap(), SpinSign::Down);
        assert!(SpinSign::from_int(0).is_err());
        assert_eq!(SpinSign::Up.flipped().value(), -1.0);
    }

    #[test]
    fn spec_rejects_non_finite() {
        let p = PhysParams::natural();
        assert!(CoherentStateSpec::new(p, Vector2::new(f64::INFINITY, 0.0), Vector2::zeros()).is_err());
        assert!(CoherentStateSpec::new(p, Vector2::zeros(), Vector2::new(0.0, f64::NAN)).is_err());
    }
}
