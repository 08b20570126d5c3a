//! Tracers advected by the picture velocity field.
//!
//! In the frame co-moving with the packet center the field is a rigid
//! rotation at rate `spin_sign * omega`, so every tracer circles `xi(t)` at a
//! fixed radius.

use nalgebra::{Rotation2, Vector2};

use crate::analytic::classical_trajectory;
use crate::currents::{velocity_field, GuardedVelocity};
use crate::error::{Error, Result};
use crate::params::CoherentStateSpec;

/// Radius below which a tracer is considered to sit on the center line.
pub const CENTER_LINE_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TracerPath {
    pub spec: CoherentStateSpec,
    pub times: Vec<f64>,
    pub positions: Vec<Vector2<f64>>,
}

impl TracerPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Offsets `x(t) - xi(t)` from the packet center.
    pub fn comoving_offsets(&self) -> Vec<Vector2<f64>> {
        self.times
            .iter()
            .zip(&self.positions)
            .map(|(&t, x)| x - classical_trajectory(&self.spec, t).xi)
            .collect()
    }

    /// Co-moving angle, unwrapped by accumulating per-sample increments.
    pub fn comoving_angles(&self) -> Vec<f64> {
        let offsets = self.comoving_offsets();
        let mut angles = Vec::with_capacity(offsets.len());
        let mut previous: Option<(f64, f64)> = None;
        for d in offsets {
            let raw = d.y.atan2(d.x);
            let unwrapped = match previous {
                None => raw,
                Some((prev_raw, prev)) => {
                    let delta = (raw - prev_raw + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                        - std::f64::consts::PI;
                    prev + delta
                }
            };
            previous = Some((raw, unwrapped));
            angles.push(unwrapped);
        }
        angles
    }
}

fn check_span(t0: f64, t1: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be finite and positive, got {dt}"),
        });
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidParameter {
            name: "t1",
            reason: format!("must exceed t0 = {t0}, got {t1}"),
        });
    }
    Ok(((t1 - t0) / dt).round().max(1.0) as usize)
}

/// Classical RK4 integration of `dx/dt = velocity(x, t)` from `t0` to `t1`.
///
/// The step is adjusted to `(t1 - t0) / round((t1 - t0) / dt)` so the path
/// ends exactly at `t1`; every step is recorded, giving `steps + 1` samples.
pub fn integrate_path(
    spec: &CoherentStateSpec,
    x0: Vector2<f64>,
    t0: f64,
    t1: f64,
    dt: f64,
    velocity: impl Fn(Vector2<f64>, f64) -> Option<Vector2<f64>>,
) -> Result<TracerPath> {
    let steps = check_span(t0, t1, dt)?;
    let h = (t1 - t0) / steps as f64;
    let eval = |x: Vector2<f64>, t: f64| velocity(x, t).ok_or(Error::UnresolvedVelocity { t, x: x.x, y: x.y });
    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    let mut x = x0;
    times.push(t0);
    positions.push(x);
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let k1 = eval(x, t)?;
        let k2 = eval(x + k1 * (h / 2.0), t + h / 2.0)?;
        let k3 = eval(x + k2 * (h / 2.0), t + h / 2.0)?;
        let k4 = eval(x + k3 * h, t + h)?;
        x += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        times.push(t0 + (k + 1) as f64 * h);
        positions.push(x);
    }
    Ok(TracerPath {
        spec: *spec,
        times,
        positions,
    })
}

/// Tracer in the closed-form rigid velocity field.
pub fn integrate_tracer(spec: &CoherentStateSpec, x0: Vector2<f64>, t0: f64, t1: f64, dt: f64) -> Result<TracerPath> {
    integrate_path(spec, x0, t0, t1, dt, |x, t| Some(velocity_field(spec, x, t)))
}

/// Exact tracer position: `xi(t) + R(spin_sign omega (t - t0)) (x0 - xi(t0))`.
pub fn exact_tracer_position(spec: &CoherentStateSpec, x0: Vector2<f64>, t0: f64, t: f64) -> Vector2<f64> {
    let rate = spec.params.omega() * spec.params.spin().value();
    let start = x0 - classical_trajectory(spec, t0).xi;
    classical_trajectory(spec, t).xi + Rotation2::new(rate * (t - t0)) * start
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rotation {
    Rotating {
        angular_rate: f64,
        direction: i32,
    },
    /// The tracer rides the packet center; no co-moving angle exists.
    CenterLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComovingDiagnostics {
    /// `max - min` of the co-moving radius.
    pub radius_drift: f64,
    pub mean_radius: f64,
    pub rotation: Rotation,
}

/// Radius drift and least-squares angular rate of a path about the packet center.
pub fn comoving_diagnostics(path: &TracerPath) -> Result<ComovingDiagnostics> {
    let period = path.spec.params.period();
    let span = match (path.times.first(), path.times.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    // small slack so paths covering exactly one period qualify
    if path.len() < 16 || span < period * (1.0 - 1e-12) {
        return Err(Error::ShortPath {
            samples: path.len(),
            span,
            period,
        });
    }
    let radii: Vec<f64> = path.comoving_offsets().iter().map(|d| d.norm()).collect();
    let max = radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let mean_radius = radii.iter().sum::<f64>() / radii.len() as f64;
    let rotation = if max < CENTER_LINE_RADIUS {
        Rotation::CenterLine
    } else {
        let angular_rate = least_squares_slope(&path.times, &path.comoving_angles());
        Rotation::Rotating {
            angular_rate,
            direction: if angular_rate >= 0.0 { 1 } else { -1 },
        }
    };
    Ok(ComovingDiagnostics {
        radius_drift: max - min,
        mean_radius,
        rotation,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (num, den) = xs.iter().zip(ys).fold((0.0, 0.0), |(num, den), (x, y)| {
        (num + (x - mx) * (y - my), den + (x - mx) * (x - mx))
    });
    num / den
}

/// Velocity snapshots from a numerical solution, interpolated bilinearly in
/// space and linearly in time.
#[derive(Debug, Clone, Default)]
pub struct SampledVelocity {
    snapshots: Vec<(f64, GuardedVelocity)>,
}

impl SampledVelocity {
    pub fn new() -> Self {
        Self::default()
    }

    /// Snapshots must be pushed in increasing time order.
    pub fn push(&mut self, t: f64, field: GuardedVelocity) {
        if let Some((last, _)) = self.snapshots.last() {
            assert!(t > *last, "snapshots must be time-ordered");
        }
        self.snapshots.push((t, field));
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn sample(&self, x: Vector2<f64>, t: f64) -> Option<Vector2<f64>> {
        let first = self.snapshots.first()?;
        if self.snapshots.len() == 1 {
            return bilinear(&first.1, x);
        }
        let upper = self.snapshots.iter().position(|(ts, _)| *ts >= t)?;
        if upper == 0 {
            return (t == first.0).then(|| bilinear(&first.1, x)).flatten();
        }
        let (ta, fa) = &self.snapshots[upper - 1];
        let (tb, fb) = &self.snapshots[upper];
        let w = (t - ta) / (tb - ta);
        Some(bilinear(fa, x)? * (1.0 - w) + bilinear(fb, x)? * w)
    }
}

/// Bilinear interpolation inside the grid; `None` if any corner is guarded out.
pub fn bilinear(field: &GuardedVelocity, x: Vector2<f64>) -> Option<Vector2<f64>> {
    let grid = field.grid();
    let h = grid.spacing();
    let n = grid.n();
    let fx = (x.x + grid.half_extent()) / h;
    let fy = (x.y + grid.half_extent()) / h;
    if !(fx >= 0.0 && fy >= 0.0) {
        return None;
    }
    let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
    if ix + 1 >= n || iy + 1 >= n {
        return None;
    }
    let (wx, wy) = (fx - ix as f64, fy - iy as f64);
    let v00 = field.at(ix, iy)?;
    let v10 = field.at(ix + 1, iy)?;
    let v01 = field.at(ix, iy + 1)?;
    let v11 = field.at(ix + 1, iy + 1)?;
    Some((v00 * (1.0 - wx) + v10 * wx) * (1.0 - wy) + (v01 * (1.0 - wx) + v11 * wx) * wy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{PhysParams, SpinSign};

    #[test]
    fn rejects_bad_spans() {
        let spec = CoherentStateSpec::ground(PhysParams::natural());
        let x0 = Vector2::new(1.0, 0.0);
        assert!(integrate_tracer(&spec, x0, 0.0, 1.0, 0.0).is_err());
        assert!(integrate_tracer(&spec, x0, 1.0, 1.0, 0.1).is_err());
        assert!(integrate_tracer(&spec, x0, 2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn samples_every_step() {
        let spec = CoherentStateSpec::ground(PhysParams::natural());
        let path = integrate_tracer(&spec, Vector2::new(1.0, 0.0), 0.0, 1.0, 0.01).unwrap();
        assert_eq!(path.len(), 101);
        assert_eq!(*path.times.last().unwrap(), 1.0);
        assert!(path.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn unwrapping_follows_several_turns() {
        let spec = CoherentStateSpec::ground(PhysParams::natural().with_spin(SpinSign::Down));
        let t1 = 3.0 * spec.params.period();
        let path = integrate_tracer(&spec, Vector2::new(0.0, 2.0), 0.0, t1, t1 / 3000.0).unwrap();
        let angles = path.comoving_angles();
        let turned = angles.last().unwrap() - angles[0];
        assert!((turned + 3.0 * std::f64::consts::TAU).abs() < 1e-8);
    }

    #[test]
    fn short_paths_rejected() {
        let spec = CoherentStateSpec::ground(PhysParams::natural());
        let path = integrate_tracer(&spec, Vector2::new(1.0, 0.0), 0.0, 1.0, 0.01).unwrap();
        assert!(matches!(comoving_diagnostics(&path), Err(Error::ShortPath { .. })));
    }

    #[test]
    fn center_line_is_a_distinct_outcome() {
        let spec = CoherentStateSpec::ground(PhysParams::natural());
        let t1 = spec.params.period();
        let path = integrate_tracer(&spec, Vector2::zeros(), 0.0, t1, t1 / 100.0).unwrap();
        let d = comoving_diagnostics(&path).unwrap();
        assert_eq!(d.rotation, Rotation::CenterLine);
        assert_eq!(d.radius_drift, 0.0);
    }
}
