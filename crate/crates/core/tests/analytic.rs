mod common;

use std::f64::consts::PI;

use coherent_top::analytic::*;
use coherent_top::spectral::Spectral2D;
use coherent_top::{CoherentStateSpec, Grid2D, PhysParams, SpinSign};
use nalgebra::Vector2;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use common::*;

#[test]
fn trajectory_matches_ode_integration() {
    let spec = orbit_spec();
    let (x, v) = oscillator_ode(spec.xi0(), spec.v0(), 1.0, 0.7, 1e-5);
    let c = classical_trajectory(&spec, 0.7);
    assert!((c.xi - x).norm() < 1e-10, "{:?} vs {:?}", c.xi, x);
    assert!((c.vel - v).norm() < 1e-10);

    let p = PhysParams::new(1.0, 2.0, 1.7, SpinSign::Up).unwrap();
    let spec = CoherentStateSpec::new(p, Vector2::new(-0.4, 1.1), Vector2::new(0.9, 0.3)).unwrap();
    let (x, v) = oscillator_ode(spec.xi0(), spec.v0(), 1.7, 2.3, 1e-5);
    let c = classical_trajectory(&spec, 2.3);
    assert!((c.xi - x).norm() < 1e-10 && (c.vel - v).norm() < 1e-10);
}

#[test]
fn phase_integral_matches_quadrature() {
    let spec = orbit_spec();
    let integrand = |s: f64| phase_rate(&spec, s);
    let oracle = simpson(&integrand, 0.0, 1.0, 1e-15);
    assert!((phase_integral(&spec, 1.0) - oracle).abs() < 1e-12);

    let mut rng = rng(11);
    for _ in 0..20 {
        let spec = random_spec(&mut rng);
        let t = rng.random_range(0.0..4.0 * PI);
        // rate written out from the trajectory, independent of phase_rate
        let f = |s: f64| {
            let c = classical_trajectory(&spec, s);
            1.0 + 0.5 * c.vel.norm_squared() - 0.5 * c.xi.norm_squared()
        };
        let oracle = simpson(&f, 0.0, t, 1e-14);
        assert!((phase_integral(&spec, t) - oracle).abs() < 1e-11);
    }
}

#[test]
fn state_is_normalized_on_default_grid() {
    let spec = orbit_spec();
    let grid = Grid2D::for_spec(&spec, 256).unwrap();
    for t in [0.0, 0.3, PI] {
        let psi = coherent_state_field(&spec, grid, t).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn phase_gradient_matches_finite_differences() {
    let spec = orbit_spec();
    let grid = Grid2D::for_spec(&spec, 256).unwrap();
    let t = 0.45;
    let h = 1e-6;
    let rho_max = 1.0 / PI;
    let mut worst: f64 = 0.0;
    for x in grid.points() {
        let pf = polar_form(&spec, x, t);
        if pf.rho <= 1e-10 * rho_max {
            continue;
        }
        let psi = coherent_state(&spec, x, t);
        let d =
            |e: Vector2<f64>| (coherent_state(&spec, x + e * h, t) - coherent_state(&spec, x - e * h, t)) / (2.0 * h);
        let gx = d(Vector2::x());
        let gy = d(Vector2::y());
        let fd = Vector2::new((psi.conj() * gx).im, (psi.conj() * gy).im) / psi.norm_sqr();
        worst = worst.max((fd - pf.grad_s_over_m).norm());
    }
    assert!(worst < 1e-8, "max deviation {worst:e}");
}

#[test]
fn energy_field_matches_time_derivative() {
    let spec = orbit_spec();
    let dt = 1e-6;
    for (x, t) in [
        (Vector2::new(0.5, -0.3), 0.7),
        (Vector2::new(-1.0, 1.2), 2.0),
        (Vector2::new(2.0, 0.1), 4.1),
    ] {
        let dpsi = (coherent_state(&spec, x, t + dt) - coherent_state(&spec, x, t - dt)) / (2.0 * dt);
        let oracle = Complex64::i() * dpsi / coherent_state(&spec, x, t);
        let e = energy_field(&spec, x, t);
        assert!((e - oracle).norm() / oracle.norm() < 1e-6, "{e} vs {oracle}");
        assert!(e.im != 0.0);
    }
}

#[test]
fn energy_on_trajectory_for_random_specs() {
    let mut rng = rng(5);
    for _ in 0..50 {
        let spec = random_spec(&mut rng);
        let t = rng.random_range(0.0..20.0);
        let e = energy_field(&spec, classical_trajectory(&spec, t).xi, t);
        let expected = 1.0 + 0.5 * spec.v0().norm_squared() + 0.5 * spec.xi0().norm_squared();
        assert!((e.re - expected).abs() <= 1e-12 * expected);
        assert!(e.im.abs() <= 1e-14);
    }
}

#[test]
fn classical_energy_is_conserved() {
    let mut rng = rng(1);
    let period = 2.0 * PI;
    for _ in 0..100 {
        let spec = random_spec(&mut rng);
        let e0 = classical_trajectory(&spec, 0.0).energy(&spec);
        for _ in 0..100 {
            let t = rng.random_range(0.0..4.0 * period);
            let e = classical_trajectory(&spec, t).energy(&spec);
            assert!((e - e0).abs() <= 1e-12 * e0.max(f64::MIN_POSITIVE));
        }
    }
}

#[test]
fn schrodinger_residual_is_small() {
    let spec = orbit_spec();
    let grid = Grid2D::for_spec(&spec, 256).unwrap();
    let spectral = Spectral2D::new(grid);
    let p = spec.params;
    let dt = 1e-6;
    for t in [0.0, 1.3] {
        let now = coherent_state_field(&spec, grid, t).unwrap();
        let before = coherent_state_field(&spec, grid, t - dt).unwrap();
        let after = coherent_state_field(&spec, grid, t + dt).unwrap();
        let lap = spectral.laplacian(now.values());
        let max_psi = now.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let rho_max = max_psi * max_psi;
        let mut worst: f64 = 0.0;
        for (i, x) in grid.points().enumerate() {
            let psi = now.values()[i];
            if psi.norm_sqr() <= 1e-10 * rho_max {
                continue;
            }
            let lhs = Complex64::i() * p.hbar() * (after.values()[i] - before.values()[i]) / (2.0 * dt);
            let rhs = -p.hbar() * p.hbar() / (2.0 * p.mass()) * lap[i] + p.potential(x) * psi;
            worst = worst.max((lhs - rhs).norm());
        }
        assert!(worst / max_psi < 1e-5, "residual {:e}", worst / max_psi);
    }
}

proptest! {
    #[test]
    fn trajectory_is_periodic(
        x0 in -2.0f64..2.0, y0 in -2.0f64..2.0, vx in -2.0f64..2.0, vy in -2.0f64..2.0,
        omega in 0.2f64..5.0, t in 0.0f64..30.0,
    ) {
        let p = PhysParams::new(1.0, 1.0, omega, SpinSign::Up).unwrap();
        let spec = CoherentStateSpec::new(p, Vector2::new(x0, y0), Vector2::new(vx, vy)).unwrap();
        let a = classical_trajectory(&spec, t);
        let b = classical_trajectory(&spec, t + 2.0 * PI / omega);
        prop_assert!((a.xi - b.xi).norm() < 1e-10);
        prop_assert!((a.vel - b.vel).norm() < 1e-10);
    }

    #[test]
    fn initial_state_is_bit_exact(
        x0 in -2.0f64..2.0, y0 in -2.0f64..2.0, vx in -2.0f64..2.0, vy in -2.0f64..2.0,
        px in -6.0f64..6.0, py in -6.0f64..6.0, hbar in 0.1f64..3.0,
    ) {
        let p = PhysParams::new(hbar, 1.3, 0.8, SpinSign::Down).unwrap();
        let spec = CoherentStateSpec::new(p, Vector2::new(x0, y0), Vector2::new(vx, vy)).unwrap();
        let x = Vector2::new(px, py);
        let a = coherent_state(&spec, x, 0.0);
        let b = initial_wavefunction(&spec, x);
        prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
        prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn density_peak_follows_center(t in 0.0f64..20.0) {
        let spec = orbit_spec();
        let xi = classical_trajectory(&spec, t).xi;
        prop_assert!((polar_form(&spec, xi, t).rho - 1.0 / PI).abs() < 1e-15);
        prop_assert_eq!(polar_form(&spec, Vector2::new(3.0, -1.0), t).grad_s_over_m, classical_trajectory(&spec, t).vel);
    }
}
