//! Oracles shared by the integration tests. Nothing here calls into the
//! library's own quadrature or integrators.
#![allow(dead_code)]

use coherent_top::{CoherentStateSpec, PhysParams, SpinSign};
use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Adaptive Simpson with Richardson correction.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// RK4 for `x'' = -w^2 x` in 2D, fixed step; returns `(x, v)` at `t`.
pub fn oscillator_ode(xi0: Vector2<f64>, v0: Vector2<f64>, omega: f64, t: f64, h: f64) -> (Vector2<f64>, Vector2<f64>) {
    let steps = (t / h).round() as usize;
    let h = t / steps as f64;
    let f = |x: Vector2<f64>, v: Vector2<f64>| (v, -x * omega * omega);
    let (mut x, mut v) = (xi0, v0);
    for _ in 0..steps {
        let (a1, b1) = f(x, v);
        let (a2, b2) = f(x + a1 * (h / 2.0), v + b1 * (h / 2.0));
        let (a3, b3) = f(x + a2 * (h / 2.0), v + b2 * (h / 2.0));
        let (a4, b4) = f(x + a3 * h, v + b3 * h);
        x += (a1 + (a2 + a3) * 2.0 + a4) * (h / 6.0);
        v += (b1 + (b2 + b3) * 2.0 + b4) * (h / 6.0);
    }
    (x, v)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn orbit_spec() -> CoherentStateSpec {
    CoherentStateSpec::new(PhysParams::natural(), Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)).unwrap()
}

/// Natural units with `xi0`, `v0` uniform in `[-2, 2]^4` and a random spin.
pub fn random_spec(rng: &mut ChaCha8Rng) -> CoherentStateSpec {
    let mut c = || rng.random_range(-2.0..2.0);
    let xi0 = Vector2::new(c(), c());
    let v0 = Vector2::new(c(), c());
    let spin = if rng.random_bool(0.5) {
        SpinSign::Up
    } else {
        SpinSign::Down
    };
    CoherentStateSpec::new(PhysParams::natural().with_spin(spin), xi0, v0).unwrap()
}
