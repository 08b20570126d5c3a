//! The `verify` suites. Each check carries its tolerance; the report records both.

use std::f64::consts::SQRT_2;

use anyhow::Result;
use coherent_top::analytic::{
    classical_trajectory, coherent_state_field, energy_field, phase_integral, phase_rate, trajectory_energy,
};
use coherent_top::currents::{
    rigid_body_fit_masked, rotation_velocity, spin_current, total_current, velocity_field, velocity_from_psi,
};
use coherent_top::evolve::continuity_residual;
use coherent_top::flow::{comoving_diagnostics, integrate_tracer, Rotation};
use coherent_top::hydrogen::{hydrogen_energy_picture, hydrogen_uncertainties, spherical_average};
use coherent_top::quadrature::integrate_adaptive;
use coherent_top::spectral::Spectral2D;
use coherent_top::stats::{
    energy_expectation_picture, moment_report, momentum_spread_operator, momentum_spread_picture,
};
use coherent_top::{CoherentStateSpec, Grid2D, VerificationReport};
use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{vec2, RunConfig};
use crate::evolution::{run_evolution, EvolutionRun};

/// Rows in the error series of a run.
pub const SERIES_POINTS: usize = 100;

pub fn verify(cfg: &RunConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let spec = cfg.spec()?;
    let grid = cfg.grid();
    analytic_suite(cfg, &spec, grid, &mut report)?;
    currents_suite(cfg, &spec, grid, &mut report)?;
    evolve_suite(cfg, &spec, grid, &mut report)?;
    flow_suite(cfg, &spec, &mut report)?;
    stats_suite(cfg, &spec, grid, &mut report)?;
    hydrogen_suite(cfg, &mut report)?;
    Ok(report)
}

pub fn random_states(cfg: &RunConfig, spec: &CoherentStateSpec) -> Vec<(CoherentStateSpec, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.random_seed);
    let r = cfg.random_range;
    let period = spec.params.period();
    (0..cfg.random_states)
        .map(|_| {
            let mut c = || if r > 0.0 { rng.random_range(-r..=r) } else { 0.0 };
            let xi0 = Vector2::new(c(), c());
            let v0 = Vector2::new(c(), c()) * spec.params.omega();
            let t = rng.random_range(0.0..2.0 * period);
            (CoherentStateSpec::new(spec.params, xi0, v0).expect("finite draws"), t)
        })
        .collect()
}

fn analytic_suite(
    cfg: &RunConfig,
    spec: &CoherentStateSpec,
    grid: Grid2D,
    report: &mut VerificationReport,
) -> Result<()> {
    let period = spec.params.period();
    let e0 = trajectory_energy(spec);
    let scale = e0.abs().max(spec.params.hbar() * spec.params.omega());

    let mut norm_err: f64 = 0.0;
    for k in 0..3 {
        let psi = coherent_state_field(spec, grid, k as f64 * period / 3.0)?;
        norm_err = norm_err.max((1.0 - psi.norm_sqr()).abs());
    }
    report.check("analytic.normalization", norm_err, 1e-12);

    let (mut re_err, mut im_err, mut classical_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let classical0 = classical_trajectory(spec, 0.0).energy(spec);
    for k in 0..64 {
        let t = k as f64 * cfg.periods * period / 64.0;
        let c = classical_trajectory(spec, t);
        let e = energy_field(spec, c.xi, t);
        re_err = re_err.max((e.re - e0).abs());
        im_err = im_err.max(e.im.abs());
        classical_err = classical_err.max((c.energy(spec) - classical0).abs());
    }
    report.check("analytic.energy_on_trajectory_real", re_err / scale, 1e-12);
    report.check("analytic.energy_on_trajectory_imag", im_err / scale, 1e-12);
    report.check("analytic.classical_energy_conserved", classical_err / scale, 1e-12);

    let mut phase_err: f64 = 0.0;
    let mut states = vec![*spec];
    states.extend(random_states(cfg, spec).into_iter().take(5).map(|(s, _)| s));
    for s in &states {
        let scale = trajectory_energy(s).abs() * period;
        for k in 1..=4 {
            let t = k as f64 * period / 4.0;
            let quad = integrate_adaptive(|u| phase_rate(s, u), 0.0, t, 1e-14 * scale);
            phase_err = phase_err.max((quad - phase_integral(s, t)).abs() / scale);
        }
    }
    report.check("analytic.phase_integral_vs_quadrature", phase_err, 1e-12);

    let start = coherent_state_field(spec, grid, 0.0)?;
    let after = coherent_state_field(spec, grid, period)?;
    report.check("analytic.period_return", after.relative_l2_error(&start)?, 1e-10);
    Ok(())
}

fn currents_suite(
    cfg: &RunConfig,
    spec: &CoherentStateSpec,
    grid: Grid2D,
    report: &mut VerificationReport,
) -> Result<()> {
    let omega = spec.params.omega();
    let expected_rate = spec.params.spin().value() * omega;
    let (mut dev, mut strain, mut rate, mut curl): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for (s, t) in random_states(cfg, spec) {
        let g = Grid2D::for_spec(&s, cfg.grid_n)?;
        let psi = coherent_state_field(&s, g, t)?;
        let v = velocity_from_psi(&psi, &s.params)?;
        // in units of the rotation speed at one sigma
        dev = dev.max(v.max_deviation(|x| velocity_field(&s, x, t)) / (omega * s.params.sigma()));
        let fit = rigid_body_fit_masked(&v.to_field(Vector2::zeros())?, Some(&v.mask()))?;
        strain = strain.max(fit.strain_residual / omega);
        curl = curl.max(fit.curl_residual / omega);
        rate = rate.max((fit.omega_fitted - expected_rate).abs() / omega);
    }
    report.check("currents.velocity_is_rigid_body", dev, 1e-8);
    report.check("currents.strain_residual", strain, 1e-8);
    report.check("currents.curl_residual", curl, 1e-8);
    report.check("currents.fitted_rotation_rate", rate, 1e-8);

    let psi = coherent_state_field(spec, grid, 0.3 * spec.params.period())?;
    let rho = psi.density();
    let j_spin = spin_current(&rho, &spec.params)?;
    let div = Spectral2D::new(grid).divergence(j_spin.values());
    let j_max = total_current(&psi, &spec.params)?.total.max_norm();
    let worst = div.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    report.check("currents.spin_current_divergence_free", worst / j_max, 1e-10);

    let flipped = spec.with_spin(spec.params.spin().flipped());
    let mut flip_err: f64 = 0.0;
    for x in grid.points().step_by(97) {
        flip_err = flip_err.max((rotation_velocity(spec, x, 0.4) + rotation_velocity(&flipped, x, 0.4)).norm());
    }
    report.check("currents.spin_flip_negates_rotation", flip_err, 1e-15);
    Ok(())
}

/// Step indices captured around the midpoint for the continuity check.
fn continuity_steps(steps: usize) -> [usize; 3] {
    let mid = (steps / 2).max(1);
    [mid - 1, mid, mid + 1]
}

pub fn main_run(cfg: &RunConfig, spec: &CoherentStateSpec) -> Result<EvolutionRun> {
    let duration = cfg.duration()?;
    let probe = coherent_top::evolve::EvolveConfig::covering(cfg.grid(), cfg.dt(), duration, spec.params)?;
    let capture = continuity_steps(probe.steps);
    run_evolution(spec, cfg.grid(), cfg.dt(), duration, &capture, SERIES_POINTS)
}

fn evolve_suite(
    cfg: &RunConfig,
    spec: &CoherentStateSpec,
    grid: Grid2D,
    report: &mut VerificationReport,
) -> Result<()> {
    let fine = main_run(cfg, spec)?;
    let coarse = run_evolution(spec, grid, 2.0 * cfg.dt(), cfg.duration()?, &[], 1)?;
    let err = fine.last().relative_l2_error;
    report.check(
        "evolve.acceptance_grade_step",
        fine.config.dt * spec.params.omega(),
        0.01,
    );
    report.check("evolve.relative_l2_error", err, 1e-6);
    let ratio = coarse.last().relative_l2_error / err;
    report.check(
        "evolve.convergence_ratio",
        if ratio.is_finite() { ratio - 4.0 } else { f64::MAX },
        0.5,
    );

    let e0 = trajectory_energy(spec);
    let first = fine.series[0];
    let norm_drift = fine
        .series
        .iter()
        .map(|r| (r.norm - first.norm).abs())
        .fold(0.0, f64::max);
    let energy_drift = fine.series.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max);
    report.check("evolve.norm_drift", norm_drift, 1e-10);
    report.check("evolve.energy_expectation", energy_drift / e0.abs(), 1e-7);

    let [a, b, c] = continuity_steps(fine.config.steps).map(|k| &fine.captured[&k]);
    let rho_max = b.density().max();
    let j_max = total_current(b, &spec.params)?.total.max_norm();
    let with_spin = continuity_residual([a, b, c], fine.config.dt, &spec.params, true)?;
    let without = continuity_residual([a, b, c], fine.config.dt, &spec.params, false)?;
    report.check("continuity.numeric_residual", with_spin / rho_max, 1e-6);
    report.check(
        "continuity.spin_term_invisible",
        (with_spin - without).abs() / j_max,
        1e-10,
    );

    let h = 1e-4 / spec.params.omega();
    let t = 0.4 * spec.params.period();
    let snaps = [t - h, t, t + h].map(|s| coherent_state_field(spec, grid, s));
    let [a, b, c] = snaps;
    let (a, b, c) = (a?, b?, c?);
    let residual = continuity_residual([&a, &b, &c], h, &spec.params, true)?;
    report.check("continuity.analytic_residual", residual / b.density().max(), 1e-6);
    Ok(())
}

fn flow_suite(cfg: &RunConfig, spec: &CoherentStateSpec, report: &mut VerificationReport) -> Result<()> {
    let period = spec.params.period();
    let dt = cfg.tracer_dt()?;
    let t1 = cfg.periods * period;
    let expected = spec.params.spin().value() * spec.params.omega();
    let (mut drift, mut rate_err, mut ret, mut center, mut direction): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut rotating = 0;
    for offset in &cfg.seed_points {
        let x0 = spec.xi0() + vec2(*offset);
        let path = integrate_tracer(spec, x0, 0.0, t1, dt)?;
        let back = path.positions[cfg.tracer_steps_per_period];
        ret = ret.max((back - x0).norm());
        let d = comoving_diagnostics(&path)?;
        match d.rotation {
            Rotation::Rotating {
                angular_rate,
                direction: dir,
            } => {
                rotating += 1;
                drift = drift.max(d.radius_drift / cfg.periods);
                rate_err = rate_err.max((angular_rate - expected).abs() / spec.params.omega());
                if dir != spec.params.spin().as_int() {
                    direction = 1.0;
                }
                let flipped = spec.with_spin(spec.params.spin().flipped());
                let other = comoving_diagnostics(&integrate_tracer(&flipped, x0, 0.0, period, dt)?)?;
                match other.rotation {
                    Rotation::Rotating { direction: odir, .. } if odir == -dir => {}
                    _ => direction = 1.0,
                }
            }
            Rotation::CenterLine => {
                let worst = path
                    .times
                    .iter()
                    .zip(&path.positions)
                    .map(|(t, x)| (x - classical_trajectory(spec, *t).xi).norm())
                    .fold(0.0, f64::max);
                center = center.max(worst);
            }
        }
    }
    let scale = spec.orbit_bound().max(spec.params.sigma());
    report.check("flow.radius_drift_per_period", drift / scale, 1e-7);
    report.check(
        "flow.angular_rate",
        if rotating > 0 { rate_err } else { f64::MAX },
        1e-6,
    );
    report.check("flow.direction_follows_spin", direction, 0.5);
    report.check("flow.period_return", ret / scale, 1e-6);
    report.check("flow.center_line_follows_trajectory", center / scale, 1e-8);
    Ok(())
}

fn stats_suite(cfg: &RunConfig, spec: &CoherentStateSpec, grid: Grid2D, report: &mut VerificationReport) -> Result<()> {
    let period = spec.params.period();
    let hbar = spec.params.hbar();
    let sigma = spec.params.sigma();
    let (mut px, mut py, mut drift): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let first = moment_report(spec, 0.0, &grid)?;
    for k in 0..9 {
        let r = moment_report(spec, k as f64 * period / 9.0, &grid)?;
        px = px.max((r.products[0] - 0.5).abs());
        py = py.max((r.products[1] - 0.5).abs());
        let d = [
            (r.delta_x - first.delta_x) / sigma,
            (r.delta_y - first.delta_y) / sigma,
            (r.delta_px - first.delta_px) * sigma / hbar,
            (r.delta_py - first.delta_py) * sigma / hbar,
        ];
        drift = d.iter().fold(drift, |m, v| m.max(v.abs()));
    }
    report.check("stats.heisenberg_x", px, 1e-9);
    report.check("stats.heisenberg_y", py, 1e-9);
    report.check("stats.spreads_time_invariant", drift, 1e-10);
    report.check(
        "stats.position_spread_is_sigma",
        (first.delta_x - sigma).abs() / sigma,
        1e-10,
    );

    let mut op: f64 = 0.0;
    for (s, t) in random_states(cfg, spec).into_iter().take(10) {
        let g = Grid2D::for_spec(&s, cfg.grid_n)?;
        let psi = coherent_state_field(&s, g, t)?;
        let (ox, oy) = momentum_spread_operator(&psi, &s.params);
        let (qx, qy) = momentum_spread_picture(&s, t, &g)?;
        op = op.max((ox - qx).abs().max((oy - qy).abs()) * sigma / hbar);
    }
    report.check("stats.momentum_operator_vs_picture", op, 1e-8);

    let e0 = trajectory_energy(spec);
    let (energy, parts) = energy_expectation_picture(spec, 0.0, &grid)?;
    let m = spec.params.mass();
    let w = spec.params.omega();
    let half = 0.5 * hbar * w;
    report.check("stats.picture_energy", (energy - e0).abs() / e0, 1e-9);
    report.check(
        "stats.energy_translational",
        (parts.translational - 0.5 * m * spec.v0().norm_squared()).abs() / e0,
        1e-9,
    );
    report.check("stats.energy_rotational", (parts.rotational - half).abs() / e0, 1e-9);
    report.check(
        "stats.energy_potential_of_center",
        (parts.potential_of_center - 0.5 * m * w * w * spec.xi0().norm_squared()).abs() / e0,
        1e-9,
    );
    report.check(
        "stats.energy_potential_spread",
        (parts.potential_spread - half).abs() / e0,
        1e-9,
    );
    Ok(())
}

fn hydrogen_suite(cfg: &RunConfig, report: &mut VerificationReport) -> Result<()> {
    let p = cfg.hydrogen.params()?;
    let a0 = p.a0();
    let u = hydrogen_uncertainties(&p);
    let e = hydrogen_energy_picture(&p);
    let scale = p.mass() * (p.alpha() * p.c()).powi(2);
    report.check(
        "hydrogen.normalization",
        (spherical_average(&p, |_, _| 1.0) - 1.0).abs(),
        1e-10,
    );
    report.check("hydrogen.mean_r2", (u.mean_r2 / (a0 * a0) - 3.0).abs(), 1e-10);
    report.check("hydrogen.mean_sin2", (u.mean_sin2 - 2.0 / 3.0).abs(), 1e-10);
    report.check(
        "hydrogen.uncertainty_product",
        (u.product_over_hbar - SQRT_2).abs(),
        1e-9,
    );
    report.check(
        "hydrogen.picture_energy",
        (e.picture_energy / scale - 1.0 / 3.0).abs(),
        1e-10,
    );
    report.check(
        "hydrogen.energy_not_reproduced",
        if e.mismatch { 0.0 } else { 1.0 },
        0.5,
    );
    Ok(())
}
