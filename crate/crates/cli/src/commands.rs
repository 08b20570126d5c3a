use std::f64::consts::SQRT_2;
use std::path::Path;

use anyhow::{bail, Result};
use coherent_top::analytic::{classical_trajectory, coherent_state_field, trajectory_energy};
use coherent_top::currents::{velocity_field, velocity_from_psi, DENSITY_GUARD};
use coherent_top::evolve::EvolveConfig;
use coherent_top::flow::{comoving_diagnostics, integrate_tracer, Rotation};
use coherent_top::hydrogen::{hydrogen_energy_picture, hydrogen_uncertainties};
use coherent_top::{Check, CoherentStateSpec, ComplexField, VerificationReport};
use nalgebra::Vector2;
use serde::Serialize;
use serde_json::json;

use crate::config::{vec2, RunConfig};
use crate::evolution::run_evolution;
use crate::output::{fmt, write_json, Table};
use crate::verify::{verify, SERIES_POINTS};

pub const VERIFY_REPORT: &str = "verify_report.json";
pub const EVOLVE_DIR: &str = "evolve";
pub const TRAJECTORY_DIR: &str = "trajectories";
pub const HYDROGEN_REPORT: &str = "hydrogen_report.json";

/// The config as echoed in reports. The output directory is left out so the
/// report bytes do not depend on where they are written.
pub fn echoed_config(cfg: &RunConfig) -> Result<serde_json::Value> {
    let mut value = serde_json::to_value(cfg)?;
    if let Some(map) = value.as_object_mut() {
        map.remove("out");
    }
    Ok(value)
}

fn metadata(report: &mut VerificationReport, command: &str, cfg: &RunConfig) -> Result<()> {
    let spec = cfg.spec()?;
    let steps = EvolveConfig::covering(cfg.grid(), cfg.dt(), cfg.duration()?, spec.params)?;
    report.metadata.insert("command".into(), json!(command));
    report
        .metadata
        .insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.metadata.insert("config".into(), echoed_config(cfg)?);
    report.metadata.insert(
        "derived".into(),
        json!({
            "sigma": spec.params.sigma(),
            "period": spec.params.period(),
            "trajectory_energy": trajectory_energy(&spec),
            "evolve_steps": steps.steps,
            "evolve_dt": steps.dt,
            "tracer_dt": cfg.tracer_dt()?,
        }),
    );
    Ok(())
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<VerificationReport> {
    let mut report = verify(cfg)?;
    metadata(&mut report, "verify", cfg)?;
    report
        .metadata
        .insert("checks_passed".into(), json!(report.passed_count()));
    write_json(&cfg.out.join(VERIFY_REPORT), &report)?;
    Ok(report)
}

fn field_table(
    spec: &CoherentStateSpec,
    psi: &ComplexField,
    t: f64,
    analytic: bool,
    rows: impl Iterator<Item = usize>,
) -> Result<Table> {
    let grid = *psi.grid();
    let rho = psi.density();
    let guard = DENSITY_GUARD * rho.max();
    let numeric = if analytic {
        None
    } else {
        Some(velocity_from_psi(psi, &spec.params)?)
    };
    let mut table = Table::new(&["x", "y", "rho", "phase", "vx", "vy"])?;
    for i in rows {
        let (ix, iy) = (i % grid.n(), i / grid.n());
        let x = grid.point(ix, iy);
        let v = match &numeric {
            Some(field) => field.at(ix, iy),
            None => (rho.values()[i] > guard).then(|| velocity_field(spec, x, t)),
        }
        .unwrap_or(Vector2::new(f64::NAN, f64::NAN));
        table.row(&[x.x, x.y, rho.values()[i], psi.values()[i].arg(), v.x, v.y])?;
    }
    Ok(table)
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<VerificationReport> {
    let spec = cfg.spec()?;
    let grid = cfg.grid();
    let duration = cfg.duration()?;
    let steps = EvolveConfig::covering(grid, cfg.dt(), duration, spec.params)?.steps;
    let snap_steps: Vec<usize> = (0..=cfg.snapshots)
        .map(|k| ((k * steps) as f64 / cfg.snapshots as f64).round() as usize)
        .collect();
    let run = run_evolution(&spec, grid, cfg.dt(), duration, &snap_steps, SERIES_POINTS)?;
    let dir = cfg.out.join(EVOLVE_DIR);

    for (k, s) in snap_steps.iter().enumerate() {
        let t = *s as f64 * run.config.dt;
        let numeric = &run.captured[s];
        let exact = coherent_state_field(&spec, grid, t)?;
        let n = grid.n();
        let iy = grid.nearest_index(classical_trajectory(&spec, t).xi.y);
        for (kind, psi, analytic) in [("analytic", &exact, true), ("numeric", numeric, false)] {
            field_table(&spec, psi, t, analytic, iy * n..(iy + 1) * n)?
                .save(&dir.join(format!("slice_{kind}_{k:03}.csv")))?;
            field_table(&spec, psi, t, analytic, 0..grid.len())?.save(&dir.join(format!("grid_{kind}_{k:03}.csv")))?;
        }
    }

    let mut series = Table::new(&["step", "t", "relative_l2_error", "norm", "energy"])?;
    for r in &run.series {
        series.record([
            r.step.to_string(),
            fmt(r.t),
            fmt(r.relative_l2_error),
            fmt(r.norm),
            fmt(r.energy),
        ])?;
    }
    series.save(&dir.join("error_series.csv"))?;

    let mut report = VerificationReport::new();
    let first = run.series[0];
    let last = run.last();
    report.check("evolve.relative_l2_error", last.relative_l2_error, 1e-6);
    report.check("evolve.norm_drift", (last.norm - first.norm).abs(), 1e-10);
    metadata(&mut report, "evolve", cfg)?;
    report.metadata.insert("snapshot_steps".into(), json!(snap_steps));
    write_json(&dir.join("evolve_report.json"), &report)?;
    Ok(report)
}

pub const CENTER_LINE_LABEL: &str = "degenerate center-line";

pub fn cmd_trajectories(cfg: &RunConfig) -> Result<VerificationReport> {
    if cfg.seed_points.is_empty() {
        bail!("trajectories needs at least one seed point");
    }
    let spec = cfg.spec()?;
    let dir = cfg.out.join(TRAJECTORY_DIR);
    let expected = spec.params.spin().value() * spec.params.omega();
    let mut report = VerificationReport::new();
    let mut summary = Table::new(&[
        "tracer",
        "x0",
        "y0",
        "angular_rate",
        "direction",
        "radius_drift",
        "mean_radius",
        "status",
    ])?;
    for (k, offset) in cfg.seed_points.iter().enumerate() {
        let x0 = spec.xi0() + vec2(*offset);
        let path = integrate_tracer(&spec, x0, 0.0, cfg.duration()?, cfg.tracer_dt()?)?;
        let offsets = path.comoving_offsets();
        let angles = path.comoving_angles();
        let mut table = Table::new(&["t", "x", "y", "xi_x", "xi_y", "radius", "angle"])?;
        for i in 0..path.len() {
            let (t, x) = (path.times[i], path.positions[i]);
            let xi = classical_trajectory(&spec, t).xi;
            table.row(&[t, x.x, x.y, xi.x, xi.y, offsets[i].norm(), angles[i]])?;
        }
        table.save(&dir.join(format!("tracer_{k:03}.csv")))?;

        let d = comoving_diagnostics(&path)?;
        let (rate, direction, status) = match d.rotation {
            Rotation::Rotating {
                angular_rate,
                direction,
            } => {
                report.check(
                    format!("trajectories.tracer_{k:03}.angular_rate"),
                    (angular_rate - expected) / spec.params.omega(),
                    1e-6,
                );
                (angular_rate, direction, "rotating")
            }
            Rotation::CenterLine => (f64::NAN, 0, CENTER_LINE_LABEL),
        };
        summary.record([
            k.to_string(),
            fmt(x0.x),
            fmt(x0.y),
            fmt(rate),
            direction.to_string(),
            fmt(d.radius_drift),
            fmt(d.mean_radius),
            status.to_string(),
        ])?;
    }
    summary.save(&dir.join("summary.csv"))?;
    metadata(&mut report, "trajectories", cfg)?;
    write_json(&dir.join("trajectories_report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct HydrogenOutput {
    pub hbar: f64,
    pub mass: f64,
    pub alpha: f64,
    pub c: f64,
    pub a0: f64,
    pub delta_r: f64,
    pub delta_p: f64,
    pub product_over_hbar: f64,
    pub claimed_product_over_hbar: f64,
    pub mean_r2_over_a0_squared: f64,
    pub mean_sin2: f64,
    pub picture_energy: f64,
    pub quantum_energy: f64,
    /// The rotating picture is expected to miss the bound-state energy.
    pub claimed_mismatch: bool,
    pub mismatch: bool,
    pub report: VerificationReport,
}

pub fn cmd_hydrogen(cfg: &RunConfig) -> Result<HydrogenOutput> {
    let p = cfg.hydrogen.params()?;
    let u = hydrogen_uncertainties(&p);
    let e = hydrogen_energy_picture(&p);
    let mut report = VerificationReport::new();
    report.check("hydrogen.uncertainty_product", u.product_over_hbar - SQRT_2, 1e-9);
    report.check(
        "hydrogen.energy_not_reproduced",
        if e.mismatch { 0.0 } else { 1.0 },
        0.5,
    );
    report.metadata.insert("command".into(), json!("hydrogen"));
    report
        .metadata
        .insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.metadata.insert("config".into(), echoed_config(cfg)?);
    let out = HydrogenOutput {
        hbar: p.hbar(),
        mass: p.mass(),
        alpha: p.alpha(),
        c: p.c(),
        a0: p.a0(),
        delta_r: u.delta_r,
        delta_p: u.delta_p,
        product_over_hbar: u.product_over_hbar,
        claimed_product_over_hbar: SQRT_2,
        mean_r2_over_a0_squared: u.mean_r2 / (p.a0() * p.a0()),
        mean_sin2: u.mean_sin2,
        picture_energy: e.picture_energy,
        quantum_energy: e.quantum_energy,
        claimed_mismatch: true,
        mismatch: e.mismatch,
        report,
    };
    write_json(&cfg.out.join(HYDROGEN_REPORT), &out)?;
    Ok(out)
}

/// Exit status 1 lists the failed checks on stderr.
pub fn summarize(report: &VerificationReport, out: &Path) -> bool {
    let failed: Vec<&Check> = report.failures().collect();
    eprintln!(
        "{} of {} checks passed; output in {}",
        report.passed_count(),
        report.checks.len(),
        out.display()
    );
    for c in &failed {
        eprintln!(
            "FAILED {}: residual {:e} > tolerance {:e}",
            c.name, c.residual, c.tolerance
        );
    }
    failed.is_empty()
}
