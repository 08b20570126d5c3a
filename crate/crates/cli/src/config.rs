//! Run configuration: JSON file, then command-line flags, then environment.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use coherent_top::grid::default_half_extent;
use coherent_top::hydrogen::HydrogenParams;
use coherent_top::{CoherentStateSpec, Grid2D, PhysParams, SpinSign};
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

pub const OUT_ENV: &str = "COHERENT_TOP_OUT";

/// Default time step is `T / DEFAULT_STEPS_PER_PERIOD`.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 8000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HydrogenConfig {
    pub hbar: f64,
    pub mass: f64,
    pub alpha: f64,
    pub c: f64,
}

impl Default for HydrogenConfig {
    fn default() -> Self {
        let p = HydrogenParams::atomic();
        HydrogenConfig {
            hbar: p.hbar(),
            mass: p.mass(),
            alpha: p.alpha(),
            c: p.c(),
        }
    }
}

impl HydrogenConfig {
    pub fn params(&self) -> Result<HydrogenParams> {
        HydrogenParams::new(self.hbar, self.mass, self.alpha, self.c).context("invalid hydrogen parameters")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
    /// +1 or -1
    pub spin: i32,
    pub xi0: [f64; 2],
    pub v0: [f64; 2],
    /// Nodes per axis, a power of two.
    pub grid_n: usize,
    /// Half-width of the periodic box; derived from the orbit when absent.
    pub half_extent: Option<f64>,
    /// Split-step time step; `T / 8000` when absent.
    pub dt: Option<f64>,
    /// Duration of evolution and tracer runs, in periods.
    pub periods: f64,
    /// Snapshots written by `evolve`, evenly spaced after t = 0.
    pub snapshots: usize,
    /// Tracer seeds as offsets from xi0.
    pub seed_points: Vec<[f64; 2]>,
    pub tracer_steps_per_period: usize,
    /// Random states used by the rigid-body and momentum checks.
    pub random_states: usize,
    pub random_seed: u64,
    /// Components of random xi0 and v0 are drawn from `[-r, r]`.
    pub random_range: f64,
    pub hydrogen: HydrogenConfig,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            spin: 1,
            xi0: [1.0, 0.0],
            v0: [0.0, 1.0],
            grid_n: 256,
            half_extent: None,
            dt: None,
            periods: 1.0,
            snapshots: 2,
            seed_points: vec![[0.5, 0.0], [0.0, -1.0], [0.0, 0.0]],
            tracer_steps_per_period: 10_000,
            random_states: 20,
            random_seed: 7,
            random_range: 2.0,
            hydrogen: HydrogenConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

/// Flag values that override the file; `None` leaves the file value alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid_n: Option<usize>,
    pub dt: Option<f64>,
    pub periods: Option<f64>,
    pub spin: Option<i32>,
    pub xi0: Option<[f64; 2]>,
    pub v0: Option<[f64; 2]>,
    pub seed_points: Option<Vec<[f64; 2]>>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn load(path: Option<&Path>, overrides: Overrides, env_out: Option<PathBuf>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        let o = overrides;
        if let Some(v) = o.out {
            cfg.out = v;
        }
        if let Some(v) = o.grid_n {
            cfg.grid_n = v;
        }
        if let Some(v) = o.dt {
            cfg.dt = Some(v);
        }
        if let Some(v) = o.periods {
            cfg.periods = v;
        }
        if let Some(v) = o.spin {
            cfg.spin = v;
        }
        if let Some(v) = o.xi0 {
            cfg.xi0 = v;
        }
        if let Some(v) = o.v0 {
            cfg.v0 = v;
        }
        if let Some(v) = o.seed_points {
            cfg.seed_points = v;
        }
        if let Some(v) = env_out {
            cfg.out = v;
        }
        cfg.resolve()
    }

    /// Validates and fills the derived fields, so the result reproduces the run exactly.
    pub fn resolve(mut self) -> Result<Self> {
        let spec = self.spec()?;
        let half_extent = self.half_extent.unwrap_or_else(|| default_half_extent(&spec));
        let grid = Grid2D::new(half_extent, self.grid_n).context("invalid grid")?;
        self.half_extent = Some(grid.half_extent());
        let dt = self.dt.unwrap_or(spec.params.period() / DEFAULT_STEPS_PER_PERIOD);
        if !(dt.is_finite() && dt > 0.0) {
            bail!("dt must be finite and positive, got {dt}");
        }
        self.dt = Some(dt);
        if !(self.periods.is_finite() && self.periods >= 1.0) {
            bail!("periods must be at least 1, got {}", self.periods);
        }
        if self.snapshots == 0 {
            bail!("snapshots must be at least 1");
        }
        if self.tracer_steps_per_period < 16 {
            bail!("tracer_steps_per_period must be at least 16");
        }
        if self.random_states == 0 {
            bail!("random_states must be at least 1");
        }
        if !(self.random_range.is_finite() && self.random_range >= 0.0) {
            bail!("random_range must be finite and non-negative");
        }
        if self.seed_points.iter().flatten().any(|c| !c.is_finite()) {
            bail!("seed points must be finite");
        }
        self.hydrogen.params()?;
        Ok(self)
    }

    pub fn params(&self) -> Result<PhysParams> {
        let spin = SpinSign::from_int(self.spin).context("invalid spin")?;
        PhysParams::new(self.hbar, self.mass, self.omega, spin).context("invalid physical parameters")
    }

    pub fn spec(&self) -> Result<CoherentStateSpec> {
        CoherentStateSpec::new(self.params()?, vec2(self.xi0), vec2(self.v0)).context("invalid initial state")
    }

    /// Only valid after `resolve`.
    pub fn grid(&self) -> Grid2D {
        Grid2D::new(self.half_extent.expect("resolved config"), self.grid_n).expect("resolved config")
    }

    pub fn dt(&self) -> f64 {
        self.dt.expect("resolved config")
    }

    pub fn duration(&self) -> Result<f64> {
        Ok(self.periods * self.params()?.period())
    }

    pub fn tracer_dt(&self) -> Result<f64> {
        Ok(self.params()?.period() / self.tracer_steps_per_period as f64)
    }
}

pub fn vec2(v: [f64; 2]) -> Vector2<f64> {
    Vector2::new(v[0], v[1])
}

/// Parses `X,Y`.
pub fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => {
            let x: f64 = x.parse().map_err(|e| format!("bad number {x:?}: {e}"))?;
            let y: f64 = y.parse().map_err(|e| format!("bad number {y:?}: {e}"))?;
            Ok([x, y])
        }
        _ => Err(format!("expected X,Y, got {s:?}")),
    }
}
