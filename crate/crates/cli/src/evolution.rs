//! The split-step run shared by `verify` and `evolve`.

use std::collections::BTreeMap;

use anyhow::Result;
use coherent_top::analytic::coherent_state_field;
use coherent_top::evolve::{energy_expectation, EvolveConfig, SplitStepper};
use coherent_top::{CoherentStateSpec, ComplexField, Grid2D};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub step: usize,
    pub t: f64,
    pub relative_l2_error: f64,
    pub norm: f64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub config: EvolveConfig,
    /// Every `stride` steps, plus the final step.
    pub series: Vec<SeriesRow>,
    /// Numeric fields at the requested steps.
    pub captured: BTreeMap<usize, ComplexField>,
}

impl EvolutionRun {
    pub fn last(&self) -> SeriesRow {
        *self.series.last().expect("series holds step 0")
    }
}

pub fn run_evolution(
    spec: &CoherentStateSpec,
    grid: Grid2D,
    dt: f64,
    duration: f64,
    capture: &[usize],
    series_points: usize,
) -> Result<EvolutionRun> {
    let config = EvolveConfig::covering(grid, dt, duration, spec.params)?;
    let psi0 = coherent_state_field(spec, grid, 0.0)?;
    let mut stepper = SplitStepper::new(&psi0, &config)?;
    let stride = (config.steps / series_points.max(1)).max(1);
    let mut series = Vec::new();
    let mut captured = BTreeMap::new();
    let record = |stepper: &SplitStepper, series: &mut Vec<SeriesRow>| -> Result<()> {
        let psi = stepper.snapshot();
        let t = stepper.time();
        let exact = coherent_state_field(spec, grid, t)?;
        series.push(SeriesRow {
            step: stepper.steps_taken(),
            t,
            relative_l2_error: psi.relative_l2_error(&exact)?,
            norm: psi.norm_sqr(),
            energy: energy_expectation(&psi, &spec.params),
        });
        Ok(())
    };
    loop {
        let k = stepper.steps_taken();
        if capture.contains(&k) {
            captured.insert(k, stepper.snapshot());
        }
        if k % stride == 0 || k == config.steps {
            record(&stepper, &mut series)?;
        }
        if k == config.steps {
            break;
        }
        stepper.step();
    }
    Ok(EvolutionRun {
        config,
        series,
        captured,
    })
}
