use rayon::prelude::*;

use super::{generate_instance, Setting, SimulationConfig};
use crate::error::{Error, Result};
use crate::model::{ObjectiveKind, ProblemSpec};
use crate::solver::find_feasible;

/// Lower bounds 0, 0.1, ..., 1.5 Gbit/s.
pub const DEFAULT_OUTAGE_GRID: &str = "0:1.5:0.1";

/// Outage probability of one scheme along the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageSeries {
    pub objective: ObjectiveKind,
    pub setting: Setting,
    /// One probability per grid point.
    pub outage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageCurve {
    /// Strictly increasing lower bounds, Gbit/s.
    pub grid: Vec<f64>,
    pub series: Vec<OutageSeries>,
}

impl OutageCurve {
    pub fn series(&self, objective: ObjectiveKind, setting: Setting) -> Option<&OutageSeries> {
        self.series.iter().find(|s| s.objective == objective && s.setting == setting)
    }
}

/// Parses `start:stop:step` (inclusive of `stop` up to rounding) or a
/// comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::Parse { what: "lower-bound grid".into(), msg };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("expected start:stop:step, got {text:?}")));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(bad(format!("empty or unbounded range {text:?}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // round to the step's decimal resolution so 0.1 steps print cleanly
        (0..count).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(bad("lower bounds must be finite and non-negative".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("grid must be strictly increasing".into()));
    }
    Ok(grid)
}

/// Checks every trial at every lower bound in `grid` for every configured
/// objective. A trial is an outage when no assignment meets the bound or
/// some source receives less than it. Outage is a property of the
/// constraints alone, so each check stops at the first feasible assignment
/// instead of optimizing; objectives sharing constraints share outcomes.
pub fn outage_sweep(cfg: &SimulationConfig, grid: &[f64]) -> Result<OutageCurve> {
    cfg.validate()?;
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::invalid("grid must be non-empty, non-negative and strictly increasing"));
    }
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..cfg.trials).map(move |t| (g, t))).collect();
    let outcomes: Vec<Result<Vec<bool>>> = jobs
        .par_iter()
        .map(|&(g, t)| {
            let bound = grid[g];
            let wrap = |e: Error| Error::Trial { trial: t, source: Box::new(e) };
            let instance = generate_instance(cfg, t).map_err(wrap)?;
            let base = ProblemSpec::uniform(instance, bound, ObjectiveKind::Vqm).map_err(wrap)?;
            let base = ProblemSpec { quality: cfg.quality, ..base };
            cfg.objectives
                .iter()
                .map(|&objective| {
                    let found = find_feasible(&base.with_objective(objective), &cfg.solver).map_err(wrap)?;
                    Ok(found.map_or(true, |sol| sol.per_source_rate.iter().any(|&rate| rate < bound - 1e-9)))
                })
                .collect()
        })
        .collect();

    let mut counts = vec![vec![0usize; grid.len()]; cfg.objectives.len()];
    for (&(g, _), outcome) in jobs.iter().zip(outcomes) {
        for (k, out) in outcome?.into_iter().enumerate() {
            counts[k][g] += usize::from(out);
        }
    }
    let series = cfg
        .objectives
        .iter()
        .zip(counts)
        .map(|(&objective, c)| OutageSeries {
            objective,
            setting: cfg.setting,
            outage: c.into_iter().map(|n| n as f64 / cfg.trials as f64).collect(),
        })
        .collect();
    Ok(OutageCurve { grid: grid.to_vec(), series })
}
