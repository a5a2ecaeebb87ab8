use rayon::prelude::*;

use super::{generate_instance, Setting, SimulationConfig};
use crate::error::{Error, Result};
use crate::model::{ObjectiveKind, ProblemSpec};
use crate::solver::branch_and_bound;

/// Outcome of one scheme on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub feasible: bool,
    /// Objective value at the optimum (0 when infeasible).
    pub objective_value: f64,
    /// `Σ_ij f_q(a_ij / 2)` at the scheme's optimum (0 when infeasible).
    pub aggregate_quality: f64,
    /// `Σ_i f_q(Σ_j a_ij / 2)` at the scheme's optimum.
    pub source_quality: f64,
    /// Delivered rate per source, Gbit/s.
    pub per_source_rate: Vec<f64>,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResults {
    pub objective: ObjectiveKind,
    /// In trial order.
    pub records: Vec<TrialRecord>,
}

impl SchemeResults {
    /// Aggregate qualities, ascending.
    pub fn cdf_samples(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.records.iter().map(|r| r.aggregate_quality).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn mean_quality(&self) -> f64 {
        mean(self.records.iter().map(|r| r.aggregate_quality))
    }

    pub fn mean_source_quality(&self) -> f64 {
        mean(self.records.iter().map(|r| r.source_quality))
    }

    pub fn feasible_fraction(&self) -> f64 {
        mean(self.records.iter().map(|r| if r.feasible { 1.0 } else { 0.0 }))
    }
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    values.sum::<f64>() / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResults {
    pub setting: Setting,
    pub num_sources: usize,
    pub num_relays: usize,
    pub trials: usize,
    /// One entry per configured objective, in configuration order.
    pub schemes: Vec<SchemeResults>,
}

impl TrialResults {
    pub fn scheme(&self, objective: ObjectiveKind) -> Option<&SchemeResults> {
        self.schemes.iter().find(|s| s.objective == objective)
    }
}

pub(crate) fn solve_trial(cfg: &SimulationConfig, trial: usize, lower_bound: f64) -> Result<Vec<TrialRecord>> {
    let wrap = |e: Error| Error::Trial { trial, source: Box::new(e) };
    let instance = generate_instance(cfg, trial).map_err(wrap)?;
    let base = ProblemSpec::uniform(instance, lower_bound, ObjectiveKind::Vqm).map_err(wrap)?;
    let base = ProblemSpec { quality: cfg.quality, ..base };
    cfg.objectives
        .iter()
        .map(|&objective| {
            let spec = base.with_objective(objective);
            let sol = branch_and_bound(&spec, &cfg.solver).map_err(wrap)?;
            Ok(TrialRecord {
                trial,
                feasible: sol.is_optimal(),
                objective_value: sol.objective_value,
                aggregate_quality: sol.aggregate_quality(),
                source_quality: if sol.is_optimal() { sol.source_quality(&spec) } else { 0.0 },
                per_source_rate: sol.per_source_rate.clone(),
                nodes: sol.stats.nodes,
            })
        })
        .collect()
}

/// Solves every trial for every configured objective. Trials run in
/// parallel; the results are identical to a sequential run. The first
/// failing trial (by index) aborts the run with its index attached.
pub fn run_trials(cfg: &SimulationConfig) -> Result<TrialResults> {
    cfg.validate()?;
    let per_trial: Vec<Result<Vec<TrialRecord>>> =
        (0..cfg.trials).into_par_iter().map(|t| solve_trial(cfg, t, cfg.lower_bound_gbps)).collect();
    let mut schemes: Vec<SchemeResults> =
        cfg.objectives.iter().map(|&objective| SchemeResults { objective, records: Vec::with_capacity(cfg.trials) }).collect();
    for records in per_trial {
        for (scheme, record) in schemes.iter_mut().zip(records?) {
            scheme.records.push(record);
        }
    }
    Ok(TrialResults {
        setting: cfg.setting,
        num_sources: cfg.num_sources,
        num_relays: cfg.num_relays,
        trials: cfg.trials,
        schemes,
    })
}

/// Empirical CDF as `(value, P(X ≤ value))` at each distinct sample value,
/// ascending.
pub fn compute_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::Domain("empirical CDF of no samples".into()));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN sample".into()));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (k, &x) in v.iter().enumerate() {
        let p = (k + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = p,
            _ => out.push((x, p)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_counts_ties() {
        let cdf = compute_cdf(&[2.0, 1.0, 4.0, 2.0]).unwrap();
        assert_eq!(cdf, vec![(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]);
        assert_eq!(compute_cdf(&[5.0]).unwrap(), vec![(5.0, 1.0)]);
        assert!(matches!(compute_cdf(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn single_trial_single_link() {
        let cfg = SimulationConfig {
            num_sources: 1,
            num_relays: 1,
            trials: 1,
            objectives: vec![ObjectiveKind::Vqm],
            ..Default::default()
        };
        let res = run_trials(&cfg).unwrap();
        assert_eq!(res.schemes.len(), 1);
        let rec = &res.schemes[0].records[0];
        assert!(rec.feasible);
        assert_eq!(res.schemes[0].mean_quality(), rec.aggregate_quality);
        assert!(rec.aggregate_quality > 0.0 && rec.aggregate_quality <= 1.0);
    }
}
