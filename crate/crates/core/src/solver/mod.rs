//! Exact solution of the link-selection program.
//!
//! [`branch_and_bound`] is the production solver; [`enumerate_oracle`]
//! checks it on small instances by trying every feasible link assignment.

mod bnb;
mod greedy;
pub mod lp;
mod oracle;
mod relaxation;
mod simplex;

pub use bnb::{branch_and_bound, find_feasible};
pub use greedy::greedy_incumbent;
pub use lp::{solve_lp, LinearProgram, LpOutcome, LpRow, LpSolution};
pub use oracle::{enumerate_oracle, ORACLE_MAX_PAIRS};
pub use relaxation::{
    solve_relaxation, solve_relaxation_with, BnBNode, RelaxationMethod, RelaxationOptions, RelaxationResult,
};

use crate::error::{Error, Result};
use crate::model::{build_program, MixedIntegerConvexProgram, ProblemSpec, Solution, SolveStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub relaxation: RelaxationMethod,
    /// Certified gap each node relaxation is solved to.
    pub relaxation_gap: f64,
    /// Indicators within this distance of 0 or 1 count as integral.
    pub integrality_tol: f64,
    /// Nodes whose bound does not beat the incumbent by more than this are
    /// pruned.
    pub prune_tol: f64,
    pub node_budget: usize,
    /// Seed the search with the greedy assignment.
    pub warm_start: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            relaxation: RelaxationMethod::PerspectiveColumns,
            relaxation_gap: 1e-7,
            integrality_tol: 1e-6,
            prune_tol: 1e-6,
            node_budget: 1_000_000,
            warm_start: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.relaxation_gap) || !positive(self.integrality_tol) || !(self.prune_tol >= 0.0) {
            return Err(Error::invalid("solver tolerances must be positive and finite"));
        }
        if self.integrality_tol >= 0.5 {
            return Err(Error::invalid("integrality tolerance must be below 0.5"));
        }
        if self.node_budget == 0 {
            return Err(Error::invalid("node budget must be positive"));
        }
        Ok(())
    }
}

/// Gap the rates of a fixed link assignment are polished to.
const POLISH_GAP: f64 = 1e-10;

/// Optimal rates for a fixed link assignment, or `None` if the assignment
/// admits no feasible rates. Returns `(rates, objective, lp solves)`.
pub(crate) fn solve_fixed(program: &MixedIntegerConvexProgram, x: &[bool]) -> Result<Option<(Vec<f64>, f64, usize)>> {
    let mut opts = RelaxationOptions::new(RelaxationMethod::PerspectiveColumns, POLISH_GAP);
    opts.max_iterations = 2000;
    let r = solve_relaxation_with(program, &BnBNode::leaf(x), &opts)?;
    if !r.feasible {
        return Ok(None);
    }
    let a: Vec<f64> = (0..x.len())
        .map(|p| if x[p] { r.a[p].clamp(0.0, program.vars[program.rate_var(p)].upper) } else { 0.0 })
        .collect();
    let value = a.iter().map(|&v| program.objective.link_value(v)).sum();
    Ok(Some((a, value, r.lp_solves)))
}

/// Optimal rates for a given link assignment `x[i][j]`. The solution is
/// infeasible when the assignment breaks a beam budget or cannot meet the
/// lower bounds.
pub fn solve_with_assignment(spec: &ProblemSpec, x: &[Vec<u8>]) -> Result<Solution> {
    spec.validate()?;
    let (s, r) = (spec.num_sources(), spec.num_relays());
    if x.len() != s || x.iter().any(|row| row.len() != r) {
        return Err(Error::invalid(format!("assignment must be {s}×{r}")));
    }
    if x.iter().flatten().any(|&v| v > 1) {
        return Err(Error::invalid("assignment entries must be 0 or 1"));
    }
    let flat: Vec<bool> = x.iter().flatten().map(|&v| v == 1).collect();
    let program = build_program(spec);
    let mut stats = SolveStats { nodes: 1, lp_solves: 0 };
    Ok(match solve_fixed(&program, &flat)? {
        None => Solution::infeasible(spec, stats),
        Some((a, _, lps)) => {
            stats.lp_solves = lps;
            Solution::from_assignment(spec, x.to_vec(), a.chunks(r).map(<[f64]>::to_vec).collect(), stats)
        }
    })
}
