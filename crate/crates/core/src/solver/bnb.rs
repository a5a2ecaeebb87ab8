use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::greedy::greedy_assignment;
use super::relaxation::{solve_relaxation_with, BnBNode, RelaxationOptions};
use super::{solve_fixed, SolverOptions};
use crate::error::{Error, Result};
use crate::model::{build_program, ObjectiveKind, ProblemSpec, Solution, SolveStats};

struct Queued {
    bound: f64,
    seq: usize,
    node: BnBNode,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // max-heap: larger bound first, then older node first
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Incumbent {
    value: f64,
    x: Vec<bool>,
    a: Vec<f64>,
}

/// Rounds a relaxed point to an assignment that respects the beam budgets:
/// fixed links first, then free links by decreasing relaxed indicator.
/// `None` if the relaxed point is already integral on the free links.
fn round_relaxation(spec: &ProblemSpec, node: &BnBNode, x: &[f64]) -> Option<Vec<bool>> {
    let r = spec.num_relays();
    let (mut beams_source, mut beams_relay) = spec.effective_beams();
    let mut out = vec![false; x.len()];
    let mut free: Vec<usize> = Vec::new();
    let mut integral = true;
    for p in 0..x.len() {
        match node.fixed[p] {
            Some(true) => {
                out[p] = true;
                beams_source[p / r] -= 1;
                beams_relay[p % r] -= 1;
            }
            Some(false) => {}
            None => {
                if x[p] > 1e-9 {
                    free.push(p);
                    integral &= x[p] >= 1.0 - 1e-9;
                }
            }
        }
    }
    if integral {
        return None;
    }
    free.sort_by(|&p, &q| x[q].total_cmp(&x[p]).then(p.cmp(&q)));
    for p in free {
        let (i, j) = (p / r, p % r);
        if beams_source[i] > 0 && beams_relay[j] > 0 {
            out[p] = true;
            beams_source[i] -= 1;
            beams_relay[j] -= 1;
        }
    }
    Some(out)
}

/// Best-bound-first branch-and-bound over the link indicators.
///
/// Each node is bounded by its continuous relaxation; the most fractional
/// free indicator (lowest index on ties) is branched on, the `x = 1` child
/// first. Integral relaxations are re-solved with the assignment fixed to
/// obtain exact rates. Returns an infeasible solution when no assignment
/// satisfies the lower bounds and [`Error::Resource`] once the node budget
/// is spent.
pub fn branch_and_bound(spec: &ProblemSpec, opts: &SolverOptions) -> Result<Solution> {
    search(spec, opts, false)
}

/// Some assignment meeting every constraint of `spec`, or `None` when there
/// is none. The search is the same branch-and-bound, guided by the linear
/// sum-rate objective and stopped at the first feasible point; the returned
/// rates are optimal for that point under `spec`'s own objective.
pub fn find_feasible(spec: &ProblemSpec, opts: &SolverOptions) -> Result<Option<Solution>> {
    spec.validate()?;
    let guide = match spec.objective {
        ObjectiveKind::Vqm => spec.with_objective(ObjectiveKind::Srm),
        _ => spec.clone(),
    };
    let found = search(&guide, opts, true)?;
    if !found.is_optimal() {
        return Ok(None);
    }
    let sol = super::solve_with_assignment(spec, &found.x)?;
    Ok(sol.is_optimal().then(|| Solution { stats: found.stats, ..sol }))
}

fn search(spec: &ProblemSpec, opts: &SolverOptions, first_only: bool) -> Result<Solution> {
    spec.validate()?;
    opts.validate()?;
    let program = build_program(spec);
    let n = program.num_pairs();
    let mut stats = SolveStats::default();

    let mut incumbent: Option<Incumbent> = None;
    if opts.warm_start {
        let x = greedy_assignment(spec);
        if let Some((a, value, lps)) = solve_fixed(&program, &x)? {
            stats.lp_solves += lps;
            incumbent = Some(Incumbent { value, x, a });
        }
    }
    // Feasibility does not depend on the objective and the linear version
    // finds a feasible assignment far faster when the bounds are tight.
    let bounded = spec.lower_bounds_gbps.iter().any(|&l| l > 0.0);
    if opts.warm_start && incumbent.is_none() && bounded && spec.objective == ObjectiveKind::Vqm {
        let linear = search(&spec.with_objective(ObjectiveKind::Srm), opts, true)?;
        stats.nodes += linear.stats.nodes;
        stats.lp_solves += linear.stats.lp_solves;
        if !linear.is_optimal() {
            return Ok(Solution::infeasible(spec, stats));
        }
        let x: Vec<bool> = linear.x.iter().flatten().map(|&v| v == 1).collect();
        if let Some((a, value, lps)) = solve_fixed(&program, &x)? {
            stats.lp_solves += lps;
            incumbent = Some(Incumbent { value, x, a });
        }
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    heap.push(Queued { bound: f64::INFINITY, seq, node: BnBNode::root(n) });
    let threshold = |inc: &Option<Incumbent>| inc.as_ref().map_or(f64::NEG_INFINITY, |i| i.value + opts.prune_tol);

    while let Some(Queued { bound, node, .. }) = heap.pop() {
        if first_only && incumbent.is_some() {
            break;
        }
        if bound <= threshold(&incumbent) {
            continue;
        }
        stats.nodes += 1;
        if stats.nodes > opts.node_budget {
            return Err(Error::Resource { budget: "branch-and-bound node", limit: opts.node_budget });
        }
        let mut ropts = RelaxationOptions::new(opts.relaxation, opts.relaxation_gap);
        ropts.cutoff = threshold(&incumbent);
        let rel = solve_relaxation_with(&program, &node, &ropts)?;
        stats.lp_solves += rel.lp_solves;
        if !rel.feasible {
            continue;
        }
        let bound = rel.upper_bound.min(node.parent_bound);
        if bound <= threshold(&incumbent) {
            continue;
        }
        if let Some(x) = round_relaxation(spec, &node, &rel.x) {
            if let Some((a, value, lps)) = solve_fixed(&program, &x)? {
                stats.lp_solves += lps;
                if incumbent.as_ref().map_or(true, |i| value > i.value) {
                    incumbent = Some(Incumbent { value, x, a });
                }
            }
            if bound <= threshold(&incumbent) {
                continue;
            }
        }

        let mut branch: Option<(usize, f64)> = None;
        for p in 0..n {
            if node.fixed[p].is_some() {
                continue;
            }
            let frac = (rel.x[p] - rel.x[p].round()).abs();
            if frac > opts.integrality_tol && branch.map_or(true, |(_, f)| frac > f) {
                branch = Some((p, frac));
            }
        }

        match branch {
            None => {
                let x: Vec<bool> = (0..n).map(|p| node.fixed[p].unwrap_or(rel.x[p] > 0.5)).collect();
                if let Some((a, value, lps)) = solve_fixed(&program, &x)? {
                    stats.lp_solves += lps;
                    if incumbent.as_ref().map_or(true, |i| value > i.value) {
                        incumbent = Some(Incumbent { value, x: x.clone(), a });
                    }
                }
                // the relaxation may still be loose where it rounds to this
                // assignment; split on the first free indicator if so
                let inc_value = incumbent.as_ref().map_or(f64::NEG_INFINITY, |i| i.value);
                if bound > inc_value + opts.prune_tol.max(opts.relaxation_gap) {
                    if let Some(p) = (0..n).find(|&p| node.fixed[p].is_none()) {
                        for v in [true, false] {
                            let child = node.child(p, v, bound);
                            if child.consistent(&program) {
                                seq += 1;
                                heap.push(Queued { bound, seq, node: child });
                            }
                        }
                    }
                }
            }
            Some((p, _)) => {
                for v in [true, false] {
                    let child = node.child(p, v, bound);
                    if child.consistent(&program) {
                        seq += 1;
                        heap.push(Queued { bound, seq, node: child });
                    }
                }
            }
        }
    }

    Ok(match incumbent {
        None => Solution::infeasible(spec, stats),
        Some(inc) => {
            let r = spec.num_relays();
            let x = inc.x.chunks(r).map(|row| row.iter().map(|&b| u8::from(b)).collect()).collect();
            let a = inc.a.chunks(r).map(<[f64]>::to_vec).collect();
            Solution::from_assignment(spec, x, a, stats)
        }
    })
}
