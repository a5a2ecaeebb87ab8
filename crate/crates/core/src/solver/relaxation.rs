//! Continuous relaxations of the link-selection program at a branch-and-bound
//! node.
//!
//! Two methods are provided:
//!
//! * [`RelaxationMethod::PerspectiveColumns`] (default) bounds each link
//!   term by its perspective `x·φ(a/x)`, which coincides with `φ(a)` at
//!   binary `x` and is the tightest concave bound on the pair
//!   `{0 ≤ a ≤ A·x, x ∈ [0, 1]}`. The perspective is positively homogeneous,
//!   so the relaxation is a linear program over rays `(r, 1)` of each link,
//!   `r ∈ [0, Â]` where `Â` is the largest rate the link can carry (its
//!   capacity, capped by the relay's own destination link). Rays are generated on demand: the best ray of a link
//!   under the current row duals has a closed form, and the sum of positive
//!   reduced costs certifies the remaining duality gap.
//! * [`RelaxationMethod::FrankWolfe`] maximizes the program objective itself
//!   over the relaxed polytope with conditional-gradient steps, each step
//!   solving an LP over the node polytope. Weaker bound, slower convergence;
//!   kept as an independent cross-check.

use std::cmp::Ordering;

use super::simplex::{LpStatus, Simplex};
use crate::error::Result;
use crate::model::{MixedIntegerConvexProgram, ProgramObjective, RowKind, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelaxationMethod {
    #[default]
    PerspectiveColumns,
    FrankWolfe,
}

/// Partial assignment of the link indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct BnBNode {
    /// Per link `(i, j)` in row-major order: `None` free, `Some(b)` fixed.
    pub fixed: Vec<Option<bool>>,
    /// Bound inherited from the parent (`+∞` at the root).
    pub parent_bound: f64,
    pub depth: usize,
}

impl BnBNode {
    pub fn root(num_pairs: usize) -> Self {
        Self { fixed: vec![None; num_pairs], parent_bound: f64::INFINITY, depth: 0 }
    }

    /// Node with every indicator fixed.
    pub fn leaf(x: &[bool]) -> Self {
        Self { fixed: x.iter().map(|&b| Some(b)).collect(), parent_bound: f64::INFINITY, depth: x.len() }
    }

    pub fn child(&self, pair: usize, value: bool, bound: f64) -> Self {
        let mut fixed = self.fixed.clone();
        fixed[pair] = Some(value);
        Self { fixed, parent_bound: bound, depth: self.depth + 1 }
    }

    /// Whether the indicators fixed to one fit every `≤` row over the
    /// indicators (the beam budgets).
    pub fn consistent(&self, program: &MixedIntegerConvexProgram) -> bool {
        let n = program.num_pairs();
        program.rows.iter().filter(|r| r.sense == Sense::Le).all(|row| {
            let mut lhs = 0.0;
            for &(k, c) in &row.coeffs {
                if k < n {
                    return true;
                }
                if self.fixed[k - n] == Some(true) {
                    lhs += c;
                }
            }
            lhs <= row.rhs + 1e-9
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationOptions {
    pub method: RelaxationMethod,
    /// Stop once the certified gap is at most this.
    pub eps_gap: f64,
    /// Column-generation rounds or Frank–Wolfe steps.
    pub max_iterations: usize,
    /// Stop early once the upper bound drops to this value.
    pub cutoff: f64,
}

impl RelaxationOptions {
    pub fn new(method: RelaxationMethod, eps_gap: f64) -> Self {
        let max_iterations = match method {
            RelaxationMethod::PerspectiveColumns => 500,
            RelaxationMethod::FrankWolfe => 20_000,
        };
        Self { method, eps_gap, max_iterations, cutoff: f64::NEG_INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationResult {
    /// Link rates of the relaxed point.
    pub a: Vec<f64>,
    /// Relaxed link indicators in `[0, 1]`.
    pub x: Vec<f64>,
    /// Relaxation objective at the point.
    pub value: f64,
    /// Certified upper bound on the node's relaxation (and hence on every
    /// integer point below the node).
    pub upper_bound: f64,
    /// `upper_bound - value`, never negative.
    pub gap: f64,
    pub iterations: usize,
    pub lp_solves: usize,
    pub feasible: bool,
    /// False when the iteration cap stopped the method before the gap (or the
    /// cutoff) was reached; the upper bound is still valid.
    pub converged: bool,
}

impl RelaxationResult {
    fn infeasible(n: usize, iterations: usize, lp_solves: usize) -> Self {
        Self {
            a: vec![0.0; n],
            x: vec![0.0; n],
            value: f64::NEG_INFINITY,
            upper_bound: f64::NEG_INFINITY,
            gap: 0.0,
            iterations,
            lp_solves,
            feasible: false,
            converged: true,
        }
    }
}

/// Relaxation with the default method.
pub fn solve_relaxation(program: &MixedIntegerConvexProgram, node: &BnBNode, eps_gap: f64) -> Result<RelaxationResult> {
    solve_relaxation_with(program, node, &RelaxationOptions::new(RelaxationMethod::default(), eps_gap))
}

pub fn solve_relaxation_with(
    program: &MixedIntegerConvexProgram,
    node: &BnBNode,
    opts: &RelaxationOptions,
) -> Result<RelaxationResult> {
    if !node.consistent(program) {
        return Ok(RelaxationResult::infeasible(program.num_pairs(), 0, 0));
    }
    match opts.method {
        RelaxationMethod::PerspectiveColumns => perspective(program, node, opts),
        RelaxationMethod::FrankWolfe => frank_wolfe(program, node, opts),
    }
}

/// Ray maximizing `φ(r) - price·r` over `[0, r_max]`.
fn best_ray(objective: &ProgramObjective, price: f64, r_max: f64) -> f64 {
    let score = |r: f64| objective.link_value(r) - price * r;
    let mut candidates = vec![0.0, r_max];
    if let ProgramObjective::LinkQuality(q) = objective {
        let smooth_end = r_max.min(q.saturation_rate());
        candidates.push(smooth_end);
        if price > 0.0 {
            // φ'(r) = 1 / ((r + 2) ln(1 + a_max))
            let stationary = 1.0 / (price * q.a_max_gbps.ln_1p()) - 2.0;
            candidates.push(stationary.clamp(0.0, smooth_end));
        }
    }
    candidates
        .into_iter()
        .max_by(|&p, &q| score(p).total_cmp(&score(q)).then_with(|| q.total_cmp(&p)))
        .unwrap()
}

struct Master {
    simplex: Simplex,
    /// Per pair, `(master row, a coefficient, x coefficient)`.
    entries: Vec<Vec<(usize, f64, f64)>>,
    /// Per pair, `(ray, variable index)` of generated columns.
    columns: Vec<Vec<(f64, usize)>>,
    active: Vec<bool>,
    /// Largest rate a link can carry at any integer point: its capacity,
    /// its variable cap, and whatever single `≤` rows over non-negative
    /// variables imply (a relay's link to the destination).
    ray_max: Vec<f64>,
}

impl Master {
    /// `None` when the node is infeasible by the lower-bound link counts.
    fn build(program: &MixedIntegerConvexProgram, node: &BnBNode) -> Option<Self> {
        let n = program.num_pairs();
        let mut rows: Vec<(Sense, f64)> = Vec::new();
        let mut entries: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); n];
        let mut active: Vec<bool> = node.fixed.iter().map(|f| *f != Some(false)).collect();

        let mut x_capped = vec![false; n];
        let mut ray_max: Vec<f64> =
            (0..n).map(|p| program.link_capacity[p].min(program.vars[program.rate_var(p)].upper)).collect();
        for row in &program.rows {
            if row.sense == Sense::Le && row.coeffs.iter().all(|&(k, c)| c >= 0.0 && program.vars[k].lower >= 0.0) {
                for &(k, c) in &row.coeffs {
                    if k < n && c > 0.0 {
                        ray_max[k] = ray_max[k].min(row.rhs.max(0.0) / c);
                    }
                }
            }
        }
        let min_links = link_count_cuts(program, node, &ray_max, &mut active)?;
        for row in &program.rows {
            if let RowKind::Coupling { .. } = row.kind {
                continue;
            }
            // rows with only non-negative coefficients and a non-positive
            // requirement are satisfied by any non-negative point
            if row.sense == Sense::Ge && row.rhs <= 0.0 && row.coeffs.iter().all(|&(_, c)| c >= 0.0) {
                continue;
            }
            let idx = rows.len();
            rows.push((row.sense, row.rhs));
            let only_x = row.coeffs.iter().all(|&(k, c)| k >= n && c == 1.0);
            for &(k, c) in &row.coeffs {
                let (pair, is_rate) = if k < n { (k, true) } else { (k - n, false) };
                if !active[pair] {
                    continue;
                }
                match entries[pair].last_mut() {
                    Some(e) if e.0 == idx => {
                        if is_rate { e.1 += c } else { e.2 += c }
                    }
                    _ => entries[pair].push(if is_rate { (idx, c, 0.0) } else { (idx, 0.0, c) }),
                }
                if !is_rate && only_x && row.sense == Sense::Le && row.rhs < 2.0 {
                    x_capped[k - n] = true;
                }
            }
        }
        for p in 0..n {
            if !active[p] {
                continue;
            }
            let fixed_one = node.fixed[p] == Some(true);
            if fixed_one || !x_capped[p] {
                let idx = rows.len();
                rows.push((if fixed_one { Sense::Eq } else { Sense::Le }, 1.0));
                entries[p].push((idx, 0.0, 1.0));
            }
        }
        for (coeffs, rhs) in min_links {
            let idx = rows.len();
            rows.push((Sense::Ge, rhs));
            for (p, c) in coeffs {
                entries[p].push((idx, 0.0, c));
            }
        }
        Some(Self { simplex: Simplex::new(&rows), entries, columns: vec![Vec::new(); n], active, ray_max })
    }

    fn add_ray(&mut self, objective: &ProgramObjective, pair: usize, r: f64) {
        let coeffs: Vec<(usize, f64)> = self.entries[pair]
            .iter()
            .map(|&(row, ca, cx)| (row, ca * r + cx))
            .filter(|&(_, c)| c != 0.0)
            .collect();
        let var = self.simplex.add_column(objective.link_value(r), coeffs, 0.0, f64::INFINITY);
        self.columns[pair].push((r, var));
    }

    fn point(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.columns.len();
        let mut a = vec![0.0; n];
        let mut x = vec![0.0; n];
        for p in 0..n {
            for &(r, var) in &self.columns[p] {
                let w = self.simplex.value(var).max(0.0);
                a[p] += r * w;
                x[p] += w;
            }
            x[p] = x[p].min(1.0);
        }
        (a, x)
    }
}

/// Strengthens the relaxation with what the beam budget implies for a
/// source with a positive lower bound `L` and `B` beams:
///
/// * a link whose cap plus the best `B - 1` other caps falls short of `L`
///   can never be used and is switched off;
/// * at least `k` links are needed, `k` being the fewest caps reaching `L`;
/// * a link that cannot reach `L` on its own needs a partner: some other
///   link that, with the best `B - 2` remaining caps, closes the gap. So
///   `x_p ≤ Σ x_partner`.
///
/// Returns `≥` rows over link indicators, or `None` if the node is
/// infeasible.
fn link_count_cuts(
    program: &MixedIntegerConvexProgram,
    node: &BnBNode,
    ray_max: &[f64],
    active: &mut [bool],
) -> Option<Vec<(Vec<(usize, f64)>, f64)>> {
    const TOL: f64 = 1e-9;
    let n = program.num_pairs();
    let mut beams = vec![f64::INFINITY; program.num_sources];
    for row in &program.rows {
        if let RowKind::SourceBeams { source } = row.kind {
            beams[source] = row.rhs;
        }
    }
    // sum of the `take` largest caps in `sorted`, skipping the listed pairs
    let top = |sorted: &[(f64, usize)], skip: &[usize], take: usize| -> f64 {
        sorted.iter().filter(|(_, p)| !skip.contains(p)).take(take).map(|(c, _)| c).sum()
    };
    let mut cuts = Vec::new();
    for row in &program.rows {
        let RowKind::LowerBound { source } = row.kind else { continue };
        if row.sense != Sense::Ge || row.rhs <= TOL {
            continue;
        }
        let need = row.rhs - TOL;
        let budget = beams[source].max(0.0).floor().min(program.num_relays as f64) as usize;
        let mut pairs: Vec<usize> = row.coeffs.iter().map(|&(k, _)| k).filter(|&k| k < n && active[k]).collect();
        let sorted = loop {
            let mut sorted: Vec<(f64, usize)> = pairs.iter().map(|&p| (ray_max[p], p)).collect();
            sorted.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            if top(&sorted, &[], budget) < need {
                return None;
            }
            let dead: Vec<usize> =
                pairs.iter().copied().filter(|&p| ray_max[p] + top(&sorted, &[p], budget.saturating_sub(1)) < need).collect();
            if dead.is_empty() {
                break sorted;
            }
            for p in dead {
                if node.fixed[p] == Some(true) {
                    return None;
                }
                active[p] = false;
            }
            pairs.retain(|&p| active[p]);
        };

        let mut acc = 0.0;
        let k = sorted
            .iter()
            .take_while(|&&(c, _)| {
                let short = acc < need;
                acc += c;
                short
            })
            .count();
        if k > 0 {
            cuts.push((pairs.iter().map(|&p| (p, 1.0)).collect(), k as f64));
        }
        for &p in &pairs {
            if ray_max[p] >= need {
                continue;
            }
            let partners: Vec<usize> = pairs
                .iter()
                .copied()
                .filter(|&q| q != p && ray_max[p] + ray_max[q] + top(&sorted, &[p, q], budget.saturating_sub(2)) >= need)
                .collect();
            // with every other link a partner, `Σ x ≥ 2` already implies it
            if k < 2 || partners.len() + 1 < pairs.len() {
                let mut coeffs: Vec<(usize, f64)> = partners.into_iter().map(|q| (q, 1.0)).collect();
                coeffs.push((p, -1.0));
                cuts.push((coeffs, 0.0));
            }
        }
    }
    Some(cuts)
}

fn perspective(program: &MixedIntegerConvexProgram, node: &BnBNode, opts: &RelaxationOptions) -> Result<RelaxationResult> {
    let n = program.num_pairs();
    let objective = &program.objective;
    let Some(mut master) = Master::build(program, node) else {
        return Ok(RelaxationResult::infeasible(n, 0, 0));
    };
    for p in 0..n {
        if !master.active[p] {
            continue;
        }
        let cap = master.ray_max[p];
        master.add_ray(objective, p, 0.0);
        if cap > 0.0 {
            master.add_ray(objective, p, cap);
            if let ProgramObjective::LinkQuality(q) = objective {
                let sat = q.saturation_rate();
                if sat < cap {
                    master.add_ray(objective, p, sat);
                }
                // interior ray close to where unsaturated optima tend to sit
                let mid = 0.5 * cap.min(sat);
                master.add_ray(objective, p, mid);
            }
        }
    }
    let mut lp_solves = 1;
    if master.simplex.solve()? == LpStatus::Infeasible {
        return Ok(RelaxationResult::infeasible(n, 0, lp_solves));
    }

    let mut iterations = 0;
    loop {
        iterations += 1;
        let y = master.simplex.duals();
        let lp_value = master.simplex.objective();
        let mut slack = 0.0;
        let mut new_rays = Vec::new();
        for p in 0..n {
            if !master.active[p] {
                continue;
            }
            let (mut price_a, mut price_x) = (0.0, 0.0);
            for &(row, ca, cx) in &master.entries[p] {
                price_a += y[row] * ca;
                price_x += y[row] * cx;
            }
            let r = best_ray(objective, price_a, master.ray_max[p]);
            let rc = objective.link_value(r) - price_a * r - price_x;
            if rc > 0.0 {
                slack += rc;
                let known = master.columns[p].iter().any(|&(s, _)| (s - r).abs() <= 1e-9 * (1.0 + r));
                if rc > 1e-13 && !known {
                    new_rays.push((p, r));
                }
            }
        }
        let upper = lp_value + slack;
        let (a, x) = master.point();
        let value = perspective_value(objective, &a, &x).max(lp_value);
        let gap = (upper - value).max(0.0);
        let done = gap <= opts.eps_gap || upper <= opts.cutoff || new_rays.is_empty();
        if done || iterations >= opts.max_iterations {
            return Ok(RelaxationResult {
                a,
                x,
                value,
                upper_bound: upper.max(value),
                gap,
                iterations,
                lp_solves,
                feasible: true,
                converged: done,
            });
        }
        for (p, r) in new_rays {
            master.add_ray(objective, p, r);
        }
        lp_solves += 1;
        master.simplex.reoptimize()?;
    }
}

fn perspective_value(objective: &ProgramObjective, a: &[f64], x: &[f64]) -> f64 {
    a.iter()
        .zip(x)
        .map(|(&a, &x)| if x > 0.0 { x * objective.link_value(a / x) } else { 0.0 })
        .sum()
}

fn frank_wolfe(program: &MixedIntegerConvexProgram, node: &BnBNode, opts: &RelaxationOptions) -> Result<RelaxationResult> {
    let n = program.num_pairs();
    let objective = &program.objective;
    let rows: Vec<(Sense, f64)> = program.rows.iter().map(|r| (r.sense, r.rhs)).collect();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); 2 * n];
    for (i, row) in program.rows.iter().enumerate() {
        for &(k, c) in &row.coeffs {
            cols[k].push((i, c));
        }
    }
    let mut simplex = Simplex::new(&rows);
    let mut ids = Vec::with_capacity(2 * n);
    for (k, col) in cols.into_iter().enumerate() {
        let var = &program.vars[k];
        let (lo, up) = if k >= n {
            match node.fixed[k - n] {
                Some(true) => (1.0, 1.0),
                Some(false) => (0.0, 0.0),
                None => (var.lower, var.upper),
            }
        } else if node.fixed[k] == Some(false) {
            (0.0, 0.0)
        } else {
            (var.lower, var.upper)
        };
        let cost = if k < n { objective.link_slope(0.0) } else { 0.0 };
        ids.push(simplex.add_column(cost, col, lo, up));
    }
    let mut lp_solves = 1;
    if simplex.solve()? == LpStatus::Infeasible {
        return Ok(RelaxationResult::infeasible(n, 0, lp_solves));
    }
    let mut point: Vec<f64> = ids.iter().map(|&id| simplex.value(id)).collect();
    let eval = |v: &[f64]| -> f64 { v[..n].iter().map(|&a| objective.link_value(a)).sum() };

    let mut iterations = 0;
    loop {
        iterations += 1;
        let grad: Vec<f64> = point[..n].iter().map(|&a| objective.link_slope(a)).collect();
        for p in 0..n {
            simplex.set_cost(ids[p], grad[p]);
        }
        lp_solves += 1;
        simplex.reoptimize()?;
        let vertex: Vec<f64> = ids.iter().map(|&id| simplex.value(id)).collect();
        let value = eval(&point);
        let gap: f64 = (0..n).map(|p| grad[p] * (vertex[p] - point[p])).sum::<f64>().max(0.0);
        let upper = value + gap;
        let done = gap <= opts.eps_gap || upper <= opts.cutoff;
        if done || iterations >= opts.max_iterations {
            return Ok(RelaxationResult {
                a: point[..n].to_vec(),
                x: point[n..].iter().map(|v| v.clamp(0.0, 1.0)).collect(),
                value,
                upper_bound: upper,
                gap,
                iterations,
                lp_solves,
                feasible: true,
                converged: done,
            });
        }
        let dir: Vec<f64> = vertex.iter().zip(&point).map(|(s, v)| s - v).collect();
        let step = line_search(|g| (0..n).map(|p| objective.link_slope(point[p] + g * dir[p]) * dir[p]).sum());
        for (v, d) in point.iter_mut().zip(&dir) {
            *v += step * d;
        }
    }
}

/// Maximizer over `[0, 1]` of a concave function given its (non-increasing)
/// derivative.
fn line_search(derivative: impl Fn(f64) -> f64) -> f64 {
    if derivative(1.0) >= 0.0 {
        return 1.0;
    }
    if derivative(0.0) <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match derivative(mid).partial_cmp(&0.0) {
            Some(Ordering::Greater) => lo = mid,
            _ => hi = mid,
        }
    }
    0.5 * (lo + hi)
}
