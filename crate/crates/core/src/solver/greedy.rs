use super::solve_with_assignment;
use crate::error::Result;
use crate::model::{ProblemSpec, Solution};

/// Greedy link assignment: repeatedly connect the free pair that can carry
/// the most rate given its rate cap, the relay's remaining destination
/// capacity and both ends' remaining beams. Returned in row-major pair order.
pub(crate) fn greedy_assignment(spec: &ProblemSpec) -> Vec<bool> {
    let (s, r) = (spec.num_sources(), spec.num_relays());
    let (mut beams_source, mut beams_relay) = spec.effective_beams();
    let inst = &spec.instance;
    let mut residual = inst.a_rdr_max.clone();
    let mut x = vec![false; s * r];
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..s {
            if beams_source[i] == 0 {
                continue;
            }
            for j in 0..r {
                if beams_relay[j] == 0 || x[i * r + j] {
                    continue;
                }
                let gain = spec.rate_cap(i, j).min(residual[j]);
                if gain > 0.0 && best.map_or(true, |(_, _, g)| gain > g) {
                    best = Some((i, j, gain));
                }
            }
        }
        let Some((i, j, gain)) = best else { break };
        x[i * r + j] = true;
        beams_source[i] -= 1;
        beams_relay[j] -= 1;
        residual[j] -= gain;
    }
    x
}

/// Feasible solution from the greedy assignment with optimal rates for it,
/// or `None` when that assignment cannot meet the lower bounds.
pub fn greedy_incumbent(spec: &ProblemSpec) -> Result<Option<Solution>> {
    spec.validate()?;
    let r = spec.num_relays();
    let x: Vec<Vec<u8>> = greedy_assignment(spec).chunks(r).map(|row| row.iter().map(|&b| u8::from(b)).collect()).collect();
    let mut sol = solve_with_assignment(spec, &x)?;
    sol.stats.nodes = 0;
    Ok(sol.is_optimal().then_some(sol))
}
