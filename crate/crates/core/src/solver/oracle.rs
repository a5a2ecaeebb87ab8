use super::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::error::{Error, Result};
use crate::model::{ObjectiveKind, ProblemSpec, Sense, Solution, SolveStats};
use crate::quality::QualityParams;

/// Largest number of source-relay pairs the oracle accepts.
pub const ORACLE_MAX_PAIRS: usize = 12;

const KELLEY_GAP: f64 = 1e-9;
const KELLEY_ROUNDS: usize = 10_000;

/// Exhaustive reference solver: tries every binary assignment that fits the
/// beam budgets and solves the remaining rate problem exactly (a linear
/// program for the sum-rate objectives, a cutting-plane outer approximation
/// for the quality objective). The first assignment in lexicographic order
/// attaining the best value wins.
pub fn enumerate_oracle(spec: &ProblemSpec) -> Result<Solution> {
    spec.validate()?;
    let (s, r) = (spec.num_sources(), spec.num_relays());
    let n = s * r;
    if n > ORACLE_MAX_PAIRS {
        return Err(Error::TooLarge { pairs: n, limit: ORACLE_MAX_PAIRS });
    }
    let (beams_source, beams_relay) = spec.effective_beams();
    let mut stats = SolveStats::default();
    let mut best: Option<(f64, Vec<bool>, Vec<f64>)> = None;

    for mask in 0u32..(1 << n) {
        // pair 0 is the most significant position
        let x: Vec<bool> = (0..n).map(|p| mask >> (n - 1 - p) & 1 == 1).collect();
        let fits_sources = (0..s).all(|i| (0..r).filter(|&j| x[i * r + j]).count() as u32 <= beams_source[i]);
        let fits_relays = (0..r).all(|j| (0..s).filter(|&i| x[i * r + j]).count() as u32 <= beams_relay[j]);
        if !fits_sources || !fits_relays {
            continue;
        }
        stats.nodes += 1;
        let Some((a, value, lps)) = solve_assignment(spec, &x)? else { continue };
        stats.lp_solves += lps;
        if best.as_ref().map_or(true, |(v, _, _)| value > *v + 1e-12) {
            best = Some((value, x, a));
        }
    }

    Ok(match best {
        None => Solution::infeasible(spec, stats),
        Some((_, x, a)) => {
            let x = x.chunks(r).map(|row| row.iter().map(|&b| u8::from(b)).collect()).collect();
            let a = a.chunks(r).map(<[f64]>::to_vec).collect();
            Solution::from_assignment(spec, x, a, stats)
        }
    })
}

/// Rate LP for a fixed assignment: variables are the rates of the connected
/// links, optionally followed by one epigraph variable per link.
fn rate_lp(spec: &ProblemSpec, links: &[(usize, usize)], epigraph: bool) -> LinearProgram {
    let m = links.len();
    let mut lp = LinearProgram::new(if epigraph { 2 * m } else { m });
    for (k, &(i, j)) in links.iter().enumerate() {
        lp.upper[k] = spec.rate_cap(i, j);
        if epigraph {
            lp.objective[m + k] = 1.0;
            lp.upper[m + k] = spec.quality.link_quality(lp.upper[k]);
        } else {
            lp.objective[k] = 0.5;
        }
    }
    for j in 0..spec.num_relays() {
        let coeffs: Vec<(usize, f64)> = links.iter().enumerate().filter(|(_, l)| l.1 == j).map(|(k, _)| (k, 1.0)).collect();
        if !coeffs.is_empty() {
            lp.add_row(coeffs, Sense::Le, spec.instance.a_rdr_max[j]);
        }
    }
    for i in 0..spec.num_sources() {
        let coeffs: Vec<(usize, f64)> = links.iter().enumerate().filter(|(_, l)| l.0 == i).map(|(k, _)| (k, 1.0)).collect();
        lp.add_row(coeffs, Sense::Ge, spec.lower_bounds_gbps[i]);
    }
    lp
}

fn solve_assignment(spec: &ProblemSpec, x: &[bool]) -> Result<Option<(Vec<f64>, f64, usize)>> {
    let r = spec.num_relays();
    let links: Vec<(usize, usize)> = (0..x.len()).filter(|&p| x[p]).map(|p| (p / r, p % r)).collect();
    let m = links.len();
    let scatter = |rates: &[f64]| {
        let mut a = vec![0.0; x.len()];
        for (k, &(i, j)) in links.iter().enumerate() {
            a[i * r + j] = rates[k].max(0.0);
        }
        a
    };

    if spec.objective != ObjectiveKind::Vqm {
        let lp = rate_lp(spec, &links, false);
        return Ok(match solve_lp(&lp)? {
            LpOutcome::Optimal(sol) => {
                let a = scatter(&sol.x[..m]);
                Some((a.clone(), 0.5 * a.iter().sum::<f64>(), 1))
            }
            _ => None,
        });
    }

    // Kelley: t_k <= g(p) + g'(p)(a_k - p) for every cut point p
    let q = &spec.quality;
    let mut lp = rate_lp(spec, &links, true);
    for k in 0..m {
        for p in [0.0, 0.5 * lp.upper[k]] {
            add_cut(&mut lp, q, k, m + k, p);
        }
    }
    let mut solves = 0;
    let mut best = (vec![0.0; m], f64::NEG_INFINITY);
    loop {
        solves += 1;
        let sol = match solve_lp(&lp)? {
            LpOutcome::Optimal(sol) => sol,
            _ => return Ok(None),
        };
        let rates = &sol.x[..m];
        let actual: f64 = rates.iter().map(|&v| q.link_quality(v)).sum();
        if actual > best.1 {
            best = (rates.to_vec(), actual);
        }
        if sol.value - best.1 <= KELLEY_GAP || solves >= KELLEY_ROUNDS {
            return Ok(Some((scatter(&best.0), best.1, solves)));
        }
        for k in 0..m {
            if sol.x[m + k] > q.link_quality(rates[k]) + 1e-13 {
                add_cut(&mut lp, q, k, m + k, rates[k]);
            }
        }
    }
}

fn add_cut(lp: &mut LinearProgram, q: &QualityParams, rate: usize, epi: usize, p: f64) {
    let g = q.link_quality(p);
    let slope = 0.5 * q.slope(0.5 * p);
    // t - slope·a <= g - slope·p
    lp.add_row(vec![(epi, 1.0), (rate, -slope)], Sense::Le, g - slope * p);
}
