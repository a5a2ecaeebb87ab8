use std::fmt;

use serde::{Deserialize, Serialize};

use super::program::{ObjectiveKind, ProblemSpec};

/// Rate tolerance used when validating solutions.
pub const RATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Infeasible => "Infeasible",
        })
    }
}

/// Bookkeeping reported alongside a solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Branch-and-bound nodes evaluated (x assignments for the oracle).
    pub nodes: usize,
    /// LP solves performed, including column-generation rounds.
    pub lp_solves: usize,
}

/// Link assignment and rates.
///
/// An infeasible solution carries all-zero `x` and `a` and an objective of 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Binary connectivity, `x[i][j] ∈ {0, 1}`.
    pub x: Vec<Vec<u8>>,
    /// Link rates in Gbit/s.
    pub a: Vec<Vec<f64>>,
    pub objective_value: f64,
    /// `Σ_j a[i][j]`.
    pub per_source_rate: Vec<f64>,
    /// `Σ_j f_q(a[i][j] / 2)`, so that the entries sum to the aggregate
    /// link quality.
    pub per_source_quality: Vec<f64>,
    pub status: SolveStatus,
    pub stats: SolveStats,
}

impl Solution {
    /// Builds a solution and fills the derived per-source vectors and the
    /// objective for `spec`.
    pub fn from_assignment(spec: &ProblemSpec, x: Vec<Vec<u8>>, a: Vec<Vec<f64>>, stats: SolveStats) -> Self {
        let q = &spec.quality;
        let per_source_rate: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
        let per_source_quality: Vec<f64> =
            a.iter().map(|row| row.iter().map(|&v| q.link_quality(v)).sum()).collect();
        let objective_value = match spec.objective {
            ObjectiveKind::Vqm => per_source_quality.iter().sum(),
            ObjectiveKind::Srm | ObjectiveKind::Jrsr => 0.5 * per_source_rate.iter().sum::<f64>(),
        };
        Self {
            x,
            a,
            objective_value,
            per_source_rate,
            per_source_quality,
            status: SolveStatus::Optimal,
            stats,
        }
    }

    pub fn infeasible(spec: &ProblemSpec, stats: SolveStats) -> Self {
        let (s, r) = (spec.num_sources(), spec.num_relays());
        Self {
            x: vec![vec![0; r]; s],
            a: vec![vec![0.0; r]; s],
            objective_value: 0.0,
            per_source_rate: vec![0.0; s],
            per_source_quality: vec![0.0; s],
            status: SolveStatus::Infeasible,
            stats,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Aggregate link quality `Σ_ij f_q(a_ij / 2)` regardless of the
    /// objective that produced the point.
    pub fn aggregate_quality(&self) -> f64 {
        self.per_source_quality.iter().sum()
    }

    /// Per-source quality of the summed rate, `Σ_i f_q(Σ_j a_ij / 2)`;
    /// bounded by the number of sources.
    pub fn source_quality(&self, spec: &ProblemSpec) -> f64 {
        self.per_source_rate.iter().map(|&r| spec.quality.link_quality(r)).sum()
    }

    pub fn sum_rate(&self) -> f64 {
        self.per_source_rate.iter().sum()
    }
}

/// A broken solution invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Dimension(String),
    NotBinary { source: usize, relay: usize, value: u8 },
    NegativeRate { source: usize, relay: usize, value: f64 },
    RateCap { source: usize, relay: usize, excess: f64 },
    Coupling { source: usize, relay: usize, excess: f64 },
    RelayCapacity { relay: usize, excess: f64 },
    RelayBeams { relay: usize, used: u32, budget: u32 },
    SourceBeams { source: usize, used: u32, budget: u32 },
    LowerBound { source: usize, shortfall: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension(m) => write!(f, "dimension mismatch: {m}"),
            Violation::NotBinary { source, relay, value } => {
                write!(f, "x[{source}][{relay}] = {value} is not binary")
            }
            Violation::NegativeRate { source, relay, value } => {
                write!(f, "a[{source}][{relay}] = {value} is negative")
            }
            Violation::RateCap { source, relay, excess } => {
                write!(f, "a[{source}][{relay}] exceeds its cap by {excess:e}")
            }
            Violation::Coupling { source, relay, excess } => {
                write!(f, "a[{source}][{relay}] exceeds A·x by {excess:e}")
            }
            Violation::RelayCapacity { relay, excess } => {
                write!(f, "relay {relay} inflow exceeds its destination link by {excess:e}")
            }
            Violation::RelayBeams { relay, used, budget } => {
                write!(f, "relay {relay} uses {used} beams, budget {budget}")
            }
            Violation::SourceBeams { source, used, budget } => {
                write!(f, "source {source} uses {used} beams, budget {budget}")
            }
            Violation::LowerBound { source, shortfall } => {
                write!(f, "source {source} falls short of its lower bound by {shortfall:e}")
            }
        }
    }
}

/// Lists every constraint the solution breaks. Rates are checked to within
/// [`RATE_TOLERANCE`], binaries and beam counts exactly. Lower bounds are
/// only enforced for optimal solutions.
pub fn check_solution(spec: &ProblemSpec, sol: &Solution) -> Vec<Violation> {
    let (s, r) = (spec.num_sources(), spec.num_relays());
    let mut out = Vec::new();
    let shape_ok = |m: usize, rows: &[usize]| m == s && rows.iter().all(|&l| l == r);
    let x_rows: Vec<usize> = sol.x.iter().map(Vec::len).collect();
    let a_rows: Vec<usize> = sol.a.iter().map(Vec::len).collect();
    if !shape_ok(sol.x.len(), &x_rows) || !shape_ok(sol.a.len(), &a_rows) {
        out.push(Violation::Dimension(format!("expected {s}×{r} matrices")));
        return out;
    }
    let tol = RATE_TOLERANCE;
    let (beams_source, beams_relay) = spec.effective_beams();
    let inst = &spec.instance;

    for i in 0..s {
        for j in 0..r {
            let (x, a) = (sol.x[i][j], sol.a[i][j]);
            if x > 1 {
                out.push(Violation::NotBinary { source: i, relay: j, value: x });
            }
            if !(a >= -tol) {
                out.push(Violation::NegativeRate { source: i, relay: j, value: a });
            }
            let cap = spec.rate_cap(i, j);
            if a > cap + tol {
                out.push(Violation::RateCap { source: i, relay: j, excess: a - cap });
            }
            let gate = inst.a_srr_max[i][j] * f64::from(x.min(1));
            if a > gate + tol {
                out.push(Violation::Coupling { source: i, relay: j, excess: a - gate });
            }
        }
    }
    for j in 0..r {
        let inflow: f64 = (0..s).map(|i| sol.a[i][j]).sum();
        if inflow > inst.a_rdr_max[j] + tol {
            out.push(Violation::RelayCapacity { relay: j, excess: inflow - inst.a_rdr_max[j] });
        }
        let used: u32 = (0..s).map(|i| u32::from(sol.x[i][j])).sum();
        if used > beams_relay[j] {
            out.push(Violation::RelayBeams { relay: j, used, budget: beams_relay[j] });
        }
    }
    for i in 0..s {
        let used: u32 = sol.x[i].iter().map(|&v| u32::from(v)).sum();
        if used > beams_source[i] {
            out.push(Violation::SourceBeams { source: i, used, budget: beams_source[i] });
        }
        if sol.is_optimal() {
            let delivered: f64 = sol.a[i].iter().sum();
            if delivered < spec.lower_bounds_gbps[i] - tol {
                out.push(Violation::LowerBound { source: i, shortfall: spec.lower_bounds_gbps[i] - delivered });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NetworkInstance;

    fn spec(lb: f64) -> ProblemSpec {
        let inst = NetworkInstance::from_rates(vec![vec![2.0, 1.0], vec![0.5, 4.0]], vec![1.0, 2.5]).unwrap();
        ProblemSpec::uniform(inst, lb, ObjectiveKind::Vqm).unwrap()
    }

    #[test]
    fn all_zero_is_clean_without_lower_bounds() {
        let s = spec(0.0);
        let sol = Solution::from_assignment(&s, vec![vec![0; 2]; 2], vec![vec![0.0; 2]; 2], SolveStats::default());
        assert!(check_solution(&s, &sol).is_empty());
        assert_eq!(sol.objective_value, 0.0);
    }

    #[test]
    fn rate_on_disconnected_link_is_flagged() {
        let s = spec(0.0);
        let sol = Solution::from_assignment(
            &s,
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![0.3, 0.0], vec![0.0, 0.0]],
            SolveStats::default(),
        );
        let v = check_solution(&s, &sol);
        assert!(v.iter().any(|v| matches!(v, Violation::Coupling { source: 0, relay: 0, .. })), "{v:?}");
    }

    #[test]
    fn flags_each_family() {
        let s = spec(0.9);
        let sol = Solution::from_assignment(
            &s,
            vec![vec![1, 1], vec![2, 0]],
            vec![vec![0.9, 0.3], vec![0.2, 3.5]],
            SolveStats::default(),
        );
        let v = check_solution(&s, &sol);
        let has = |f: &dyn Fn(&Violation) -> bool| v.iter().any(f);
        assert!(has(&|v| matches!(v, Violation::NotBinary { source: 1, relay: 0, .. })));
        assert!(has(&|v| matches!(v, Violation::RelayCapacity { relay: 0, .. })));
        assert!(has(&|v| matches!(v, Violation::RateCap { source: 1, relay: 1, .. })));
        assert!(has(&|v| matches!(v, Violation::Coupling { source: 1, relay: 1, .. })));
        assert!(has(&|v| matches!(v, Violation::SourceBeams { source: 0, .. })));
        assert!(has(&|v| matches!(v, Violation::RelayBeams { relay: 0, .. })));
        assert!(!has(&|v| matches!(v, Violation::LowerBound { source: 0, .. })));
    }

    #[test]
    fn lower_bound_shortfall() {
        let s = spec(0.75);
        let sol = Solution::from_assignment(
            &s,
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0.8, 0.0], vec![0.0, 0.5]],
            SolveStats::default(),
        );
        let v = check_solution(&s, &sol);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::LowerBound { source: 1, .. }));
        assert!(check_solution(&s, &Solution::infeasible(&s, SolveStats::default())).is_empty());
    }

    #[test]
    fn dimension_mismatch() {
        let s = spec(0.0);
        let sol = Solution::from_assignment(&s, vec![vec![0; 2]], vec![vec![0.0; 2]], SolveStats::default());
        assert!(matches!(check_solution(&s, &sol)[0], Violation::Dimension(_)));
    }
}
