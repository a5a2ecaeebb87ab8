use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::instance::NetworkInstance;
use crate::error::{Error, Result};
use crate::quality::QualityParams;

/// Which scheme's objective the program optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Video-quality maximization: sum of per-link quality.
    Vqm,
    /// Sum-rate maximization with the same constraints.
    Srm,
    /// Sum-rate maximization restricted to single-beam nodes.
    Jrsr,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 3] = [ObjectiveKind::Vqm, ObjectiveKind::Srm, ObjectiveKind::Jrsr];

    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectiveKind::Vqm => "vqm",
            ObjectiveKind::Srm => "srm",
            ObjectiveKind::Jrsr => "jrsr",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vqm" => Ok(ObjectiveKind::Vqm),
            "srm" => Ok(ObjectiveKind::Srm),
            "jrsr" => Ok(ObjectiveKind::Jrsr),
            other => Err(Error::invalid(format!("unknown objective '{other}' (expected vqm, srm or jrsr)"))),
        }
    }
}

/// An instance together with the objective and per-source minimum rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub instance: NetworkInstance,
    pub quality: QualityParams,
    /// Minimum delivered rate per source, Gbit/s.
    pub lower_bounds_gbps: Vec<f64>,
    pub objective: ObjectiveKind,
}

impl ProblemSpec {
    pub fn new(
        instance: NetworkInstance,
        quality: QualityParams,
        lower_bounds_gbps: Vec<f64>,
        objective: ObjectiveKind,
    ) -> Result<Self> {
        let spec = Self { instance, quality, lower_bounds_gbps, objective };
        spec.validate()?;
        Ok(spec)
    }

    /// Same instance and bounds with every source required to receive `lb`.
    pub fn uniform(instance: NetworkInstance, lb: f64, objective: ObjectiveKind) -> Result<Self> {
        let s = instance.num_sources();
        Self::new(instance, QualityParams::default(), vec![lb; s], objective)
    }

    pub fn with_objective(&self, objective: ObjectiveKind) -> Self {
        Self { objective, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.instance.validate()?;
        self.quality.validate()?;
        if self.lower_bounds_gbps.len() != self.instance.num_sources() {
            return Err(Error::invalid(format!(
                "expected {} lower bounds, got {}",
                self.instance.num_sources(),
                self.lower_bounds_gbps.len()
            )));
        }
        if self.lower_bounds_gbps.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("lower bounds must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn num_sources(&self) -> usize {
        self.instance.num_sources()
    }

    pub fn num_relays(&self) -> usize {
        self.instance.num_relays()
    }

    /// Beam budgets the program actually enforces; the single-beam baseline
    /// ignores the instance's multi-beam antennas.
    pub fn effective_beams(&self) -> (Vec<u32>, Vec<u32>) {
        match self.objective {
            ObjectiveKind::Jrsr => (vec![1; self.num_sources()], vec![1; self.num_relays()]),
            _ => (self.instance.beams_source.clone(), self.instance.beams_relay.clone()),
        }
    }

    /// Upper bound on each link rate: the link capacity, further capped where
    /// the link quality saturates.
    pub fn rate_cap(&self, i: usize, j: usize) -> f64 {
        self.instance.a_srr_max[i][j].min(self.quality.saturation_rate())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Role of a constraint row in the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Incoming rate at a relay fits its link to the destination.
    RelayCapacity { relay: usize },
    /// Relay receive beams.
    RelayBeams { relay: usize },
    /// Source transmit beams.
    SourceBeams { source: usize },
    /// Rate only on connected links: `a_ij - A_ij x_ij <= 0`.
    Coupling { source: usize, relay: usize },
    /// Minimum delivered rate of a source.
    LowerBound { source: usize },
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKind::RelayCapacity { relay } => write!(f, "relay-capacity[{relay}]"),
            RowKind::RelayBeams { relay } => write!(f, "relay-beams[{relay}]"),
            RowKind::SourceBeams { source } => write!(f, "source-beams[{source}]"),
            RowKind::Coupling { source, relay } => write!(f, "coupling[{source},{relay}]"),
            RowKind::LowerBound { source } => write!(f, "lower-bound[{source}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub kind: RowKind,
    /// Sparse `(variable index, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variable {
    pub lower: f64,
    pub upper: f64,
    pub binary: bool,
}

/// Objective of the program, separable over source-relay links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProgramObjective {
    /// `Σ f_q(a_ij / 2)`.
    LinkQuality(QualityParams),
    /// `Σ a_ij / 2`.
    HalfSumRate,
}

impl ProgramObjective {
    /// Contribution of one link carrying `a` Gbit/s.
    pub fn link_value(&self, a: f64) -> f64 {
        match self {
            ProgramObjective::LinkQuality(q) => q.link_quality(a),
            ProgramObjective::HalfSumRate => 0.5 * a,
        }
    }

    /// Derivative of [`link_value`](Self::link_value) below saturation.
    pub fn link_slope(&self, a: f64) -> f64 {
        match self {
            ProgramObjective::LinkQuality(q) => 0.5 * q.slope(0.5 * a),
            ProgramObjective::HalfSumRate => 0.5,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, ProgramObjective::HalfSumRate)
    }
}

/// The convexified mixed-integer program: continuous link rates `a_ij`,
/// binary link indicators `x_ij`, linear constraints and a separable concave
/// objective in the rates.
///
/// Variables are laid out as all rates (row-major over `(i, j)`) followed by
/// all indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedIntegerConvexProgram {
    pub num_sources: usize,
    pub num_relays: usize,
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    pub objective: ProgramObjective,
    /// Link capacities `A_ij`, kept for the coupling structure.
    pub link_capacity: Vec<f64>,
}

impl MixedIntegerConvexProgram {
    pub fn num_pairs(&self) -> usize {
        self.num_sources * self.num_relays
    }

    pub fn pair(&self, i: usize, j: usize) -> usize {
        i * self.num_relays + j
    }

    pub fn rate_var(&self, pair: usize) -> usize {
        pair
    }

    pub fn link_var(&self, pair: usize) -> usize {
        self.num_pairs() + pair
    }

    /// Objective at a full variable vector.
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        (0..self.num_pairs()).map(|p| self.objective.link_value(values[self.rate_var(p)])).sum()
    }

    /// Largest violation of any row or bound at `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let bounds = self
            .vars
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0));
        let rows = self.rows.iter().map(|r| {
            let lhs: f64 = r.coeffs.iter().map(|&(k, c)| c * values[k]).sum();
            match r.sense {
                Sense::Le => (lhs - r.rhs).max(0.0),
                Sense::Ge => (r.rhs - lhs).max(0.0),
                Sense::Eq => (lhs - r.rhs).abs(),
            }
        });
        bounds.chain(rows).fold(0.0, f64::max)
    }
}

/// Emits the program for a problem.
///
/// Row order: per relay its capacity and beam rows, per source its beam
/// row, one coupling row per link, then the per-source lower bounds.
pub fn build_program(spec: &ProblemSpec) -> MixedIntegerConvexProgram {
    let (s, r) = (spec.num_sources(), spec.num_relays());
    let n = s * r;
    let (beams_source, beams_relay) = spec.effective_beams();
    let pair = |i: usize, j: usize| i * r + j;

    let mut vars = Vec::with_capacity(2 * n);
    for i in 0..s {
        for j in 0..r {
            vars.push(Variable { lower: 0.0, upper: spec.rate_cap(i, j), binary: false });
        }
    }
    vars.extend(std::iter::repeat(Variable { lower: 0.0, upper: 1.0, binary: true }).take(n));

    let mut rows = Vec::with_capacity(2 * r + 2 * s + n);
    for j in 0..r {
        rows.push(Row {
            kind: RowKind::RelayCapacity { relay: j },
            coeffs: (0..s).map(|i| (pair(i, j), 1.0)).collect(),
            sense: Sense::Le,
            rhs: spec.instance.a_rdr_max[j],
        });
        rows.push(Row {
            kind: RowKind::RelayBeams { relay: j },
            coeffs: (0..s).map(|i| (n + pair(i, j), 1.0)).collect(),
            sense: Sense::Le,
            rhs: beams_relay[j] as f64,
        });
    }
    for i in 0..s {
        rows.push(Row {
            kind: RowKind::SourceBeams { source: i },
            coeffs: (0..r).map(|j| (n + pair(i, j), 1.0)).collect(),
            sense: Sense::Le,
            rhs: beams_source[i] as f64,
        });
    }
    for i in 0..s {
        for j in 0..r {
            rows.push(Row {
                kind: RowKind::Coupling { source: i, relay: j },
                coeffs: vec![(pair(i, j), 1.0), (n + pair(i, j), -spec.instance.a_srr_max[i][j])],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }
    for i in 0..s {
        rows.push(Row {
            kind: RowKind::LowerBound { source: i },
            coeffs: (0..r).map(|j| (pair(i, j), 1.0)).collect(),
            sense: Sense::Ge,
            rhs: spec.lower_bounds_gbps[i],
        });
    }

    let objective = match spec.objective {
        ObjectiveKind::Vqm => ProgramObjective::LinkQuality(spec.quality),
        ObjectiveKind::Srm | ObjectiveKind::Jrsr => ProgramObjective::HalfSumRate,
    };
    MixedIntegerConvexProgram {
        num_sources: s,
        num_relays: r,
        vars,
        rows,
        objective,
        link_capacity: spec.instance.a_srr_max.iter().flatten().copied().collect(),
    }
}
