use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::{capacity_bps, LinkBudgetParams};

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Point::new(p[0], p[1])
    }
}

/// Node placement of one deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub sources: Vec<Point>,
    pub relays: Vec<Point>,
    pub destination: Point,
}

/// A two-hop broadcasting network: sources reach the destination through
/// exactly one relay tier, and every relay has a dedicated link to the
/// destination.
///
/// Rates are in Gbit/s. `a_srr_max[i][j]` is the capacity of source `i` to
/// relay `j`; `a_rdr_max[j]` the capacity of relay `j` to the destination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInstance {
    /// `None` when rates were supplied directly instead of from positions.
    pub geometry: Option<Geometry>,
    pub a_srr_max: Vec<Vec<f64>>,
    pub a_rdr_max: Vec<f64>,
    pub beams_source: Vec<u32>,
    pub beams_relay: Vec<u32>,
}

impl NetworkInstance {
    /// Instance from explicit rate tables, one beam per node.
    pub fn from_rates(a_srr_max: Vec<Vec<f64>>, a_rdr_max: Vec<f64>) -> Result<Self> {
        let inst = Self {
            geometry: None,
            beams_source: vec![1; a_srr_max.len()],
            beams_relay: vec![1; a_rdr_max.len()],
            a_srr_max,
            a_rdr_max,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_beams(mut self, beams_source: Vec<u32>, beams_relay: Vec<u32>) -> Result<Self> {
        self.beams_source = beams_source;
        self.beams_relay = beams_relay;
        self.validate()?;
        Ok(self)
    }

    pub fn with_uniform_beams(self, source: u32, relay: u32) -> Result<Self> {
        let (s, r) = (self.num_sources(), self.num_relays());
        self.with_beams(vec![source; s], vec![relay; r])
    }

    pub fn num_sources(&self) -> usize {
        self.a_srr_max.len()
    }

    pub fn num_relays(&self) -> usize {
        self.a_rdr_max.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (s, r) = (self.num_sources(), self.num_relays());
        if s == 0 || r == 0 {
            return Err(Error::invalid("an instance needs at least one source and one relay"));
        }
        if let Some((i, row)) = self.a_srr_max.iter().enumerate().find(|(_, row)| row.len() != r) {
            return Err(Error::invalid(format!(
                "a_srr_max row {i} has {} entries, expected {r}",
                row.len()
            )));
        }
        let all_rates = self.a_srr_max.iter().flatten().chain(&self.a_rdr_max);
        if all_rates.into_iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("achievable rates must be finite and non-negative"));
        }
        if self.beams_source.len() != s || self.beams_relay.len() != r {
            return Err(Error::invalid(format!(
                "beam vectors must have lengths {s} and {r}, got {} and {}",
                self.beams_source.len(),
                self.beams_relay.len()
            )));
        }
        if self.beams_source.iter().chain(&self.beams_relay).any(|&b| b == 0) {
            return Err(Error::invalid("beam counts must be positive"));
        }
        if let Some(g) = &self.geometry {
            if g.sources.len() != s || g.relays.len() != r {
                return Err(Error::invalid("geometry does not match the rate tables"));
            }
        }
        Ok(())
    }
}

/// Fills the rate tables from Euclidean link lengths. Beam counts default
/// to one per node.
pub fn build_instance(geometry: &Geometry, params: &LinkBudgetParams) -> Result<NetworkInstance> {
    params.validate()?;
    if geometry.sources.is_empty() || geometry.relays.is_empty() {
        return Err(Error::invalid("need at least one source and one relay"));
    }
    let all = geometry.sources.iter().chain(&geometry.relays).chain(std::iter::once(&geometry.destination));
    if all.into_iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("positions must be finite"));
    }
    let gbps = |from: &Point, to: &Point, what: &str| -> Result<f64> {
        let d = from.distance(to);
        if d <= 0.0 {
            return Err(Error::domain(format!("{what} endpoints coincide at ({}, {})", from.x, from.y)));
        }
        Ok(capacity_bps(d, params)? / 1e9)
    };
    let a_srr_max = geometry
        .sources
        .iter()
        .enumerate()
        .map(|(i, s)| {
            geometry
                .relays
                .iter()
                .enumerate()
                .map(|(j, r)| gbps(s, r, &format!("source {i} / relay {j}")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let a_rdr_max = geometry
        .relays
        .iter()
        .enumerate()
        .map(|(j, r)| gbps(r, &geometry.destination, &format!("relay {j} / destination")))
        .collect::<Result<Vec<_>>>()?;
    Ok(NetworkInstance {
        geometry: Some(geometry.clone()),
        beams_source: vec![1; a_srr_max.len()],
        beams_relay: vec![1; a_rdr_max.len()],
        a_srr_max,
        a_rdr_max,
    })
}
