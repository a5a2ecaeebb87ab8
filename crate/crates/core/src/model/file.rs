//! Instance files.
//!
//! A flat TOML document. Positions generate the rate tables through the
//! link budget; `a_srr_max` / `a_rdr_max` may be given instead to bypass
//! geometry. Unknown keys are rejected.
//!
//! ```toml
//! sources = [[500.0, -50.0], [500.0, 50.0]]
//! relays = [[250.0, 0.0]]
//! destination = [0.0, 0.0]
//! beams_source = [2, 2]
//! beams_relay = [2]
//! lower_bounds_gbps = [0.75, 0.75]
//! objective = "vqm"
//! ```

use serde::Deserialize;

use super::instance::{build_instance, Geometry, NetworkInstance, Point};
use super::program::{ObjectiveKind, ProblemSpec};
use crate::error::{Error, Result};
use crate::linkbudget::LinkBudgetParams;
use crate::quality::QualityParams;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub sources: Option<Vec<[f64; 2]>>,
    pub relays: Option<Vec<[f64; 2]>>,
    pub destination: Option<[f64; 2]>,
    pub a_srr_max: Option<Vec<Vec<f64>>>,
    pub a_rdr_max: Option<Vec<f64>>,
    pub beams_source: Option<Vec<u32>>,
    pub beams_relay: Option<Vec<u32>>,
    pub lower_bounds_gbps: Option<Vec<f64>>,
    pub objective: Option<ObjectiveKind>,
    pub a_max_gbps: Option<f64>,
    pub link: Option<LinkBudgetParams>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse { what: "instance file".into(), msg: e.to_string() })
    }

    /// Resolves the file into a validated problem. Missing beams default to
    /// one per node, missing lower bounds to zero, a missing objective to VQM.
    pub fn to_spec(&self) -> Result<ProblemSpec> {
        let link = self.link.unwrap_or_default();
        let mut instance = match (&self.a_srr_max, &self.a_rdr_max) {
            (Some(srr), Some(rdr)) => {
                let mut inst = NetworkInstance::from_rates(srr.clone(), rdr.clone())?;
                if let (Some(s), Some(r), Some(d)) = (&self.sources, &self.relays, &self.destination) {
                    inst.geometry = Some(geometry(s, r, d));
                }
                inst
            }
            (None, None) => {
                let (Some(s), Some(r)) = (&self.sources, &self.relays) else {
                    return Err(Error::invalid("instance needs either positions or a_srr_max/a_rdr_max"));
                };
                let d = self.destination.unwrap_or([0.0, 0.0]);
                build_instance(&geometry(s, r, &d), &link)?
            }
            _ => return Err(Error::invalid("a_srr_max and a_rdr_max must be given together")),
        };
        let (s, r) = (instance.num_sources(), instance.num_relays());
        instance = instance.with_beams(
            self.beams_source.clone().unwrap_or_else(|| vec![1; s]),
            self.beams_relay.clone().unwrap_or_else(|| vec![1; r]),
        )?;
        let quality = QualityParams { a_max_gbps: self.a_max_gbps.unwrap_or(1.5), ..Default::default() };
        ProblemSpec::new(
            instance,
            quality,
            self.lower_bounds_gbps.clone().unwrap_or_else(|| vec![0.0; s]),
            self.objective.unwrap_or(ObjectiveKind::Vqm),
        )
    }
}

fn geometry(s: &[[f64; 2]], r: &[[f64; 2]], d: &[f64; 2]) -> Geometry {
    Geometry {
        sources: s.iter().copied().map(Point::from).collect(),
        relays: r.iter().copied().map(Point::from).collect(),
        destination: Point::from(*d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_file() {
        let f = InstanceFile::parse(
            r#"
            sources = [[500.0, 0.0]]
            relays = [[300.0, 0.0]]
            destination = [0.0, 0.0]
            beams_source = [2]
            beams_relay = [3]
            lower_bounds_gbps = [0.25]
            objective = "srm"
            "#,
        )
        .unwrap();
        let spec = f.to_spec().unwrap();
        assert_eq!(spec.objective, ObjectiveKind::Srm);
        assert!((spec.instance.a_srr_max[0][0] - 3.0).abs() < 0.02);
        assert_eq!(spec.instance.beams_relay, vec![3]);
        assert_eq!(spec.lower_bounds_gbps, vec![0.25]);
    }

    #[test]
    fn rate_file_with_link_override() {
        let f = InstanceFile::parse(
            r#"
            a_srr_max = [[2.0]]
            a_rdr_max = [1.0]
            "#,
        )
        .unwrap();
        let spec = f.to_spec().unwrap();
        assert_eq!(spec.instance.a_srr_max, vec![vec![2.0]]);
        assert_eq!(spec.objective, ObjectiveKind::Vqm);
        assert_eq!(spec.lower_bounds_gbps, vec![0.0]);

        let g = InstanceFile::parse(
            "sources = [[500.0, 0.0]]\nrelays = [[300.0, 0.0]]\n[link]\neirp_dbm = 57.0\n",
        )
        .unwrap();
        assert!(g.to_spec().unwrap().instance.a_srr_max[0][0] > 5.0);
    }

    #[test]
    fn rejects_unknown_keys_and_half_specified_rates() {
        assert!(InstanceFile::parse("bogus = 1").is_err());
        assert!(InstanceFile::parse("a_srr_max = [[1.0]]").unwrap().to_spec().is_err());
        assert!(InstanceFile::parse("objective = \"max\"").is_err());
        assert!(InstanceFile::parse("").unwrap().to_spec().is_err());
    }
}
