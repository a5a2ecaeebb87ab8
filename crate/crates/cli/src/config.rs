//! Simulation config files: flat TOML, unknown keys rejected. See
//! `configs/stadium.toml` for a commented example.

use std::path::PathBuf;

use mmrelay::sim::{Setting, SimulationConfig};
use mmrelay::{LinkBudgetParams, ObjectiveKind, Point};
use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationFile {
    pub sources: Option<usize>,
    pub relays: Option<usize>,
    pub settings: Option<Vec<Setting>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub objectives: Option<Vec<ObjectiveKind>>,
    pub lower_bound_gbps: Option<f64>,
    /// Sweep grid, `start:stop:step` or a comma-separated list.
    pub lower_bounds: Option<String>,
    pub beams_source: Option<u32>,
    pub beams_relay: Option<u32>,
    pub camera_start: Option<[f64; 2]>,
    pub camera_end: Option<[f64; 2]>,
    pub relay_line_fraction: Option<[f64; 3]>,
    pub a_max_gbps: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub link: Option<LinkBudgetParams>,
}

impl SimulationFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Base configuration with every value present in the file applied.
    pub fn apply(&self, cfg: &mut SimulationConfig) {
        if let Some(v) = self.sources {
            cfg.num_sources = v;
        }
        if let Some(v) = self.relays {
            cfg.num_relays = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.rng_seed = v;
        }
        if let Some(v) = &self.objectives {
            cfg.objectives = v.clone();
        }
        if let Some(v) = self.lower_bound_gbps {
            cfg.lower_bound_gbps = v;
        }
        if let Some(v) = self.beams_source {
            cfg.beams_source = v;
        }
        if let Some(v) = self.beams_relay {
            cfg.beams_relay = v;
        }
        if let Some([x, y]) = self.camera_start {
            cfg.camera_line.0 = Point::new(x, y);
        }
        if let Some([x, y]) = self.camera_end {
            cfg.camera_line.1 = Point::new(x, y);
        }
        if let Some(v) = self.relay_line_fraction {
            cfg.relay_line_fraction = v;
        }
        if let Some(v) = self.a_max_gbps {
            cfg.quality.a_max_gbps = v;
        }
        if let Some(v) = self.link {
            cfg.link_params = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_config_parses() {
        let text = include_str!("../../../configs/stadium.toml");
        let file = SimulationFile::parse(text).unwrap();
        let mut cfg = SimulationConfig::default();
        file.apply(&mut cfg);
        assert_eq!(cfg.num_sources, 10);
        assert_eq!(file.settings.as_deref(), Some(&[Setting::I, Setting::II, Setting::III][..]));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(SimulationFile::parse("sourcez = 3").is_err());
        assert!(SimulationFile::parse("[link]\neirp = 40").is_err());
        assert!(SimulationFile::parse("settings = [\"IV\"]").is_err());
    }
}
