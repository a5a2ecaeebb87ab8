//! Seeded Monte Carlo evaluation over random stadium deployments.
//!
//! The destination sits at the origin. Cameras are spread uniformly along a
//! segment on top of the stand; relays are spread uniformly along a parallel
//! segment whose distance from the destination depends on the [`Setting`].
//! Each trial draws its own positions from a random stream derived from the
//! configured seed and the trial index, so results do not depend on how
//! trials are scheduled.

mod outage;
mod report;
mod trials;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use outage::{outage_sweep, parse_grid, OutageCurve, OutageSeries, DEFAULT_OUTAGE_GRID};
pub use report::{cdf_csv, format_sig, outage_csv, summary_csv};
pub use trials::{compute_cdf, run_trials, SchemeResults, TrialRecord, TrialResults};

use crate::error::{Error, Result};
use crate::linkbudget::LinkBudgetParams;
use crate::model::{build_instance, Geometry, NetworkInstance, ObjectiveKind, Point};
use crate::quality::QualityParams;
use crate::solver::SolverOptions;

/// Relay placement: how far the relay line sits from the camera line
/// towards the destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setting {
    /// Relays close to the cameras.
    I,
    /// Relays halfway.
    II,
    /// Relays close to the destination.
    III,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::I, Setting::II, Setting::III];

    pub fn as_str(&self) -> &'static str {
        match self {
            Setting::I => "I",
            Setting::II => "II",
            Setting::III => "III",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Setting::I),
            "II" | "2" => Ok(Setting::II),
            "III" | "3" => Ok(Setting::III),
            other => Err(Error::Parse { what: "setting".into(), msg: format!("expected I, II or III, got {other:?}") }),
        }
    }
}

/// Everything that determines a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub num_sources: usize,
    pub num_relays: usize,
    pub setting: Setting,
    pub trials: usize,
    pub rng_seed: u64,
    /// Endpoints of the camera segment, meters.
    pub camera_line: (Point, Point),
    /// Relay line offset per setting, as a fraction of the camera line's
    /// distance to the destination.
    pub relay_line_fraction: [f64; 3],
    pub beams_source: u32,
    pub beams_relay: u32,
    pub lower_bound_gbps: f64,
    pub objectives: Vec<ObjectiveKind>,
    pub link_params: LinkBudgetParams,
    pub quality: QualityParams,
    pub solver: SolverOptions,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            num_sources: 10,
            num_relays: 10,
            setting: Setting::II,
            trials: 1000,
            rng_seed: 1,
            camera_line: (Point::new(500.0, -100.0), Point::new(500.0, 100.0)),
            relay_line_fraction: [0.2, 0.5, 0.8],
            beams_source: 2,
            beams_relay: 2,
            lower_bound_gbps: 0.0,
            objectives: ObjectiveKind::ALL.to_vec(),
            link_params: LinkBudgetParams::default(),
            quality: QualityParams::default(),
            solver: SolverOptions::default(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_sources == 0 || self.num_relays == 0 {
            return Err(Error::invalid("need at least one source and one relay"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        let (a, b) = self.camera_line;
        if ![a.x, a.y, b.x, b.y].iter().all(|v| v.is_finite()) || a == b {
            return Err(Error::invalid("camera segment endpoints must be finite and distinct"));
        }
        if self.relay_line_fraction.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
            return Err(Error::invalid("relay line fractions must lie in (0, 1)"));
        }
        if self.beams_source == 0 || self.beams_relay == 0 {
            return Err(Error::invalid("beam counts must be positive"));
        }
        if !(self.lower_bound_gbps >= 0.0) || !self.lower_bound_gbps.is_finite() {
            return Err(Error::invalid("lower bound must be non-negative and finite"));
        }
        if self.objectives.is_empty() {
            return Err(Error::invalid("at least one objective is required"));
        }
        self.link_params.validate()?;
        self.quality.validate()?;
        self.solver.validate()
    }

    /// Fraction of the way from the camera line to the destination at which
    /// the relay line sits.
    pub fn relay_fraction(&self) -> f64 {
        self.relay_line_fraction[self.setting.index()]
    }

    /// The relay segment: the camera segment scaled towards the origin.
    pub fn relay_line(&self) -> (Point, Point) {
        let s = 1.0 - self.relay_fraction();
        let (a, b) = self.camera_line;
        (Point::new(a.x * s, a.y), Point::new(b.x * s, b.y))
    }

    fn rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(trial as u64);
        rng
    }
}

fn sample_on(rng: &mut ChaCha8Rng, (a, b): (Point, Point)) -> Point {
    let t: f64 = rng.gen();
    Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
}

/// Random positions of one trial. Cameras are drawn before relays.
pub fn generate_geometry(cfg: &SimulationConfig, trial: usize) -> Geometry {
    let mut rng = cfg.rng(trial);
    let sources = (0..cfg.num_sources).map(|_| sample_on(&mut rng, cfg.camera_line)).collect();
    let relay_line = cfg.relay_line();
    let relays = (0..cfg.num_relays).map(|_| sample_on(&mut rng, relay_line)).collect();
    Geometry { sources, relays, destination: Point::new(0.0, 0.0) }
}

/// The network of one trial with the configured beam counts.
pub fn generate_instance(cfg: &SimulationConfig, trial: usize) -> Result<NetworkInstance> {
    cfg.validate()?;
    build_instance(&generate_geometry(cfg, trial), &cfg.link_params)?
        .with_uniform_beams(cfg.beams_source, cfg.beams_relay)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relay_lines_per_setting() {
        let mut cfg = SimulationConfig::default();
        for (setting, x) in [(Setting::I, 400.0), (Setting::II, 250.0), (Setting::III, 100.0)] {
            cfg.setting = setting;
            let (a, b) = cfg.relay_line();
            assert!((a.x - x).abs() < 1e-12 && (b.x - x).abs() < 1e-12);
            assert_eq!((a.y, b.y), (-100.0, 100.0));
        }
    }

    #[test]
    fn same_trial_same_instance() {
        let cfg = SimulationConfig::default();
        let a = generate_instance(&cfg, 17).unwrap();
        let b = generate_instance(&cfg, 17).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert_ne!(generate_geometry(&cfg, 17), generate_geometry(&cfg, 18));
        let other_seed = SimulationConfig { rng_seed: 2, ..cfg.clone() };
        assert_ne!(generate_geometry(&cfg, 17), generate_geometry(&other_seed, 17));
    }

    #[test]
    fn positions_stay_on_their_segments() {
        let cfg = SimulationConfig { setting: Setting::II, ..Default::default() };
        for t in 0..50 {
            let g = generate_geometry(&cfg, t);
            assert!(g.sources.iter().all(|p| p.x == 500.0 && p.y.abs() <= 100.0));
            assert!(g.relays.iter().all(|p| p.x == 250.0 && p.y.abs() <= 100.0));
            for s in &g.sources {
                for r in &g.relays {
                    let d = s.distance(r);
                    assert!((250.0..=250f64.hypot(200.0)).contains(&d));
                }
            }
        }
    }

    #[test]
    fn setting_round_trip() {
        for s in Setting::ALL {
            assert_eq!(s.as_str().parse::<Setting>().unwrap(), s);
        }
        assert_eq!("ii".parse::<Setting>().unwrap(), Setting::II);
        assert!("IV".parse::<Setting>().is_err());
    }

    #[test]
    fn validation() {
        let ok = SimulationConfig::default();
        assert!(ok.validate().is_ok());
        assert!(SimulationConfig { trials: 0, ..ok.clone() }.validate().is_err());
        assert!(SimulationConfig { relay_line_fraction: [0.2, 1.0, 0.8], ..ok.clone() }.validate().is_err());
        let p = Point::new(500.0, 0.0);
        assert!(SimulationConfig { camera_line: (p, p), ..ok.clone() }.validate().is_err());
        assert!(SimulationConfig { objectives: vec![], ..ok }.validate().is_err());
    }
}
