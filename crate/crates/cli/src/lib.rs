//! Command-line front end: argument parsing, config resolution and report
//! emission. `main.rs` only maps [`run`] to a process exit code.

pub mod config;
mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mmrelay::linkbudget::LinkReport;
use mmrelay::model::InstanceFile;
use mmrelay::quality::{f_q, hessian_eigenvalues};
use mmrelay::sim::{self, Setting, SimulationConfig};
use mmrelay::{branch_and_bound, enumerate_oracle, Error, LinkBudgetParams, ObjectiveKind, QualityParams, SolverOptions};

use config::SimulationFile;
pub use output::{write_atomic, OutputError};

/// Revision of the CSV layouts written by `simulate` and `sweep`.
pub const FORMAT_REVISION: u32 = 1;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;
pub const EXIT_IO: u8 = 5;

/// Trials per setting for `sweep` unless set by flag or config; each trial
/// is solved once per grid point.
pub const SWEEP_DEFAULT_TRIALS: usize = 200;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "MMRELAY_OUTPUT_DIR";

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (csv format 1)");

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "mmrelay", version = VERSION, about = "60 GHz relay selection and video-quality optimization")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Link budget of a single hop.
    Linkbudget(LinkbudgetArgs),
    /// Normalized video quality of a rate.
    Quality(QualityArgs),
    /// Solve one instance file.
    Solve(SolveArgs),
    /// Monte Carlo quality evaluation: writes cdf.csv and summary.csv.
    Simulate(SimulateArgs),
    /// Stream-outage probability over a grid of lower bounds: writes outage.csv.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct LinkbudgetArgs {
    /// Link length in meters.
    #[arg(long)]
    pub distance: f64,
    #[arg(long)]
    pub eirp_dbm: Option<f64>,
    #[arg(long)]
    pub rx_gain_db: Option<f64>,
    #[arg(long)]
    pub shadow_margin_db: Option<f64>,
    #[arg(long)]
    pub pathloss_exponent: Option<f64>,
    #[arg(long)]
    pub wavelength_m: Option<f64>,
    #[arg(long)]
    pub bandwidth_hz: Option<f64>,
    #[arg(long)]
    pub noise_figure_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct QualityArgs {
    /// Rate in Gbit/s.
    #[arg(long)]
    pub rate: f64,
    #[arg(long, default_value_t = 1.5)]
    pub a_max: f64,
    /// Also print the Hessian diagnostic at this relaxed indicator value.
    #[arg(long)]
    pub indicator: Option<f64>,
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub log_base: f64,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SolveArgs {
    /// Instance file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the objective in the file.
    #[arg(long)]
    pub objective: Option<ObjectiveKind>,
    /// Use exhaustive enumeration instead of branch-and-bound.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub node_budget: Option<usize>,
}

/// Flags shared by `simulate` and `sweep`; each overrides the config file.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct SimArgs {
    /// Simulation config file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub sources: Option<usize>,
    #[arg(long)]
    pub relays: Option<usize>,
    /// One or more of I, II, III (comma-separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub setting: Vec<Setting>,
    /// Defaults to 1000 for `simulate`, 200 for `sweep`.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated subset of vqm, srm, jrsr.
    #[arg(long, value_delimiter = ',')]
    pub objectives: Vec<ObjectiveKind>,
    #[arg(long)]
    pub beams_source: Option<u32>,
    #[arg(long)]
    pub beams_relay: Option<u32>,
    #[arg(long)]
    pub eirp_dbm: Option<f64>,
    /// Branch-and-bound node limit per solve; exceeding it aborts the run.
    #[arg(long)]
    pub node_budget: Option<usize>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Minimum rate per camera, Gbit/s.
    #[arg(long)]
    pub lower_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// `start:stop:step` or a comma-separated list, Gbit/s.
    #[arg(long)]
    pub lower_bounds: Option<String>,
}

/// Parses a full argument vector (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    CliConfig::try_parse_from(argv)
}

/// Failure of a command, carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_resource() { EXIT_RESOURCE } else { EXIT_USAGE };
        Self { code, message: e.to_string() }
    }
}

impl From<OutputError> for CliError {
    fn from(e: OutputError) -> Self {
        Self { code: EXIT_IO, message: e.to_string() }
    }
}

/// Runs a parsed command, writing the report to `out`. Returns the exit
/// code on success (0, or 3 for an infeasible `solve`).
pub fn run(config: &CliConfig, out: &mut String) -> Result<u8, CliError> {
    match &config.command {
        Command::Linkbudget(a) => linkbudget(a, out),
        Command::Quality(a) => quality(a, out),
        Command::Solve(a) => solve(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Sweep(a) => sweep(a, out),
    }
}

fn linkbudget(args: &LinkbudgetArgs, out: &mut String) -> Result<u8, CliError> {
    let mut p = LinkBudgetParams::default();
    let overrides = [
        (args.eirp_dbm, &mut p.eirp_dbm),
        (args.rx_gain_db, &mut p.rx_gain_db),
        (args.shadow_margin_db, &mut p.shadow_margin_db),
        (args.pathloss_exponent, &mut p.pathloss_exponent),
        (args.wavelength_m, &mut p.wavelength_m),
        (args.bandwidth_hz, &mut p.bandwidth_hz),
        (args.noise_figure_db, &mut p.noise_figure_db),
    ];
    for (value, slot) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    let r = LinkReport::new(args.distance, &p)?;
    let rows = [
        ("distance (m)", r.distance_m),
        ("pathloss F(d) (dB)", r.pathloss_db),
        ("oxygen O(d) (dB)", r.oxygen_db),
        ("signal power (dBm)", r.signal_dbm),
        ("noise power (dBm)", r.noise_dbm),
        ("SNR (dB)", r.snr_db),
        ("capacity (Gbit/s)", r.capacity_bps / 1e9),
    ];
    for (label, v) in rows {
        writeln!(out, "{label:<20} {v:>12.4}").unwrap();
    }
    writeln!(out, "\ndistance_m,pathloss_db,oxygen_db,signal_dbm,noise_dbm,snr_db,capacity_gbps").unwrap();
    let vals: Vec<String> = rows.iter().map(|(_, v)| sim::format_sig(*v)).collect();
    writeln!(out, "{}", vals.join(",")).unwrap();
    Ok(EXIT_OK)
}

fn quality(args: &QualityArgs, out: &mut String) -> Result<u8, CliError> {
    let q = QualityParams { a_max_gbps: args.a_max, log_base: args.log_base };
    let v = f_q(args.rate, &q)?;
    writeln!(out, "f_q({}) = {}", args.rate, sim::format_sig(v)).unwrap();
    writeln!(out, "link quality at half duplex f_q({}/2) = {}", args.rate, sim::format_sig(q.link_quality(args.rate)))
        .unwrap();
    if let Some(x) = args.indicator {
        let h = hessian_eigenvalues(args.rate, x, &q)?;
        writeln!(out, "hessian [[{:.6}, {:.6}], [{:.6}, {:.6}]]", h.h[0][0], h.h[0][1], h.h[1][0], h.h[1][1]).unwrap();
        writeln!(
            out,
            "eigenvalues {:.6} {:.6} ({})",
            h.eigenvalues.0,
            h.eigenvalues.1,
            if h.is_indefinite() { "indefinite" } else { "not indefinite" }
        )
        .unwrap();
    }
    Ok(EXIT_OK)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError { code: EXIT_IO, message: format!("cannot read {}: {e}", path.display()) })
}

fn solve(args: &SolveArgs, out: &mut String) -> Result<u8, CliError> {
    let text = read_file(&args.config)?;
    let file = InstanceFile::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", args.config.display())))?;
    let mut spec = file.to_spec()?;
    if let Some(obj) = args.objective {
        spec.objective = obj;
    }
    let mut opts = SolverOptions::default();
    if let Some(b) = args.node_budget {
        opts.node_budget = b;
    }
    let start = Instant::now();
    let sol = if args.oracle { enumerate_oracle(&spec)? } else { branch_and_bound(&spec, &opts)? };
    let wall = start.elapsed().as_secs_f64();
    output::render_solution(out, &spec, &sol, if args.oracle { "enumeration" } else { "branch-and-bound" }, wall);
    Ok(if sol.is_optimal() { EXIT_OK } else { EXIT_INFEASIBLE })
}

struct Resolved {
    configs: Vec<SimulationConfig>,
    output_dir: PathBuf,
    grid: Option<String>,
    trials_given: bool,
}

fn resolve(sim: &SimArgs, lower_bound: Option<f64>) -> Result<Resolved, CliError> {
    let file = match &sim.config {
        Some(path) => SimulationFile::parse(&read_file(path)?)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
        None => SimulationFile::default(),
    };
    let mut base = SimulationConfig::default();
    file.apply(&mut base);
    if let Some(v) = sim.sources {
        base.num_sources = v;
    }
    if let Some(v) = sim.relays {
        base.num_relays = v;
    }
    if let Some(v) = sim.trials {
        base.trials = v;
    }
    if let Some(v) = sim.seed {
        base.rng_seed = v;
    }
    if !sim.objectives.is_empty() {
        base.objectives = sim.objectives.clone();
    }
    if let Some(v) = sim.beams_source {
        base.beams_source = v;
    }
    if let Some(v) = sim.beams_relay {
        base.beams_relay = v;
    }
    if let Some(v) = sim.eirp_dbm {
        base.link_params.eirp_dbm = v;
    }
    if let Some(v) = sim.node_budget {
        base.solver.node_budget = v;
    }
    if let Some(v) = lower_bound {
        base.lower_bound_gbps = v;
    }
    let settings = if !sim.setting.is_empty() {
        sim.setting.clone()
    } else {
        file.settings.clone().unwrap_or_else(|| Setting::ALL.to_vec())
    };
    let mut configs = Vec::with_capacity(settings.len());
    for setting in settings {
        let cfg = SimulationConfig { setting, ..base.clone() };
        cfg.validate()?;
        configs.push(cfg);
    }
    let output_dir = sim.output_dir.clone().or(file.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let trials_given = sim.trials.is_some() || file.trials.is_some();
    Ok(Resolved { configs, output_dir, grid: file.lower_bounds.clone(), trials_given })
}

fn simulate(args: &SimulateArgs, out: &mut String) -> Result<u8, CliError> {
    let resolved = resolve(&args.sim, args.lower_bound)?;
    let mut results = Vec::new();
    for cfg in &resolved.configs {
        results.push(sim::run_trials(cfg)?);
    }
    let dir = &resolved.output_dir;
    write_atomic(&dir.join("cdf.csv"), &sim::cdf_csv(&results))?;
    write_atomic(&dir.join("summary.csv"), &sim::summary_csv(&results))?;
    write_atomic(&dir.join("summary_detail.csv"), &output::detail_csv(&results))?;
    output::render_summary(out, &results);
    writeln!(out, "wrote cdf.csv, summary.csv, summary_detail.csv to {}", dir.display()).unwrap();
    Ok(EXIT_OK)
}

fn sweep(args: &SweepArgs, out: &mut String) -> Result<u8, CliError> {
    let mut resolved = resolve(&args.sim, None)?;
    if !resolved.trials_given {
        for cfg in &mut resolved.configs {
            cfg.trials = SWEEP_DEFAULT_TRIALS;
        }
    }
    let grid_text = args.lower_bounds.clone().or(resolved.grid.clone()).unwrap_or_else(|| sim::DEFAULT_OUTAGE_GRID.into());
    let grid = sim::parse_grid(&grid_text)?;
    let mut curves = Vec::new();
    for cfg in &resolved.configs {
        curves.push(sim::outage_sweep(cfg, &grid)?);
    }
    let dir = &resolved.output_dir;
    write_atomic(&dir.join("outage.csv"), &sim::outage_csv(&curves))?;
    output::render_outage(out, &curves);
    writeln!(out, "wrote outage.csv to {}", dir.display()).unwrap();
    Ok(EXIT_OK)
}
