//! Human-readable reports and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use mmrelay::sim::{format_sig, OutageCurve, TrialResults};
use mmrelay::{ProblemSpec, Solution};

#[derive(Debug, thiserror::Error)]
#[error("cannot write {}: {source}", path.display())]
pub struct OutputError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Writes `contents` to a sibling temp file and renames it over `path`, so a
/// reader never sees a partially written report. Creates the parent
/// directory if needed.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), OutputError> {
    let err = |source| OutputError { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

pub(crate) fn render_solution(out: &mut String, spec: &ProblemSpec, sol: &Solution, method: &str, wall_s: f64) {
    writeln!(out, "objective  {}", spec.objective).unwrap();
    writeln!(out, "method     {method}").unwrap();
    writeln!(out, "status     {}", sol.status).unwrap();
    if !sol.is_optimal() {
        writeln!(out, "no assignment meets the lower bounds").unwrap();
    } else {
        writeln!(out, "value      {:.6}", sol.objective_value).unwrap();
        writeln!(out, "quality    {:.6}", sol.aggregate_quality()).unwrap();
        writeln!(out, "\nsource  relay  x  rate (Gbit/s)  quality").unwrap();
        for (i, (xs, rates)) in sol.x.iter().zip(&sol.a).enumerate() {
            for (j, (&x, &a)) in xs.iter().zip(rates).enumerate() {
                if x == 1 || a > 0.0 {
                    let q = spec.quality.link_quality(a);
                    writeln!(out, "{i:>6}  {j:>5}  {x}  {a:>13.6}  {q:.6}").unwrap();
                }
            }
        }
        writeln!(out, "\nsource  total rate  quality").unwrap();
        for (i, (r, q)) in sol.per_source_rate.iter().zip(&sol.per_source_quality).enumerate() {
            writeln!(out, "{i:>6}  {r:>10.6}  {q:.6}").unwrap();
        }
    }
    writeln!(out, "\nnodes {}, lp solves {}, {:.3} s", sol.stats.nodes, sol.stats.lp_solves, wall_s).unwrap();
}

/// Columns `scheme,setting,mean_source_quality,feasible_fraction`.
pub(crate) fn detail_csv(results: &[TrialResults]) -> String {
    let mut out = String::from("scheme,setting,mean_source_quality,feasible_fraction\n");
    for res in results {
        for scheme in &res.schemes {
            writeln!(
                out,
                "{},{},{},{}",
                scheme.objective,
                res.setting,
                format_sig(scheme.mean_source_quality()),
                format_sig(scheme.feasible_fraction())
            )
            .unwrap();
        }
    }
    out
}

pub(crate) fn render_summary(out: &mut String, results: &[TrialResults]) {
    writeln!(out, "setting  scheme  trials  mean quality  feasible").unwrap();
    for res in results {
        for scheme in &res.schemes {
            writeln!(
                out,
                "{:>7}  {:>6}  {:>6}  {:>12.4}  {:>7.1}%",
                res.setting.as_str(),
                scheme.objective.as_str(),
                res.trials,
                scheme.mean_quality(),
                100.0 * scheme.feasible_fraction()
            )
            .unwrap();
        }
    }
}

pub(crate) fn render_outage(out: &mut String, curves: &[OutageCurve]) {
    for curve in curves {
        for series in &curve.series {
            writeln!(out, "{} setting {}", series.objective, series.setting).unwrap();
            for (l, p) in curve.grid.iter().zip(&series.outage) {
                writeln!(out, "  L = {l:.3} Gbit/s  outage {p:.4}").unwrap();
            }
        }
    }
}
