//! CSV rendering. Numbers use nine significant digits so output is
//! byte-stable across runs.

use std::fmt::Write;

use super::{OutageCurve, TrialResults};

/// `v` with nine significant digits in plain decimal notation.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v == 0.0 { "0".into() } else { format!("{v}") };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // the rounding may have carried into a new digit; redo with one fewer decimal
    let digits = s.trim_start_matches('-').chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
    if digits > 9 && decimals > 0 {
        let d = decimals - 1;
        format!("{v:.d$}")
    } else {
        s
    }
}

/// Columns `scheme,setting,trial,aggregate_quality`; within each block,
/// rows are sorted by quality (then trial).
pub fn cdf_csv(results: &[TrialResults]) -> String {
    let mut out = String::from("scheme,setting,trial,aggregate_quality\n");
    for res in results {
        for scheme in &res.schemes {
            let mut rows: Vec<(f64, usize)> = scheme.records.iter().map(|r| (r.aggregate_quality, r.trial)).collect();
            rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (q, t) in rows {
                writeln!(out, "{},{},{},{}", scheme.objective, res.setting, t, format_sig(q)).unwrap();
            }
        }
    }
    out
}

/// Columns `scheme,setting,num_sources,num_relays,mean_quality`.
pub fn summary_csv(results: &[TrialResults]) -> String {
    let mut out = String::from("scheme,setting,num_sources,num_relays,mean_quality\n");
    for res in results {
        for scheme in &res.schemes {
            writeln!(
                out,
                "{},{},{},{},{}",
                scheme.objective,
                res.setting,
                res.num_sources,
                res.num_relays,
                format_sig(scheme.mean_quality())
            )
            .unwrap();
        }
    }
    out
}

/// Columns `scheme,setting,lower_bound_gbps,outage_prob`.
pub fn outage_csv(curves: &[OutageCurve]) -> String {
    let mut out = String::from("scheme,setting,lower_bound_gbps,outage_prob\n");
    for curve in curves {
        for series in &curve.series {
            for (l, p) in curve.grid.iter().zip(&series.outage) {
                writeln!(out, "{},{},{},{}", series.objective, series.setting, format_sig(*l), format_sig(*p)).unwrap();
            }
        }
    }
    out
}
