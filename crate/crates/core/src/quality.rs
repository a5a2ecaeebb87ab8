//! Normalized video quality as a function of coding rate.
//!
//! Quality grows logarithmically with rate and is normalized so that the
//! uncompressed rate `a_max` scores exactly 1. Rates above `a_max` saturate.
//! The logarithm base cancels in the normalization; it only matters for the
//! Hessian diagnostic, where the un-normalized slope `K / ln β` appears.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityParams {
    /// Uncompressed stream rate in Gbit/s.
    pub a_max_gbps: f64,
    /// Logarithm base, strictly greater than 1.
    pub log_base: f64,
}

impl Default for QualityParams {
    fn default() -> Self {
        Self { a_max_gbps: 1.5, log_base: std::f64::consts::E }
    }
}

impl QualityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_max_gbps.is_finite() && self.a_max_gbps > 0.0) {
            return Err(Error::invalid(format!("a_max_gbps must be positive, got {}", self.a_max_gbps)));
        }
        if !(self.log_base.is_finite() && self.log_base > 1.0) {
            return Err(Error::invalid(format!("log_base must exceed 1, got {}", self.log_base)));
        }
        Ok(())
    }

    /// Normalization constant `K = 1 / log_β(a_max + 1)`.
    pub fn k(&self) -> f64 {
        self.log_base.ln() / self.a_max_gbps.ln_1p()
    }

    /// Clamped quality without domain checks. Negative rates score 0.
    pub fn value(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        a.min(self.a_max_gbps).ln_1p() / self.a_max_gbps.ln_1p()
    }

    /// Derivative of the unclamped curve, `1 / ((a + 1) ln(a_max + 1))`.
    pub fn slope(&self, a: f64) -> f64 {
        1.0 / ((a.max(0.0) + 1.0) * self.a_max_gbps.ln_1p())
    }

    /// Quality delivered by a relayed link carrying `a` Gbit/s; the
    /// half-duplex relay halves the end-to-end rate.
    pub fn link_quality(&self, a: f64) -> f64 {
        self.value(0.5 * a)
    }

    /// Link rate at which [`link_quality`](Self::link_quality) saturates.
    pub fn saturation_rate(&self) -> f64 {
        2.0 * self.a_max_gbps
    }
}

/// Normalized quality `log_β(min(a, a_max) + 1) / log_β(a_max + 1)`.
pub fn f_q(a: f64, q: &QualityParams) -> Result<f64> {
    q.validate()?;
    if !(a >= 0.0) {
        return Err(Error::domain(format!("rate must be non-negative, got {a}")));
    }
    let log_b = |v: f64| v.ln() / q.log_base.ln();
    Ok(log_b(a.min(q.a_max_gbps) + 1.0) / log_b(q.a_max_gbps + 1.0))
}

/// Second-order diagnostic of `f(a, x) = K·log_β(a + 1)·x` with `x` relaxed
/// to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianReport {
    /// Second derivatives ordered as `(x, a)`:
    /// `[[f_xx, f_xa], [f_ax, f_aa]]`.
    pub h: [[f64; 2]; 2],
    /// `(I/2 - ½√(I² + (2K/lnβ/(a+1))²), I/2 + ½√(...))`.
    pub eigenvalues: (f64, f64),
    /// `I = -(K/ln β)·x / (a+1)²`, the trace of `h`.
    pub trace_term: f64,
}

impl HessianReport {
    pub fn determinant(&self) -> f64 {
        self.h[0][0] * self.h[1][1] - self.h[0][1] * self.h[1][0]
    }

    pub fn is_indefinite(&self) -> bool {
        self.eigenvalues.0 * self.eigenvalues.1 < 0.0
    }
}

/// Hessian of the relaxed rate-times-indicator objective and its closed-form
/// eigenvalues. Uses the unclamped quality curve.
pub fn hessian_eigenvalues(a: f64, x: f64, q: &QualityParams) -> Result<HessianReport> {
    q.validate()?;
    if !(0.0..=q.a_max_gbps).contains(&a) {
        return Err(Error::domain(format!("rate {a} outside [0, {}]", q.a_max_gbps)));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("indicator {x} outside [0, 1]")));
    }
    let c = q.k() / q.log_base.ln();
    let off = c / (a + 1.0);
    let aa = -x * c / ((a + 1.0) * (a + 1.0));
    let trace_term = aa;
    let root = (trace_term * trace_term + (2.0 * off) * (2.0 * off)).sqrt();
    Ok(HessianReport {
        h: [[0.0, off], [off, aa]],
        eigenvalues: (0.5 * trace_term - 0.5 * root, 0.5 * trace_term + 0.5 * root),
        trace_term,
    })
}
