//! Link budget for a single 60 GHz hop.
//!
//! Received power follows `E + G_r - W - O(d) + F(d)` where `F(d)` is a
//! log-distance pathloss (a negative gain) and `O(d)` is oxygen absorption.
//! Capacity is the Shannon rate of the resulting SNR over the channel
//! bandwidth.
//!
//! Oxygen absorption is applied to the whole path once the link is longer
//! than the threshold and ignored otherwise. This makes `O(d)` (and thus the
//! capacity) jump at the threshold: with the defaults the received power
//! drops by 3 dB just past 200 m.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radio constants of the link budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudgetParams {
    /// Equivalent isotropically radiated power, dBm.
    pub eirp_dbm: f64,
    /// Receiver antenna gain, dB.
    pub rx_gain_db: f64,
    /// Shadowing margin, dB.
    pub shadow_margin_db: f64,
    pub pathloss_exponent: f64,
    pub wavelength_m: f64,
    pub bandwidth_hz: f64,
    /// Thermal noise power spectral density, dBm/Hz.
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    /// Oxygen absorption slope, dB per meter.
    pub oxygen_db_per_m: f64,
    /// Links no longer than this see no oxygen absorption.
    pub oxygen_threshold_m: f64,
}

/// EIRP cap in the USA, dBm.
pub const EIRP_USA_DBM: f64 = 40.0;
/// EIRP cap in Europe, dBm.
pub const EIRP_EUROPE_DBM: f64 = 57.0;

impl Default for LinkBudgetParams {
    fn default() -> Self {
        Self {
            eirp_dbm: EIRP_USA_DBM,
            rx_gain_db: 40.0,
            shadow_margin_db: 10.0,
            pathloss_exponent: 2.5,
            wavelength_m: 0.005,
            bandwidth_hz: 2.16e9,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 6.0,
            oxygen_db_per_m: 15.0 / 1000.0,
            oxygen_threshold_m: 200.0,
        }
    }
}

impl LinkBudgetParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.eirp_dbm,
            self.rx_gain_db,
            self.shadow_margin_db,
            self.pathloss_exponent,
            self.wavelength_m,
            self.bandwidth_hz,
            self.noise_psd_dbm_hz,
            self.noise_figure_db,
            self.oxygen_db_per_m,
            self.oxygen_threshold_m,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("link budget parameters must be finite"));
        }
        if self.bandwidth_hz <= 0.0 {
            return Err(Error::invalid("bandwidth_hz must be positive"));
        }
        if self.wavelength_m <= 0.0 {
            return Err(Error::invalid("wavelength_m must be positive"));
        }
        if self.pathloss_exponent <= 0.0 {
            return Err(Error::invalid("pathloss_exponent must be positive"));
        }
        if self.oxygen_threshold_m < 0.0 || self.oxygen_db_per_m < 0.0 {
            return Err(Error::invalid(
                "oxygen_threshold_m and oxygen_db_per_m must be non-negative",
            ));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

fn check_distance(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("link distance must be positive and finite, got {d}")))
    }
}

/// Mean pathloss `10·log10((λ/(4πd))^n)`; negative for any realistic link.
pub fn pathloss_db(d: f64, p: &LinkBudgetParams) -> Result<f64> {
    check_distance(d)?;
    Ok(10.0 * p.pathloss_exponent * (p.wavelength_m / (4.0 * PI * d)).log10())
}

/// Oxygen absorption over the whole path, zero at or below the threshold.
pub fn oxygen_db(d: f64, p: &LinkBudgetParams) -> f64 {
    if d > p.oxygen_threshold_m {
        p.oxygen_db_per_m * d
    } else {
        0.0
    }
}

pub fn signal_power_dbm(d: f64, p: &LinkBudgetParams) -> Result<f64> {
    let fd = pathloss_db(d, p)?;
    Ok(p.eirp_dbm + p.rx_gain_db - p.shadow_margin_db - oxygen_db(d, p) + fd)
}

pub fn noise_power_dbm(p: &LinkBudgetParams) -> f64 {
    p.noise_psd_dbm_hz + 10.0 * p.bandwidth_hz.log10() + p.noise_figure_db
}

pub fn snr_db(d: f64, p: &LinkBudgetParams) -> Result<f64> {
    Ok(signal_power_dbm(d, p)? - noise_power_dbm(p))
}

/// Shannon capacity of a link of length `d` meters, in bit/s.
pub fn capacity_bps(d: f64, p: &LinkBudgetParams) -> Result<f64> {
    let snr = db_to_linear(snr_db(d, p)?);
    Ok(p.bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2)
}

/// Every intermediate quantity of the budget for one link length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkReport {
    pub distance_m: f64,
    pub pathloss_db: f64,
    pub oxygen_db: f64,
    pub signal_dbm: f64,
    pub noise_dbm: f64,
    pub snr_db: f64,
    pub capacity_bps: f64,
}

impl LinkReport {
    pub fn new(d: f64, p: &LinkBudgetParams) -> Result<Self> {
        p.validate()?;
        let pathloss = pathloss_db(d, p)?;
        let signal = signal_power_dbm(d, p)?;
        let noise = noise_power_dbm(p);
        Ok(Self {
            distance_m: d,
            pathloss_db: pathloss,
            oxygen_db: oxygen_db(d, p),
            signal_dbm: signal,
            noise_dbm: noise,
            snr_db: signal - noise,
            capacity_bps: capacity_bps(d, p)?,
        })
    }
}

/// Longest link (within `max_m`) whose capacity still reaches `rate_bps`.
///
/// Capacity is strictly decreasing in distance, so bisection brackets the
/// crossing even across the oxygen discontinuity. Returns `None` when even a
/// 1 mm link falls short, and `Some(max_m)` when the whole range qualifies.
pub fn max_range_m(rate_bps: f64, max_m: f64, p: &LinkBudgetParams) -> Result<Option<f64>> {
    p.validate()?;
    let mut lo = 1e-3;
    if capacity_bps(lo, p)? < rate_bps {
        return Ok(None);
    }
    let mut hi = max_m;
    if capacity_bps(hi, p)? >= rate_bps {
        return Ok(Some(hi));
    }
    while hi - lo > 1e-9 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if capacity_bps(mid, p)? >= rate_bps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn defaults() -> LinkBudgetParams {
        LinkBudgetParams::default()
    }

    #[test]
    fn pathloss_reference_points() {
        let p = defaults();
        // 25·log10(0.005 / (4π·d)) evaluated independently
        let at = |d: f64| 25.0 * (0.005 / (4.0 * PI * d)).log10();
        assert_abs_diff_eq!(pathloss_db(100.0, &p).unwrap(), at(100.0), epsilon = 1e-12);
        assert_abs_diff_eq!(pathloss_db(100.0, &p).unwrap(), -135.01, epsilon = 5e-3);
        assert_abs_diff_eq!(pathloss_db(200.0, &p).unwrap(), -142.53, epsilon = 5e-3);
        let unity = p.wavelength_m / (4.0 * PI);
        for n in [1.0, 2.0, 3.7] {
            let q = LinkBudgetParams { pathloss_exponent: n, ..p };
            assert_abs_diff_eq!(pathloss_db(unity, &q).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pathloss_rejects_non_positive_distance() {
        let p = defaults();
        assert!(matches!(pathloss_db(0.0, &p), Err(Error::Domain(_))));
        assert!(matches!(pathloss_db(-3.0, &p), Err(Error::Domain(_))));
        assert!(capacity_bps(0.0, &p).is_err());
        assert!(signal_power_dbm(f64::NAN, &p).is_err());
    }

    #[test]
    fn oxygen_is_piecewise_and_strict_at_threshold() {
        let p = defaults();
        assert_abs_diff_eq!(oxygen_db(300.0, &p), 4.5, epsilon = 1e-12);
        assert_eq!(oxygen_db(150.0, &p), 0.0);
        assert_eq!(oxygen_db(200.0, &p), 0.0);
        assert_abs_diff_eq!(oxygen_db(200.0 + 1e-9, &p), 3.0, epsilon = 1e-9);
        for d in [0.0, 1.0, 50.0, 199.999, 200.0] {
            assert_eq!(oxygen_db(d, &p), 0.0);
        }
        for d in [200.5, 250.0, 1000.0] {
            assert_abs_diff_eq!(oxygen_db(d, &p), 0.015 * d, epsilon = 1e-12);
        }
    }

    #[test]
    fn signal_power_reference_points() {
        let p = defaults();
        assert_abs_diff_eq!(signal_power_dbm(100.0, &p).unwrap(), -65.01, epsilon = 5e-3);
        assert_abs_diff_eq!(signal_power_dbm(300.0, &p).unwrap(), -81.43, epsilon = 5e-3);
        let no_margin = LinkBudgetParams { shadow_margin_db: 0.0, ..p };
        assert_eq!(
            signal_power_dbm(100.0, &no_margin).unwrap(),
            signal_power_dbm(100.0, &p).unwrap() + 10.0
        );
    }

    #[test]
    fn noise_power_reference_points() {
        let p = defaults();
        assert_abs_diff_eq!(noise_power_dbm(&p), -74.655, epsilon = 1e-3);
        let unit = LinkBudgetParams { bandwidth_hz: 1.0, noise_figure_db: 0.0, ..p };
        assert_eq!(noise_power_dbm(&unit), -174.0);
        let doubled = LinkBudgetParams { bandwidth_hz: 2.0 * p.bandwidth_hz, ..p };
        assert_abs_diff_eq!(
            noise_power_dbm(&doubled) - noise_power_dbm(&p),
            10.0 * 2f64.log10(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn capacity_reference_points() {
        let p = defaults();
        // SNR ≈ 2.12 dB at 200 m and ≈ -6.78 dB at 300 m
        assert_abs_diff_eq!(snr_db(200.0, &p).unwrap(), 2.12, epsilon = 0.01);
        assert_abs_diff_eq!(snr_db(300.0, &p).unwrap(), -6.78, epsilon = 0.01);
        assert_abs_diff_eq!(capacity_bps(200.0, &p).unwrap() / 1e9, 3.0, epsilon = 0.02);
        assert_abs_diff_eq!(capacity_bps(300.0, &p).unwrap() / 1e9, 0.59, epsilon = 0.01);
        let range = max_range_m(1.5e9, 10_000.0, &p).unwrap().unwrap();
        assert!(range > 200.0 && range < 300.0, "crossing at {range}");
    }

    #[test]
    fn capacity_monotone_on_grid() {
        let p = defaults();
        let mut prev = f64::INFINITY;
        let mut d = 0.5;
        while d < 10_000.0 {
            let c = capacity_bps(d, &p).unwrap();
            assert!(c > 0.0);
            assert!(c < prev, "capacity not decreasing at {d}");
            prev = c;
            d *= 1.01;
        }
    }

    #[test]
    fn validate_rejects_bad_params() {
        let p = defaults();
        assert!(p.validate().is_ok());
        assert!(LinkBudgetParams { bandwidth_hz: 0.0, ..p }.validate().is_err());
        assert!(LinkBudgetParams { wavelength_m: -1.0, ..p }.validate().is_err());
        assert!(LinkBudgetParams { pathloss_exponent: 0.0, ..p }.validate().is_err());
        assert!(LinkBudgetParams { oxygen_threshold_m: -1.0, ..p }.validate().is_err());
        assert!(LinkBudgetParams { oxygen_db_per_m: -0.1, ..p }.validate().is_err());
    }

    proptest! {
        #[test]
        fn log_distance_law(d1 in 1e-3f64..1e4, d2 in 1e-3f64..1e4, n in 1.0f64..4.0) {
            let p = LinkBudgetParams { pathloss_exponent: n, ..defaults() };
            let diff = pathloss_db(d2, &p).unwrap() - pathloss_db(d1, &p).unwrap();
            let expect = -10.0 * n * (d2 / d1).log10();
            prop_assert!((diff - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
        }

        #[test]
        fn db_round_trip(db in -200.0f64..200.0) {
            let back = linear_to_db(db_to_linear(db));
            prop_assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
            let lin = db_to_linear(db);
            let again = db_to_linear(linear_to_db(lin));
            prop_assert!(((again - lin) / lin).abs() <= 1e-12);
        }
    }
}
