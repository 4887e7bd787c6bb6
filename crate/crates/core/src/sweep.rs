//! Parameter sweeps rendered as CSV, one row per grid point.
//!
//! The CSV schema is versioned in a leading comment line so downstream
//! plotting scripts can detect drift. Floats are written with 12 significant
//! digits, which round-trips and keeps files byte-stable across runs.

use serde::Serialize;

use crate::bounds::{self, LeakageReport};
use crate::error::{Error, Result};

pub const SWEEP_SCHEMA: &str = "# rrdps-sweep-v1";
pub const SATURATION_SCHEMA: &str = "# rrdps-saturation-v1";
pub const COMPARE_SCHEMA: &str = "# rrdps-compare-v1";

/// One β grid point of a fixed-d sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub beta: f64,
    pub statdist_leak: f64,
    pub i_ae: f64,
    pub minentropy_leak: f64,
    pub accessible_info: f64,
    pub qkd_rate: f64,
    pub syk: f64,
    pub sk2017: f64,
}

pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}

pub fn sweep_rows(d: usize, beta_min: f64, beta_max: f64, step: f64) -> Result<Vec<SweepRow>> {
    if !(step > 0.0) {
        return Err(Error::Domain(format!("step = {step} must be positive")));
    }
    if beta_min > beta_max {
        return Err(Error::Domain(format!("empty range [{beta_min}, {beta_max}]")));
    }
    let mut rows = Vec::new();
    let n = ((beta_max - beta_min) / step).round() as usize;
    for i in 0..=n {
        let beta = (beta_min + i as f64 * step).min(beta_max);
        let prior = bounds::prior_bounds(beta, d)?;
        rows.push(SweepRow {
            d,
            beta,
            statdist_leak: bounds::statdist_leak(beta, d)?,
            i_ae: bounds::i_ae(beta, d)?,
            minentropy_leak: bounds::min_entropy_leak(beta, d)?,
            accessible_info: bounds::accessible_info(beta, d)?,
            qkd_rate: bounds::qkd_rate(beta, d)?,
            syk: prior.syk,
            sk2017: prior.sk2017,
        });
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_SCHEMA);
    out.push('\n');
    out.push_str("d,beta,statdist_leak,i_ae,minentropy_leak,accessible_info,qkd_rate,syk,sk2017\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.d,
            format_float(r.beta),
            format_float(r.statdist_leak),
            format_float(r.i_ae),
            format_float(r.minentropy_leak),
            format_float(r.accessible_info),
            format_float(r.qkd_rate),
            format_float(r.syk),
            format_float(r.sk2017),
        ));
    }
    out
}

/// One dimension of the saturation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SaturationRow {
    pub d: usize,
    pub beta_star: f64,
    pub beta_zero: f64,
    pub beta_sat: f64,
    pub statdist_leak_sat: f64,
    pub i_ae_sat: f64,
    pub minentropy_leak_sat: f64,
    pub accessible_info_sat: f64,
    pub syk: f64,
}

pub fn saturation_rows(d_min: usize, d_max: usize) -> Result<Vec<SaturationRow>> {
    if d_min > d_max {
        return Err(Error::Domain(format!("empty range [{d_min}, {d_max}]")));
    }
    let mut rows = Vec::new();
    for d in d_min..=d_max {
        let report: LeakageReport = bounds::leakage_report(d, 0.5)?;
        rows.push(SaturationRow {
            d,
            beta_star: report.beta_star,
            beta_zero: report.beta_zero,
            beta_sat: report.beta_sat,
            statdist_leak_sat: report.statdist_leak,
            i_ae_sat: report.i_ae,
            minentropy_leak_sat: report.minentropy_leak,
            accessible_info_sat: report.accessible_info,
            syk: bounds::prior_bounds(0.5, d)?.syk,
        });
    }
    Ok(rows)
}

pub fn saturation_csv(rows: &[SaturationRow]) -> String {
    let mut out = String::from(SATURATION_SCHEMA);
    out.push('\n');
    out.push_str(
        "d,beta_star,beta_zero,beta_sat,statdist_leak_sat,i_ae_sat,minentropy_leak_sat,accessible_info_sat,syk\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.d,
            format_float(r.beta_star),
            format_float(r.beta_zero),
            format_float(r.beta_sat),
            format_float(r.statdist_leak_sat),
            format_float(r.i_ae_sat),
            format_float(r.minentropy_leak_sat),
            format_float(r.accessible_info_sat),
            format_float(r.syk),
        ));
    }
    out
}
