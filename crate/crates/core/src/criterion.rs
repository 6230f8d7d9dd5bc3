//! The rotational-invariance criterion (E, E) > 4^N·T_max, GHZ visibility
//! thresholds, and visibility scans with CSV/JSON output.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{ghz_planar_tensor, CorrelationTensor};
use crate::error::{check_unit_interval, Error, Result};
use crate::lhv::two_setting_model_exists;
use crate::tensor_analysis::{analytic_inner_product, sum_of_squares, t_max, TMaxConfig};

/// Relative slack on lhs > rhs, so an exact tie (V = v_ri) is not a violation.
pub const VIOLATION_REL_TOL: f64 = 1e-12;

pub const CSV_HEADER: &str = "N,V,lhs,rhs,violated,sum_sq,two_setting_model,region";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub n_parties: usize,
    /// (E, E) = π^N Σ T²
    pub lhs: f64,
    /// 4^N·T_max
    pub rhs: f64,
    pub violated: bool,
    pub two_setting_model: bool,
    /// lhs − rhs
    pub margin: f64,
    pub sum_sq: f64,
    pub t_max: f64,
    pub certified: bool,
}

impl CriterionReport {
    fn assemble(tensor: &CorrelationTensor, t_max_value: f64, certified: bool) -> Result<Self> {
        let n = tensor.n_parties();
        let lhs = analytic_inner_product(tensor, tensor)?;
        let rhs = 4f64.powi(n as i32) * t_max_value;
        let margin = lhs - rhs;
        Ok(Self {
            n_parties: n,
            lhs,
            rhs,
            violated: margin > VIOLATION_REL_TOL * rhs,
            two_setting_model: two_setting_model_exists(tensor),
            margin,
            sum_sq: sum_of_squares(tensor),
            t_max: t_max_value,
            certified,
        })
    }

    pub fn region(&self) -> Region {
        match (self.violated, self.two_setting_model) {
            (false, _) => Region::Local,
            (true, true) => Region::Paradox,
            (true, false) => Region::Nonlocal,
        }
    }
}

/// violated = true: no local realistic model reproduces E, since the best
/// achievable (E_LR, E) falls short of (E, E).
pub fn ri_criterion(tensor: &CorrelationTensor, config: &TMaxConfig) -> Result<CriterionReport> {
    let tm = t_max(tensor, config)?;
    CriterionReport::assemble(tensor, tm.value, tm.certified)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzThresholds {
    pub n_parties: usize,
    /// 2(2/π)^N: above it the criterion is violated.
    pub v_ri: f64,
    /// 1/√(2^{N−1}): at or below it Σ T² ≤ 1.
    pub v_two_setting: f64,
    pub gap_nonempty: bool,
}

pub fn ghz_thresholds(n_parties: usize) -> Result<GhzThresholds> {
    if n_parties == 0 {
        return Err(Error::Domain {
            name: "n_parties",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let n = n_parties as i32;
    let v_ri = 2.0 * (2.0 / PI).powi(n);
    let v_two_setting = 2f64.powf(-(n - 1) as f64 / 2.0);
    Ok(GhzThresholds {
        n_parties,
        v_ri,
        v_two_setting,
        gap_nonempty: v_ri < v_two_setting,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Region {
    /// No violation of the criterion.
    Local,
    /// Violated although a two-setting model of the measured data exists.
    Paradox,
    /// Violated and Σ T² > 1.
    Nonlocal,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Local => "LOCAL",
            Region::Paradox => "PARADOX",
            Region::Nonlocal => "NONLOCAL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub visibility: f64,
    pub region: Region,
    pub report: CriterionReport,
}

/// Evaluates the criterion for GHZ(N, V) on `steps + 1` evenly spaced
/// visibilities from `v_min` to `v_max`.
///
/// T_max is computed once for V = 1 and scaled, since the GHZ family is
/// V times a fixed tensor and T_max is positively homogeneous.
pub fn ghz_scan(
    n_parties: usize,
    v_min: f64,
    v_max: f64,
    steps: usize,
    config: &TMaxConfig,
) -> Result<Vec<ScanPoint>> {
    check_unit_interval("v_min", v_min)?;
    check_unit_interval("v_max", v_max)?;
    if v_min > v_max {
        return Err(Error::Domain {
            name: "v_min",
            value: v_min,
            range: "[0, v_max]",
        });
    }
    if steps == 0 {
        return Err(Error::Domain {
            name: "steps",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let unit = t_max(&ghz_planar_tensor(n_parties, 1.0)?, config)?;
    (0..=steps)
        .into_par_iter()
        .map(|i| {
            let v = if i == steps {
                v_max
            } else {
                v_min + (v_max - v_min) * i as f64 / steps as f64
            };
            let tensor = ghz_planar_tensor(n_parties, v)?;
            let report = CriterionReport::assemble(&tensor, v * unit.value, unit.certified)?;
            Ok(ScanPoint {
                visibility: v,
                region: report.region(),
                report,
            })
        })
        .collect()
}

/// printf-style `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

const CSV_DIGITS: usize = 12;

pub fn write_scan_csv<W: Write>(points: &[ScanPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in points {
        let r = &p.report;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n_parties,
            format_sig(p.visibility, CSV_DIGITS),
            format_sig(r.lhs, CSV_DIGITS),
            format_sig(r.rhs, CSV_DIGITS),
            r.violated,
            format_sig(r.sum_sq, CSV_DIGITS),
            r.two_setting_model,
            p.region
        )?;
    }
    Ok(())
}

pub fn write_scan_json<W: Write>(points: &[ScanPoint], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, points)?;
    Ok(())
}
