//! Log-log power-law fits of timing against problem size.

use std::fmt;

use fisher_core::{FisherError, Result};

use crate::timing::BenchRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    VaryN,
    VaryM,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::VaryN => "n",
            Axis::VaryM => "m",
        })
    }
}

/// `time ~ size^exponent` fitted by least squares on logs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub axis: Axis,
    pub exponent: f64,
    pub r_squared: f64,
    /// `(size, median_seconds)`, in input order.
    pub points: Vec<(f64, f64)>,
}

/// Minimum ratio between the largest and smallest size.
pub const MIN_SPREAD: f64 = 4.0;

/// Fits the records along `axis`.
///
/// Requires at least three successful records of one method that share the
/// other dimension, with sizes spanning at least [`MIN_SPREAD`].
pub fn fit_scaling(records: &[BenchRecord], axis: Axis) -> Result<ScalingFit> {
    let first = records
        .first()
        .ok_or_else(|| refuse("no records to fit"))?;
    if records.iter().any(|r| r.method != first.method) {
        return Err(refuse("records mix methods"));
    }
    let fixed = |r: &BenchRecord| match axis {
        Axis::VaryN => r.m,
        Axis::VaryM => r.n,
    };
    if records.iter().any(|r| fixed(r) != fixed(first)) {
        return Err(refuse("records do not share the fixed dimension"));
    }
    if let Some(bad) = records.iter().find(|r| !r.status.is_ok()) {
        return Err(refuse(&format!(
            "record n={} m={} has status {}",
            bad.n, bad.m, bad.status
        )));
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            let size = match axis {
                Axis::VaryN => r.n,
                Axis::VaryM => r.m,
            };
            (size as f64, r.median_seconds)
        })
        .collect();
    let (exponent, r_squared) = fit_power_law(&points)?;
    Ok(ScalingFit { axis, exponent, r_squared, points })
}

/// Slope and r^2 of `log(y)` against `log(x)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(refuse("need at least 3 points"));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(refuse("sizes and times must be positive and finite"));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi / lo < MIN_SPREAD {
        return Err(refuse(&format!("sizes span {:.2}x, need {MIN_SPREAD}x", hi / lo)));
    }
    let k = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok((slope, r_squared))
}

fn refuse(msg: &str) -> FisherError {
    FisherError::InvalidArgument(format!("scaling fit refused: {msg}"))
}
