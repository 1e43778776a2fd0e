//! Log-log least squares of a measured norm against ε.

use crate::HarnessError;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// 95% Student-t interval for the slope.
    pub ci_low: f64,
    pub ci_high: f64,
    /// ε values entering the fit.
    pub eps_used: Vec<f64>,
    /// Largest absolute log residual.
    pub max_residual: f64,
}

/// Ordinary least squares of log(value) on log(ε).
pub fn fit_rate(eps: &[f64], values: &[f64]) -> Result<RateFit, HarnessError> {
    if eps.len() != values.len() {
        return Err(HarnessError::DegenerateFit(format!("{} eps against {} values", eps.len(), values.len())));
    }
    if eps.len() < 3 {
        return Err(HarnessError::DegenerateFit(format!("{} ladder points, need at least 3", eps.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(HarnessError::DegenerateFit(format!("non-positive value {v}")));
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(HarnessError::DegenerateFit("non-positive eps".into()));
    }
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(HarnessError::DegenerateFit("all eps equal".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - intercept - slope * a).collect();
    let ssr: f64 = res.iter().map(|r| r * r).sum();
    let dof = n - 2.0;
    let stderr = (ssr / dof / sxx).sqrt();
    let tq = StudentsT::new(0.0, 1.0, dof).map(|t| t.inverse_cdf(0.975)).unwrap_or(f64::NAN);
    Ok(RateFit {
        slope,
        intercept,
        stderr,
        ci_low: slope - tq * stderr,
        ci_high: slope + tq * stderr,
        eps_used: eps.to_vec(),
        max_residual: res.iter().fold(0.0, |m, r| m.max(r.abs())),
    })
}

/// Relative residual above which the coarsest point counts as
/// pre-asymptotic (log units).
pub const CURVATURE_THRESHOLD: f64 = 0.05;

/// Fits all points, except that the coarsest ε (first entry of a decreasing
/// ladder) is dropped when at least three points remain and its residual
/// against the fit of the inner points exceeds both three residual standard
/// deviations of that fit and [`CURVATURE_THRESHOLD`].
pub fn fit_rate_adaptive(eps: &[f64], values: &[f64]) -> Result<RateFit, HarnessError> {
    let full = fit_rate(eps, values)?;
    if eps.len() < 4 {
        return Ok(full);
    }
    let coarse = eps.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    let (ie, iv): (Vec<f64>, Vec<f64>) =
        eps.iter().zip(values).enumerate().filter(|(i, _)| *i != coarse).map(|(_, (e, v))| (*e, *v)).unzip();
    let inner = fit_rate(&ie, &iv)?;
    let predicted = inner.intercept + inner.slope * eps[coarse].ln();
    let r = (values[coarse].ln() - predicted).abs();
    let sxx: f64 = {
        let n = ie.len() as f64;
        let m = ie.iter().map(|e| e.ln()).sum::<f64>() / n;
        ie.iter().map(|e| (e.ln() - m).powi(2)).sum()
    };
    let sigma = inner.stderr * sxx.sqrt();
    if r > 3.0 * sigma && r > CURVATURE_THRESHOLD {
        Ok(inner)
    } else {
        Ok(full)
    }
}
