//! TOML schemas of the commands that do not reuse a library config.
//! Every table rejects unknown keys; missing keys take the defaults below.

use crate::CliError;
use oberbeck_linmodes::{lin_grid, log_grid, Variant};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Reads a config file, or returns the defaults when no path is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let src = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            toml::from_str(&src).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Defaults rendered as TOML for the help text.
pub fn defaults_toml<T: Serialize + Default>() -> String {
    toml::to_string(&T::default()).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinearVerifyConfig {
    pub variant: Variant,
    pub kappa_t: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub r_points: usize,
    pub t_max: f64,
    pub t_points: usize,
    /// Upper bound on C for the reported pair.
    pub c_target: f64,
    /// Explicit frequencies, replacing the log-spaced grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    /// Explicit times, replacing the uniform grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
}

impl Default for LinearVerifyConfig {
    fn default() -> Self {
        LinearVerifyConfig {
            variant: Variant::Conducting,
            kappa_t: 1.0,
            r_min: 2f64.powi(-6),
            r_max: 2f64.powi(6),
            r_points: 64,
            t_max: 50.0,
            t_points: 32,
            c_target: 10.0,
            r_grid: None,
            t_grid: None,
        }
    }
}

impl LinearVerifyConfig {
    pub fn r_values(&self) -> Vec<f64> {
        self.r_grid.clone().unwrap_or_else(|| log_grid(self.r_min, self.r_max, self.r_points))
    }

    pub fn t_values(&self) -> Vec<f64> {
        self.t_grid.clone().unwrap_or_else(|| lin_grid(0.0, self.t_max, self.t_points))
    }

    /// Schema checks. A zero κ̃ passes here: it is a verification failure
    /// for the conducting variant, not a malformed file.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.r_grid.is_none() && (self.r_points == 0 || !(self.r_min > 0.0) || !(self.r_max >= self.r_min)) {
            return bad(format!("r grid needs 0 < r_min <= r_max and r_points > 0, got {} {} {}", self.r_min, self.r_max, self.r_points));
        }
        if self.t_grid.is_none() && (self.t_points == 0 || !(self.t_max >= 0.0)) {
            return bad(format!("t grid needs t_max >= 0 and t_points > 0, got {} {}", self.t_max, self.t_points));
        }
        let r = self.r_values();
        if r.is_empty() {
            return bad("r_grid is empty".into());
        }
        if let Some(x) = r.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return bad(format!("r_grid entries must be positive, got {x}"));
        }
        let t = self.t_values();
        if t.is_empty() {
            return bad("t_grid is empty".into());
        }
        if let Some(x) = t.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return bad(format!("t_grid entries must be non-negative, got {x}"));
        }
        if !(self.kappa_t.is_finite() && self.kappa_t >= 0.0) {
            return bad(format!("kappa_t must be finite and non-negative, got {}", self.kappa_t));
        }
        if !(self.c_target >= 1.0) {
            return bad(format!("c_target must be at least 1, got {}", self.c_target));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrichartzConfig {
    pub dim: usize,
    pub n: usize,
    pub l: f64,
    /// Gaussian widths for the Strichartz ratio.
    pub widths: Vec<f64>,
    pub p: f64,
    pub s: f64,
    pub t_end: f64,
    pub steps: usize,
    /// Largest allowed max/min ratio across widths.
    pub spread_limit: f64,
    pub dispersion_width: f64,
    /// Sampling times for t ‖q(t)‖_∞, all before wrap-around.
    pub dispersion_times: Vec<f64>,
    pub dispersion_limit: f64,
    pub heat_dim: usize,
    pub heat_n: usize,
    pub heat_l: f64,
    pub heat_widths: Vec<f64>,
    pub heat_t_end: f64,
    pub heat_steps: usize,
    pub heat_limit: f64,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        StrichartzConfig {
            dim: 3,
            n: 64,
            l: 40.0,
            widths: vec![1.0, 1.5, 2.0],
            p: 4.0,
            s: 0.5,
            t_end: 10.0,
            steps: 100,
            spread_limit: 4.0,
            dispersion_width: 1.5,
            dispersion_times: vec![2.0, 4.0, 6.0, 8.0, 10.0],
            dispersion_limit: 3.0,
            heat_dim: 2,
            heat_n: 64,
            heat_l: 30.0,
            heat_widths: vec![0.7, 1.2, 2.0],
            heat_t_end: 10.0,
            heat_steps: 200,
            heat_limit: 5.0,
        }
    }
}

impl StrichartzConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.into()));
        if self.widths.is_empty() || self.widths.iter().any(|w| !(*w > 0.0)) {
            return bad("widths must be a non-empty list of positive numbers");
        }
        if self.heat_widths.is_empty() || self.heat_widths.iter().any(|w| !(*w > 0.0)) {
            return bad("heat_widths must be a non-empty list of positive numbers");
        }
        if !(self.dispersion_width > 0.0) || self.dispersion_times.iter().any(|t| !(*t > 0.0)) {
            return bad("dispersion_width and dispersion_times must be positive");
        }
        if !(self.p >= 2.0) || !self.s.is_finite() || !(self.t_end > 0.0) || self.steps == 0 {
            return bad("need p >= 2, finite s, t_end > 0 and steps > 0");
        }
        if !(self.heat_t_end > 0.0) || self.heat_steps == 0 {
            return bad("need heat_t_end > 0 and heat_steps > 0");
        }
        Ok(())
    }
}

/// One product-law configuration (s, β, p).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCase {
    pub s: f64,
    pub beta: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BesovTestConfig {
    pub samples: usize,
    pub seed: u64,
    pub l: f64,
    /// (dim, n) grids for the Bony and relation identities.
    pub identity_grids: Vec<(usize, usize)>,
    pub residual_limit: f64,
    pub product_dim: usize,
    pub product_n: usize,
    /// Configurations for the − sign; the + sign uses s = 3/p − 1.
    pub product_cases: Vec<ProductCase>,
    pub alphas: Vec<f64>,
    pub ratio_limit: f64,
}

impl Default for BesovTestConfig {
    fn default() -> Self {
        BesovTestConfig {
            samples: 100,
            seed: 1,
            l: 2.0 * std::f64::consts::PI,
            identity_grids: vec![(2, 64), (3, 48)],
            residual_limit: 1e-10,
            product_dim: 3,
            product_n: 32,
            product_cases: vec![
                ProductCase { s: 1.5, beta: 0.0, p: 2.0 },
                ProductCase { s: 1.5, beta: 1.0, p: 2.0 },
                ProductCase { s: 1.0, beta: 0.5, p: 4.0 },
            ],
            alphas: vec![0.25, 1.0, 4.0],
            ratio_limit: 50.0,
        }
    }
}

impl BesovTestConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.into()));
        if self.samples == 0 {
            return bad("samples must be positive");
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a > 0.0)) {
            return bad("alphas must be a non-empty list of positive numbers");
        }
        if self.product_cases.iter().any(|c| !(c.p >= 2.0) || !(c.beta >= 0.0) || !c.s.is_finite()) {
            return bad("product cases need p >= 2, beta >= 0 and finite s");
        }
        if !(self.l > 0.0) {
            return bad("l must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    /// JSON report written by `converge`; empty means `<out>/converge.json`.
    pub input: String,
}
