use crate::SolverError;
use serde::{Deserialize, Serialize};

/// Physical coefficients. ν = λ + 2μ and the reduced coefficients are derived.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysParams {
    pub eps: f64,
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
}

impl PhysParams {
    pub fn new(eps: f64, mu: f64, lambda: f64, kappa: f64) -> Result<Self, SolverError> {
        let p = PhysParams { eps, mu, lambda, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(SolverError::InvalidParams(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.mu > 0.0) || !(self.nu() > 0.0) {
            return Err(SolverError::InvalidParams(format!(
                "need mu > 0 and nu = lambda + 2 mu > 0, got mu {}, lambda {}",
                self.mu, self.lambda
            )));
        }
        if !(self.kappa >= 0.0) {
            return Err(SolverError::InvalidParams(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        Ok(())
    }

    pub fn nu(&self) -> f64 {
        self.lambda + 2.0 * self.mu
    }

    pub fn mu_t(&self) -> f64 {
        self.mu / self.nu()
    }

    pub fn lambda_t(&self) -> f64 {
        self.lambda / self.nu()
    }

    pub fn kappa_t(&self) -> f64 {
        self.kappa / self.nu()
    }
}
