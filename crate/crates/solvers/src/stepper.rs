//! ETDRK2 time stepping with the exact linear propagator.

use crate::linear::{HeatPropagator, LinearPropagator, Which};
use crate::potential::{PotentialField, PotentialSpec};
use crate::rhs::{rhs_boussinesq, rhs_conducting, rhs_nonconducting, BoussinesqVariant};
use crate::state::{BoussinesqState, ConductingState, NonConductingState, Triple};
use crate::{PhysParams, SolverError};
use oberbeck_linmodes::Variant;
use oberbeck_spectral::{dealias, div, leray_project, GridSpec, Projector};

/// Advective CFL constant.
pub const CFL: f64 = 0.5;

fn check_cfl(dt: f64, speed: f64, grid: &GridSpec) -> Result<(), SolverError> {
    if speed > 0.0 {
        let limit = CFL * grid.dx() / speed;
        if dt > limit {
            return Err(SolverError::CflViolation { dt, limit });
        }
    }
    Ok(())
}

/// Stepper for the compressible systems in the original (ε, ν) variables.
#[derive(Clone, Debug)]
pub struct CompressibleSolver {
    pub grid: GridSpec,
    pub params: PhysParams,
    pub variant: Variant,
    pub pot: PotentialField,
    pub dt: f64,
    /// Drop every nonlinear and potential term (structural checks).
    pub linear_only: bool,
    lin: LinearPropagator,
}

impl CompressibleSolver {
    pub fn new(
        grid: GridSpec,
        params: PhysParams,
        variant: Variant,
        potential: &PotentialSpec,
        dt: f64,
    ) -> Result<Self, SolverError> {
        params.validate()?;
        if !(dt > 0.0) {
            return Err(SolverError::InvalidParams(format!("dt must be positive, got {dt}")));
        }
        let pot = PotentialField::new(potential, grid)?;
        let lin = LinearPropagator::compressible(grid, &params, variant, dt)?;
        Ok(CompressibleSolver { grid, params, variant, pot, dt, linear_only: false, lin })
    }

    pub fn with_linear_only(mut self, on: bool) -> Self {
        self.linear_only = on;
        self
    }

    /// Nonlinear tendency of a state given as a triple, and max |u|.
    pub fn tendency(&self, x: &Triple, t: f64) -> Result<(Triple, f64), SolverError> {
        if self.linear_only {
            return Ok((Triple::zeros(self.grid), 0.0));
        }
        match self.variant {
            Variant::Conducting => {
                let st = ConductingState { b: x.s1.clone(), u: x.u.clone(), theta: x.s2.clone(), t };
                rhs_conducting(&st, &self.params, &self.pot)
            }
            Variant::Nonconducting => {
                let st = NonConductingState { a: x.s1.clone(), u: x.u.clone(), r: x.s2.clone(), t };
                rhs_nonconducting(&st, &self.params, &self.pot)
            }
        }
    }

    /// One ETDRK2 step of size `dt` from `(x, t)`.
    pub fn step_triple(&self, x: &Triple, t: f64) -> Result<Triple, SolverError> {
        let ex = self.lin.apply(Which::Exp, x);
        if self.linear_only {
            return Ok(ex);
        }
        let (n0, speed) = self.tendency(x, t)?;
        check_cfl(self.dt, speed, &self.grid)?;
        let a = ex.add(&self.lin.apply(Which::Phi1, &n0));
        let (n1, _) = self.tendency(&a, t + self.dt)?;
        Ok(a.add(&self.lin.apply(Which::Phi2, &n1.sub(&n0))))
    }

    pub fn step_conducting(&self, s: &ConductingState) -> Result<ConductingState, SolverError> {
        self.expect(Variant::Conducting)?;
        Ok(ConductingState::from_triple(self.step_triple(&s.triple(), s.t)?, s.t + self.dt))
    }

    pub fn step_nonconducting(&self, s: &NonConductingState) -> Result<NonConductingState, SolverError> {
        self.expect(Variant::Nonconducting)?;
        Ok(NonConductingState::from_triple(self.step_triple(&s.triple(), s.t)?, s.t + self.dt))
    }

    fn expect(&self, v: Variant) -> Result<(), SolverError> {
        if self.variant != v {
            return Err(SolverError::InvalidParams(format!(
                "solver built for the {} system",
                self.variant.as_str()
            )));
        }
        Ok(())
    }

    /// Restricts initial data to the dealiasing window the solver works in.
    pub fn prepare(&self, x: &Triple) -> Triple {
        x.dealiased()
    }
}

/// Stepper for the limit systems.
#[derive(Clone, Debug)]
pub struct BoussinesqSolver {
    pub grid: GridSpec,
    pub mu: f64,
    pub kappa: f64,
    pub variant: BoussinesqVariant,
    pub pot: PotentialField,
    pub dt: f64,
    heat: HeatPropagator,
}

impl BoussinesqSolver {
    pub fn new(
        grid: GridSpec,
        mu: f64,
        kappa: f64,
        variant: BoussinesqVariant,
        potential: &PotentialSpec,
        dt: f64,
    ) -> Result<Self, SolverError> {
        if !(mu > 0.0) || !(kappa >= 0.0) || !(dt > 0.0) {
            return Err(SolverError::InvalidParams(format!("mu {mu}, kappa {kappa}, dt {dt}")));
        }
        let pot = PotentialField::new(potential, grid)?;
        let theta_diff = match variant {
            BoussinesqVariant::Transport => 0.0,
            _ => kappa / 2.0,
        };
        let heat = HeatPropagator::new(grid, theta_diff, mu, dt);
        Ok(BoussinesqSolver { grid, mu, kappa, variant, pot, dt, heat })
    }

    pub fn prepare(&self, s: &BoussinesqState) -> BoussinesqState {
        BoussinesqState { theta: dealias(&s.theta), v: dealias(&leray_project(&s.v, Projector::P)), t: s.t }
    }

    pub fn step(&self, s: &BoussinesqState) -> Result<BoussinesqState, SolverError> {
        let (k, dt) = (self.kappa, self.dt);
        let (et, ev) = self.heat.apply(Which::Exp, &s.theta, &s.v);
        let (n0t, n0v, speed) = rhs_boussinesq(&s.theta, &s.v, s.t, k, self.variant, &self.pot);
        check_cfl(dt, speed, &self.grid)?;
        let (p1t, p1v) = self.heat.apply(Which::Phi1, &n0t, &n0v);
        let (at, av) = (et.add(&p1t), ev.add(&p1v));
        let (n1t, n1v, _) = rhs_boussinesq(&at, &av, s.t + dt, k, self.variant, &self.pot);
        let (p2t, p2v) = self.heat.apply(Which::Phi2, &n1t.sub(&n0t), &n1v.sub(&n0v));
        let v = leray_project(&av.add(&p2v), Projector::P);
        Ok(BoussinesqState { theta: at.add(&p2t), v, t: s.t + dt })
    }

    /// ||div v|| / ||v||.
    pub fn divergence_defect(s: &BoussinesqState) -> f64 {
        let n = s.v.norm_l2();
        if n == 0.0 {
            0.0
        } else {
            div(&s.v).norm_l2() / n
        }
    }
}
