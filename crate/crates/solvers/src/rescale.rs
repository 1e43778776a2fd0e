//! The change of variables to ε = ν = 1: fields times ε, space by εν, time by ε²ν.

use crate::potential::PotentialSpec;
use crate::state::Triple;
use crate::{PhysParams, SolverError};
use oberbeck_spectral::{GridSpec, SpectralField};

/// A compressible problem expressed in the other set of variables.
#[derive(Clone, Debug)]
pub struct Rescaled {
    pub grid: GridSpec,
    pub params: PhysParams,
    pub potential: PotentialSpec,
    pub state: Triple,
    pub t: f64,
    /// Time-step factor: dt' = dt · time_factor.
    pub time_factor: f64,
}

/// εν must be an integer power of two so the rescaled box keeps a dyadic
/// filter-bank alignment with the original one.
pub fn check_dyadic(eps: f64, nu: f64) -> Result<i32, SolverError> {
    let x = eps * nu;
    let m = x.log2().round();
    if !(x > 0.0) || (x.log2() - m).abs() > 1e-12 {
        return Err(SolverError::IncompatibleScale(x));
    }
    Ok(m as i32)
}

fn map_field(z: &SpectralField, grid: GridSpec, factor: f64) -> SpectralField {
    SpectralField { grid, comps: z.comps.iter().map(|c| c.iter().map(|v| v * factor).collect()).collect() }
}

fn map_triple(x: &Triple, grid: GridSpec, factor: f64) -> Triple {
    Triple { s1: map_field(&x.s1, grid, factor), u: map_field(&x.u, grid, factor), s2: map_field(&x.s2, grid, factor) }
}

/// Original (ε, ν) variables to the reduced ones.
pub fn rescale_state(
    x: &Triple,
    t: f64,
    params: &PhysParams,
    potential: &PotentialSpec,
) -> Result<Rescaled, SolverError> {
    let (eps, nu) = (params.eps, params.nu());
    check_dyadic(eps, nu)?;
    let grid = x.grid();
    let g2 = grid.with_length(grid.l / (eps * nu))?;
    let params2 = PhysParams::new(1.0, params.mu / nu, params.lambda / nu, params.kappa / nu)?;
    let potential2 = PotentialSpec {
        amplitude: potential.amplitude * eps,
        width: potential.width / (eps * nu),
        center: potential.center.as_ref().map(|c| c.iter().map(|v| v / (eps * nu)).collect()),
        omega: potential.omega * eps * eps * nu,
        ..potential.clone()
    };
    Ok(Rescaled {
        grid: g2,
        params: params2,
        potential: potential2,
        state: map_triple(x, g2, eps),
        t: t / (eps * eps * nu),
        time_factor: 1.0 / (eps * eps * nu),
    })
}

/// Back from the reduced variables to (ε, ν) on `grid`.
pub fn unrescale_state(x: &Triple, t: f64, eps: f64, nu: f64, grid: GridSpec) -> Result<(Triple, f64), SolverError> {
    check_dyadic(eps, nu)?;
    Ok((map_triple(x, grid, 1.0 / eps), t * eps * eps * nu))
}
