//! Pseudo-spectral solvers for the low-Mach heat-conducting and
//! non-conducting systems and their Boussinesq limits. The stiff linear part
//! (1/ε coupling and diffusion) is integrated exactly per Fourier mode,
//! the rest by second-order exponential time differencing.

pub mod config;
pub mod diagnostics;
pub mod initial;
pub mod linear;
pub mod params;
pub mod potential;
pub mod rescale;
pub mod rhs;
pub mod state;
pub mod stepper;

pub use oberbeck_linmodes::Variant;
pub use config::{simulate, GridConfig, OutputConfig, PhysicsConfig, RunConfig, RunSummary, SystemKind, TimeConfig};
pub use diagnostics::{mode_split, mode_split_nonconducting, reconstruct, relation_check, ModeSplit, XMonitor};
pub use initial::{boussinesq_data, conducting_data, nonconducting_data, InitKind, InitialDataSpec};
pub use linear::{LinearPropagator, Which};
pub use params::PhysParams;
pub use potential::{autoscaled, smalldata_quantity, PotentialField, PotentialSpec, Profile};
pub use rescale::{check_dyadic, rescale_state, unrescale_state, Rescaled};
pub use rhs::{rhs_boussinesq, rhs_conducting, rhs_nonconducting, BoussinesqVariant, VACUUM_FLOOR};
pub use state::{BoussinesqState, ConductingState, NonConductingState, Triple};
pub use stepper::{BoussinesqSolver, CompressibleSolver, CFL};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("1 + eps a dropped to {min} at t = {t}")]
    VacuumApproached { min: f64, t: f64 },
    #[error("time step {dt} exceeds the advective limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("eps * nu = {0} is not an integer power of two")]
    IncompatibleScale(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Spectral(#[from] oberbeck_spectral::SpectralError),
    #[error(transparent)]
    Besov(#[from] oberbeck_besov::BesovError),
    #[error(transparent)]
    Linmodes(#[from] oberbeck_linmodes::LinmodesError),
}
