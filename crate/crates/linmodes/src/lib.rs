//! Linearized systems frequency by frequency: mode matrices, their exact
//! flow, weighted energies, empirical decay constants and the acoustic and
//! heat model problems.

pub mod acoustic;
pub mod decay;
pub mod expm;
pub mod modes;

pub use acoustic::{acoustic_evolve, heat_regularity_ratio, heat_step, strichartz_ratio};
pub use decay::{
    c_lattice, integrated_constants, lin_grid, log_grid, verify_decay, DecayConstants, DecayRow,
    IntegratedConstants,
};
pub use expm::{etd_coeffs, expm, phi_scalar, Mat};
pub use modes::{
    check_energy_identity, df2_dt, energy_f, energy_f2, energy_h, energy_h2, identity_dissipation, kappa_check,
    mode_matrix, mode_matrix_scaled, propagate, trajectory, EnergyWeights, IdentityCheck, ModeMatrix, ModeState,
    Variant,
};

#[derive(Debug, thiserror::Error)]
pub enum LinmodesError {
    #[error("mode frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("H^2 has a negative theta coefficient for kappa_t = {kappa_t}, alpha = {alpha}")]
    NegativeHSquare { kappa_t: f64, alpha: f64 },
    #[error("no admissible decay constants, even C = 1e6 with c = 0.001 fails")]
    NoAdmissibleConstants,
    #[error("acoustic velocity is not curl-free")]
    NotCurlFree,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Besov(#[from] oberbeck_besov::BesovError),
}
