//! Fourier representation of fields on the periodic box `[0, L)^d`, spectral
//! differential operators and the Leray projectors `P`, `Q`.

pub mod fft;
mod field;
mod grid;
mod ops;
pub mod snapshot;

pub use field::{pointwise_magnitude, Rank, SpectralField, C64};
pub use grid::GridSpec;
pub use ops::{
    apply_symbol, dealias, dealias_mut, div, grad, laplacian, leray_project, partial, product, Projector, Symbol,
};

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("symbol is singular at xi = 0 but the field has a nonzero mean mode")]
    SingularSymbolOnMeanMode,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed snapshot: {0}")]
    BadSnapshot(String),
}
