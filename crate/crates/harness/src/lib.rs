//! ε-ladder experiments: runs a family of compressible solutions together
//! with their Boussinesq limit, measures the convergence norms, fits log-log
//! rates and writes reports.

pub mod fit;
pub mod measure;
pub mod plan;
pub mod report;
pub mod run;

pub use fit::{fit_rate, fit_rate_adaptive, RateFit};
pub use measure::{measure_family, measure_incompressible_error, measure_osc_decay, MeasuredValue};
pub use plan::{strichartz_time_exponent, ExperimentPlan, MeasureKind, Measurement};
pub use report::{build_report, emit_report, emit_svg, read_csv, read_json, ConvergenceReport, FitRecord, ReportFormat, ReportRecord};
pub use run::{run_epsilon_family, FamilyRun, LimitTrajectory, Recorder, Trajectory};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("time grids differ: {0}")]
    TimeGridMismatch(String),
    #[error("solver failed at eps = {eps}: {source}")]
    Solver {
        eps: f64,
        #[source]
        source: oberbeck_solvers::SolverError,
    },
    #[error(transparent)]
    Besov(#[from] oberbeck_besov::BesovError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub(crate) fn solver(eps: f64) -> impl FnOnce(oberbeck_solvers::SolverError) -> HarnessError {
        move |source| HarnessError::Solver { eps, source }
    }
}
