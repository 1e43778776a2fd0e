//! Run configuration (TOML) and the config-driven simulation loop.

use crate::initial::{boussinesq_data, conducting_data, nonconducting_data, InitialDataSpec};
use crate::potential::{autoscaled, PotentialField, PotentialSpec};
use crate::rhs::BoussinesqVariant;
use crate::stepper::{BoussinesqSolver, CompressibleSolver};
use crate::{PhysParams, SolverError};
use oberbeck_besov::DyadicFilterBank;
use oberbeck_linmodes::Variant;
use oberbeck_spectral::snapshot::write_snapshot;
use oberbeck_spectral::{GridSpec, SpectralField};
use serde::{Deserialize, Serialize};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Conducting,
    Nonconducting,
    Boussinesq,
    BoussinesqShifted,
    BoussinesqTransport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub l: f64,
    pub dealias: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { dim: 2, n: 64, l: 2.0 * std::f64::consts::PI, dealias: 2.0 / 3.0 }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<GridSpec, SolverError> {
        Ok(GridSpec::with_dealias(self.dim, self.n, self.l, self.dealias)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub system: SystemKind,
    pub eps: f64,
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig { system: SystemKind::Conducting, eps: 0.25, mu: 1.0, lambda: 0.0, kappa: 1.0 }
    }
}

impl PhysicsConfig {
    pub fn params(&self) -> Result<PhysParams, SolverError> {
        PhysParams::new(self.eps, self.mu, self.lambda, self.kappa)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t_end: f64,
    pub dt: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { t_end: 1.0, dt: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    /// Write snapshots every `snapshot_stride` steps (0: only the final state).
    pub snapshot_stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), snapshot_stride: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub potential: PotentialSpec,
    pub initial_data: InitialDataSpec,
    pub time: TimeConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, SolverError> {
        let c: RunConfig = toml::from_str(s).map_err(|e| SolverError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(p: &Path) -> Result<Self, SolverError> {
        let s = std::fs::read_to_string(p).map_err(|e| SolverError::Config(format!("{}: {e}", p.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let grid = self.grid.grid()?;
        self.physics.params()?;
        self.potential.validate(&grid)?;
        if !(self.time.dt > 0.0) || !(self.time.t_end >= 0.0) {
            return Err(SolverError::Config(format!("bad time settings dt {} t_end {}", self.time.dt, self.time.t_end)));
        }
        Ok(())
    }

    /// The default configuration as TOML, for help output.
    pub fn documented_defaults() -> String {
        toml::to_string(&RunConfig::default()).unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub t_final: f64,
    pub snapshots: Vec<PathBuf>,
    pub potential_amplitude: f64,
}

fn write_fields(dir: &Path, step: usize, t: f64, fields: &[(&str, &SpectralField)]) -> Result<Vec<PathBuf>, SolverError> {
    let mut out = Vec::new();
    for (name, f) in fields {
        let path = dir.join(format!("{name}_{step:06}.obsnap"));
        let mut w = BufWriter::new(std::fs::File::create(&path).map_err(oberbeck_spectral::SpectralError::from)?);
        write_snapshot(&mut w, name, t, f)?;
        out.push(path);
    }
    Ok(out)
}

/// Runs the configured system and writes snapshots under `out_dir`.
pub fn simulate(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary, SolverError> {
    cfg.validate()?;
    let grid = cfg.grid.grid()?;
    let params = cfg.physics.params()?;
    std::fs::create_dir_all(out_dir).map_err(oberbeck_spectral::SpectralError::from)?;
    let steps = (cfg.time.t_end / cfg.time.dt).round() as usize;
    let stride = cfg.output.snapshot_stride;
    let pot_spec = if cfg.potential.autoscale {
        let bank = DyadicFilterBank::for_grid(grid)?;
        autoscaled(&cfg.potential, grid, params.eps, params.nu(), cfg.time.t_end, steps.max(1), &bank)?
    } else {
        cfg.potential.clone()
    };
    let mut files = Vec::new();
    let due = |k: usize| (stride > 0 && k % stride == 0) || k == steps;
    match cfg.physics.system {
        SystemKind::Conducting | SystemKind::Nonconducting => {
            let variant = if cfg.physics.system == SystemKind::Conducting {
                Variant::Conducting
            } else {
                Variant::Nonconducting
            };
            let solver = CompressibleSolver::new(grid, params, variant, &pot_spec, cfg.time.dt)?;
            let mut x = match variant {
                Variant::Conducting => conducting_data(&cfg.initial_data, grid).triple(),
                Variant::Nonconducting => {
                    let pot = PotentialField::new(&pot_spec, grid)?;
                    nonconducting_data(&cfg.initial_data, grid, &pot).triple()
                }
            };
            x = solver.prepare(&x);
            let names = match variant {
                Variant::Conducting => ["b", "u", "theta"],
                Variant::Nonconducting => ["a", "u", "R"],
            };
            for k in 0..=steps {
                let t = k as f64 * cfg.time.dt;
                if due(k) {
                    files.extend(write_fields(
                        out_dir,
                        k,
                        t,
                        &[(names[0], &x.s1), (names[1], &x.u), (names[2], &x.s2)],
                    )?);
                }
                if k < steps {
                    x = solver.step_triple(&x, t)?;
                }
            }
        }
        kind => {
            let variant = match kind {
                SystemKind::Boussinesq => BoussinesqVariant::Conducting,
                SystemKind::BoussinesqShifted => BoussinesqVariant::ConductingShifted,
                _ => BoussinesqVariant::Transport,
            };
            let solver = BoussinesqSolver::new(grid, params.mu, params.kappa, variant, &pot_spec, cfg.time.dt)?;
            let mut s = solver.prepare(&boussinesq_data(&cfg.initial_data, grid));
            if variant == BoussinesqVariant::ConductingShifted {
                s.theta.axpy(-std::f64::consts::FRAC_1_SQRT_2, &solver.pot.at(0.0));
            }
            for k in 0..=steps {
                if due(k) {
                    files.extend(write_fields(out_dir, k, s.t, &s.named_fields())?);
                }
                if k < steps {
                    s = solver.step(&s)?;
                }
            }
        }
    }
    Ok(RunSummary { steps, t_final: steps as f64 * cfg.time.dt, snapshots: files, potential_amplitude: pot_spec.amplitude })
}
