//! The external potential V(t, x) = amplitude · m(t) · G(x).

use crate::SolverError;
use oberbeck_besov::{block_lp_norms, norm_from_blocks, time_lq, BesovParams, DyadicFilterBank, HybridSign};
use oberbeck_spectral::{fft, GridSpec, Rank, SpectralField, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Zero,
    GaussianBump,
    ModulatedBump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialSpec {
    pub profile: Profile,
    pub amplitude: f64,
    pub width: f64,
    /// Bump center; the box center when absent.
    pub center: Option<Vec<f64>>,
    /// m(t) = 1 + depth · sin(ω t) for the modulated bump.
    pub modulation_depth: f64,
    pub omega: f64,
    /// Rescale the amplitude so the small-data quantity of V equals η ν.
    pub autoscale: bool,
    pub eta: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec {
            profile: Profile::Zero,
            amplitude: 0.0,
            width: 1.0,
            center: None,
            modulation_depth: 0.5,
            omega: 1.0,
            autoscale: false,
            eta: 0.01,
        }
    }
}

/// Relative size of the bump at half a box away from its center.
pub const BOX_DECAY: f64 = 1e-12;

impl PotentialSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        PotentialSpec { profile: Profile::GaussianBump, amplitude, width, ..Self::default() }
    }

    pub fn modulated(amplitude: f64, width: f64, depth: f64, omega: f64) -> Self {
        PotentialSpec {
            profile: Profile::ModulatedBump,
            amplitude,
            width,
            modulation_depth: depth,
            omega,
            ..Self::default()
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<(), SolverError> {
        if self.profile == Profile::Zero {
            return Ok(());
        }
        if !(self.width > 0.0) || !self.amplitude.is_finite() {
            return Err(SolverError::InvalidPotential(format!(
                "width {} / amplitude {}",
                self.width, self.amplitude
            )));
        }
        let half = grid.l / 2.0;
        let tail = (-half * half / (2.0 * self.width * self.width)).exp();
        if tail > BOX_DECAY {
            return Err(SolverError::InvalidPotential(format!(
                "bump of width {} does not decay below {BOX_DECAY:e} within the box (L = {})",
                self.width, grid.l
            )));
        }
        if let Some(c) = &self.center {
            if c.len() != grid.dim {
                return Err(SolverError::InvalidPotential(format!("center needs {} coordinates", grid.dim)));
            }
        }
        Ok(())
    }

    pub fn modulation(&self, t: f64) -> (f64, f64) {
        match self.profile {
            Profile::Zero => (0.0, 0.0),
            Profile::GaussianBump => (1.0, 0.0),
            Profile::ModulatedBump => {
                let (s, c) = (self.omega * t).sin_cos();
                (1.0 + self.modulation_depth * s, self.modulation_depth * self.omega * c)
            }
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        self.profile == Profile::ModulatedBump && self.modulation_depth != 0.0 && self.omega != 0.0
    }
}

/// A potential sampled on a grid: spatial shape cached, time factor evaluated
/// on demand.
#[derive(Clone, Debug)]
pub struct PotentialField {
    pub spec: PotentialSpec,
    pub grid: GridSpec,
    /// amplitude · G, spectral.
    pub shape: SpectralField,
    /// amplitude · G and its gradient in physical space.
    pub shape_real: Vec<f64>,
    pub grad_real: Vec<Vec<f64>>,
}

impl PotentialField {
    pub fn new(spec: &PotentialSpec, grid: GridSpec) -> Result<Self, SolverError> {
        spec.validate(&grid)?;
        let center: Vec<f64> = spec.center.clone().unwrap_or_else(|| vec![grid.l / 2.0; grid.dim]);
        let l = grid.l;
        let (amp, w) = (spec.amplitude, spec.width);
        let shape = if spec.profile == Profile::Zero {
            SpectralField::zeros(grid, Rank::Scalar)
        } else {
            let mut s = SpectralField::from_fn(grid, |x| {
                let mut r2 = 0.0;
                for a in 0..grid.dim {
                    let mut d = (x[a] - center[a]).rem_euclid(l);
                    if d > l / 2.0 {
                        d -= l;
                    }
                    r2 += d * d;
                }
                amp * (-r2 / (2.0 * w * w)).exp()
            });
            oberbeck_spectral::dealias_mut(&mut s);
            s
        };
        let mut bufs: Vec<Vec<C64>> = vec![shape.comps[0].clone()];
        for a in 0..grid.dim {
            bufs.push(crate::rhs::deriv(&grid, &shape.comps[0], a));
        }
        let refs: Vec<&[C64]> = bufs.iter().map(|b| b.as_slice()).collect();
        let mut real = fft::to_real_many(&grid, &refs);
        let shape_real = real.remove(0);
        Ok(PotentialField { spec: spec.clone(), grid, shape, shape_real, grad_real: real })
    }

    pub fn is_zero(&self) -> bool {
        self.spec.profile == Profile::Zero || self.spec.amplitude == 0.0
    }

    /// V(t) spectral.
    pub fn at(&self, t: f64) -> SpectralField {
        self.shape.scale(self.spec.modulation(t).0)
    }

    /// ∂tV(t) spectral.
    pub fn dt_at(&self, t: f64) -> SpectralField {
        self.shape.scale(self.spec.modulation(t).1)
    }
}

/// `ν^{1/2}||∇V||_{L²_T(B̃^{3/2,−}_{εν})} + ||V||_{L̃^∞_T(B̃^{3/2,−}_{εν})} + ||∂tV||_{L¹_T(B̃^{3/2,−}_{εν})}`
/// sampled at `steps + 1` times in `[0, t_end]`.
pub fn smalldata_quantity(
    pot: &PotentialField,
    eps: f64,
    nu: f64,
    t_end: f64,
    steps: usize,
    bank: &DyadicFilterBank,
) -> f64 {
    if pot.is_zero() {
        return 0.0;
    }
    let params = BesovParams::hybrid(1.5, 2.0, eps * nu, HybridSign::Minus);
    let shape_blocks = block_lp_norms(&pot.shape, 2.0, bank);
    let grad = oberbeck_spectral::grad(&pot.shape);
    let grad_n = norm_from_blocks(&block_lp_norms(&grad, 2.0, bank), &params, bank).value;
    let dt = t_end / steps.max(1) as f64;
    let (mut gseries, mut dseries) = (Vec::new(), Vec::new());
    let mut vmax: Vec<f64> = vec![0.0; shape_blocks.len()];
    for k in 0..=steps {
        let (m, dm) = pot.spec.modulation(k as f64 * dt);
        gseries.push(m.abs() * grad_n);
        dseries.push(dm.abs());
        for (v, b) in vmax.iter_mut().zip(&shape_blocks) {
            *v = v.max(m.abs() * b);
        }
    }
    let shape_n = norm_from_blocks(&shape_blocks, &params, bank).value;
    let v_part = norm_from_blocks(&vmax, &params, bank).value;
    let (grad_part, dt_part) = if steps == 0 {
        (0.0, 0.0)
    } else {
        (time_lq(&gseries, dt, 2.0), time_lq(&dseries, dt, 1.0) * shape_n)
    };
    nu.sqrt() * grad_part + v_part + dt_part
}

/// Amplitude making [`smalldata_quantity`] equal to η ν.
pub fn autoscaled(
    spec: &PotentialSpec,
    grid: GridSpec,
    eps: f64,
    nu: f64,
    t_end: f64,
    steps: usize,
    bank: &DyadicFilterBank,
) -> Result<PotentialSpec, SolverError> {
    if spec.profile == Profile::Zero {
        return Ok(spec.clone());
    }
    let unit = PotentialSpec { amplitude: 1.0, ..spec.clone() };
    let q = smalldata_quantity(&PotentialField::new(&unit, grid)?, eps, nu, t_end, steps, bank);
    if !(q > 0.0) {
        return Err(SolverError::InvalidPotential("potential is not resolved on this grid".into()));
    }
    Ok(PotentialSpec { amplitude: spec.eta * nu / q, autoscale: false, ..spec.clone() })
}
