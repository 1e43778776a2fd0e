//! Deterministic initial-data generators.

use crate::potential::PotentialField;
use crate::state::{BoussinesqState, ConductingState, NonConductingState};
use oberbeck_spectral::{dealias_mut, leray_project, GridSpec, Projector, Rank, SpectralField, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Zero,
    /// Random Fourier coefficients with a Gaussian spectrum peaked below `k_peak`.
    Random,
    /// Gaussian bumps (scalars) and the gradient/rotated-gradient of a bump (velocity).
    Gaussian,
    /// 2D Taylor-Green velocity, zero scalars.
    TaylorGreen,
}

/// Data built from an incompressible pair (Θ₀, Pu₀) and an oscillating pair
/// (q₀, Qu₀) (R₀ in place of q₀ without conduction), each scaled separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialDataSpec {
    pub kind: InitKind,
    /// Max |value| of each generated component before weighting.
    pub amplitude: f64,
    pub width: f64,
    pub k_peak: f64,
    pub seed: u64,
    /// Weight of (Θ₀, Pu₀).
    pub incompressible: f64,
    /// Weight of (q₀, Qu₀).
    pub oscillatory: f64,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        InitialDataSpec {
            kind: InitKind::Random,
            amplitude: 0.1,
            width: 1.0,
            k_peak: 2.0,
            seed: 1,
            incompressible: 1.0,
            oscillatory: 1.0,
        }
    }
}

/// Smooth real mean-free random field, dealiased, scaled to max |value| = amplitude.
pub fn random_smooth(grid: GridSpec, rank: Rank, amplitude: f64, k_peak: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, rank);
    for c in 0..f.ncomp() {
        for idx in 0..grid.len() {
            let r2 = grid.xi_norm2(idx);
            let env = (-r2 / (k_peak * k_peak)).exp();
            let (re, im): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            f.comps[c][idx] = C64::new(re, im) * env;
        }
    }
    f.symmetrize();
    f.remove_mean();
    dealias_mut(&mut f);
    normalize(f, amplitude)
}

fn normalize(f: SpectralField, amplitude: f64) -> SpectralField {
    let m = f.max_abs_real();
    if m == 0.0 {
        f
    } else {
        f.scale(amplitude / m)
    }
}

/// Mean-free Gaussian bump centered in the box, dealiased.
pub fn gaussian_bump(grid: GridSpec, amplitude: f64, width: f64, shift: f64) -> SpectralField {
    let l = grid.l;
    let mut f = SpectralField::from_fn(grid, |x| {
        let mut r2 = 0.0;
        for a in 0..grid.dim {
            let mut d = (x[a] - l / 2.0 - shift * (a as f64 + 1.0)).rem_euclid(l);
            if d > l / 2.0 {
                d -= l;
            }
            r2 += d * d;
        }
        (-r2 / (2.0 * width * width)).exp()
    });
    f.remove_mean();
    dealias_mut(&mut f);
    normalize(f, amplitude)
}

pub fn taylor_green(grid: GridSpec, amplitude: f64) -> SpectralField {
    let k = grid.fundamental();
    let ux = SpectralField::from_fn(grid, |x| amplitude * (k * x[0]).sin() * (k * x[1]).cos());
    let uy = SpectralField::from_fn(grid, |x| -amplitude * (k * x[0]).cos() * (k * x[1]).sin());
    let mut comps = vec![ux, uy];
    for _ in 2..grid.dim {
        comps.push(SpectralField::zeros(grid, Rank::Scalar));
    }
    SpectralField::from_components(comps)
}

/// The four building blocks (Θ₀, Pu₀, q₀, Qu₀), weights applied.
pub fn building_blocks(spec: &InitialDataSpec, grid: GridSpec) -> [SpectralField; 4] {
    let (a, s) = (spec.amplitude, spec.seed);
    let (wi, wo) = (spec.incompressible, spec.oscillatory);
    let (theta, pu, q, qu) = match spec.kind {
        InitKind::Zero => (
            SpectralField::zeros(grid, Rank::Scalar),
            SpectralField::zeros(grid, Rank::Vector),
            SpectralField::zeros(grid, Rank::Scalar),
            SpectralField::zeros(grid, Rank::Vector),
        ),
        InitKind::Random => {
            let th = random_smooth(grid, Rank::Scalar, a, spec.k_peak, s.wrapping_mul(4));
            let pu = leray_project(&random_smooth(grid, Rank::Vector, a, spec.k_peak, s.wrapping_mul(4) + 1), Projector::P);
            let q = random_smooth(grid, Rank::Scalar, a, spec.k_peak, s.wrapping_mul(4) + 2);
            let qu = leray_project(&random_smooth(grid, Rank::Vector, a, spec.k_peak, s.wrapping_mul(4) + 3), Projector::Q);
            (th, normalize(pu, a), q, normalize(qu, a))
        }
        InitKind::Gaussian => {
            let w = spec.width;
            let th = gaussian_bump(grid, a, w, 0.0);
            let q = gaussian_bump(grid, a, w, 0.25 * w);
            let g = gaussian_bump(grid, 1.0, 1.5 * w, -0.25 * w);
            let grad = oberbeck_spectral::grad(&g);
            let qu = normalize(dealias_grad(grad.clone()), a);
            // rotate the gradient in the (x, y) plane: divergence-free
            let mut rot = grad.clone();
            rot.comps[0] = grad.comps[1].iter().map(|v| -v).collect();
            rot.comps[1] = grad.comps[0].clone();
            let pu = normalize(leray_project(&rot, Projector::P), a);
            (th, pu, q, qu)
        }
        InitKind::TaylorGreen => (
            SpectralField::zeros(grid, Rank::Scalar),
            dealias_grad(taylor_green(grid, a)),
            SpectralField::zeros(grid, Rank::Scalar),
            SpectralField::zeros(grid, Rank::Vector),
        ),
    };
    [theta.scale(wi), pu.scale(wi), q.scale(wo), qu.scale(wo)]
}

fn dealias_grad(mut f: SpectralField) -> SpectralField {
    dealias_mut(&mut f);
    f
}

pub fn conducting_data(spec: &InitialDataSpec, grid: GridSpec) -> ConductingState {
    let [th, pu, q, qu] = building_blocks(spec, grid);
    ConductingState {
        b: q.lincomb(FRAC_1_SQRT_2, &th, -FRAC_1_SQRT_2),
        u: qu.add(&pu),
        theta: q.lincomb(FRAC_1_SQRT_2, &th, FRAC_1_SQRT_2),
        t: 0.0,
    }
}

/// a = Θ + R + V, so that Θ = a − R − V at t = 0.
pub fn nonconducting_data(spec: &InitialDataSpec, grid: GridSpec, pot: &PotentialField) -> NonConductingState {
    let [th, pu, r, qu] = building_blocks(spec, grid);
    NonConductingState { a: th.add(&r).add(&pot.at(0.0)), u: qu.add(&pu), r, t: 0.0 }
}

/// Limit data (Θ₀, v₀ = Pu₀).
pub fn boussinesq_data(spec: &InitialDataSpec, grid: GridSpec) -> BoussinesqState {
    let [th, pu, _, _] = building_blocks(spec, grid);
    BoussinesqState { theta: th, v: pu, t: 0.0 }
}
