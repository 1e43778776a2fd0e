//! Splitting into oscillating and incompressible modes, and the algebraic
//! relation behind the limit buoyancy term.

use crate::potential::PotentialSpec;
use crate::rescale::{check_dyadic, rescale_state};
use crate::state::{ConductingState, NonConductingState};
use crate::{PhysParams, SolverError};
use oberbeck_besov::{block_lp_norms, norm_from_blocks, BesovParams, DyadicFilterBank, HybridSign};
use oberbeck_spectral::{leray_project, partial, product, GridSpec, Projector, SpectralField};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

/// (q, Qu) oscillate, (Θ, Pu) do not.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSplit {
    pub q: SpectralField,
    pub theta: SpectralField,
    pub qu: SpectralField,
    pub pu: SpectralField,
}

/// q = (θ + b)/√2, Θ = (θ − b)/√2.
pub fn mode_split(s: &ConductingState) -> ModeSplit {
    ModeSplit {
        q: s.theta.lincomb(FRAC_1_SQRT_2, &s.b, FRAC_1_SQRT_2),
        theta: s.theta.lincomb(FRAC_1_SQRT_2, &s.b, -FRAC_1_SQRT_2),
        qu: leray_project(&s.u, Projector::Q),
        pu: leray_project(&s.u, Projector::P),
    }
}

/// Inverse of [`mode_split`]: b = (q − Θ)/√2, θ = (q + Θ)/√2.
pub fn reconstruct(m: &ModeSplit, t: f64) -> ConductingState {
    ConductingState {
        b: m.q.lincomb(FRAC_1_SQRT_2, &m.theta, -FRAC_1_SQRT_2),
        u: m.qu.add(&m.pu),
        theta: m.q.lincomb(FRAC_1_SQRT_2, &m.theta, FRAC_1_SQRT_2),
        t,
    }
}

/// κ = 0 split: oscillating (R, Qu), incompressible Θ = a − R − V and Pu.
/// The `q` slot carries R.
pub fn mode_split_nonconducting(s: &NonConductingState, v: &SpectralField) -> ModeSplit {
    ModeSplit {
        q: s.r.clone(),
        theta: s.a.sub(&s.r).sub(v),
        qu: leray_project(&s.u, Projector::Q),
        pu: leray_project(&s.u, Projector::P),
    }
}

fn scalar_times_grad(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let parts = (0..f.grid.dim).map(|a| product(f, &partial(g, a))).collect();
    SpectralField::from_components(parts)
}

/// Residual of √2P(θ∇a) = P(Θ∇V) + P(q∇V) + 2P(q∇b) with a = b + V,
/// relative to the larger of the left side and the summed right-side terms
/// (the left side vanishes identically when θ = 0).
pub fn relation_check(s: &ConductingState, v: &SpectralField) -> f64 {
    let m = mode_split(s);
    let a = s.b.add(v);
    let lhs = leray_project(&scalar_times_grad(&s.theta, &a), Projector::P).scale(SQRT_2);
    let terms = [
        leray_project(&scalar_times_grad(&m.theta, v), Projector::P),
        leray_project(&scalar_times_grad(&m.q, v), Projector::P),
        leray_project(&scalar_times_grad(&m.q, &s.b), Projector::P).scale(2.0),
    ];
    let rhs = terms[0].add(&terms[1]).add(&terms[2]);
    let den = lhs.norm_l2().max(terms.iter().map(|t| t.norm_l2()).sum());
    let diff = lhs.sub(&rhs).norm_l2();
    if den == 0.0 {
        diff
    } else {
        diff / den
    }
}

/// Running value of the global functional
/// X(t) = ‖b‖_{L̃∞(B̃^{3/2,−}_1)} + ‖u‖_{L̃∞(Ḃ^{1/2}_{2,1})} + ‖θ‖_{L̃∞(B̃^{−1/2,+}_1)}
///        + ∫ (‖b‖_{B̃^{3/2,+}_1} + ‖u‖_{Ḃ^{5/2}_{2,1}} + ‖θ‖_{B̃^{3/2,+}_1}),
/// evaluated in the rescaled variables ε = ν = 1.
#[derive(Clone, Debug)]
pub struct XMonitor {
    params: PhysParams,
    bank: DyadicFilterBank,
    /// per field, per block: sup over time of ‖Δ_j z‖_{L²}
    sup: [Vec<f64>; 3],
    integral: f64,
    last: Option<(f64, f64)>,
}

impl XMonitor {
    pub fn new(grid: GridSpec, params: &PhysParams) -> Result<Self, SolverError> {
        check_dyadic(params.eps, params.nu())?;
        let g2 = grid.with_length(grid.l / (params.eps * params.nu()))?;
        let bank = DyadicFilterBank::for_grid(g2)?;
        let nb = bank.num_blocks();
        Ok(XMonitor { params: *params, bank, sup: [vec![0.0; nb], vec![0.0; nb], vec![0.0; nb]], integral: 0.0, last: None })
    }

    fn sup_params() -> [BesovParams; 3] {
        [
            BesovParams::hybrid(1.5, 2.0, 1.0, HybridSign::Minus),
            BesovParams::plain(0.5, 2.0),
            BesovParams::hybrid(-0.5, 2.0, 1.0, HybridSign::Plus),
        ]
    }

    fn int_params() -> [BesovParams; 3] {
        [
            BesovParams::hybrid(1.5, 2.0, 1.0, HybridSign::Plus),
            BesovParams::plain(2.5, 2.0),
            BesovParams::hybrid(1.5, 2.0, 1.0, HybridSign::Plus),
        ]
    }

    /// Adds a snapshot; snapshots must come in increasing time.
    pub fn push(&mut self, s: &ConductingState) -> Result<(), SolverError> {
        let pot = PotentialSpec::zero();
        let r = rescale_state(&s.triple(), s.t, &self.params, &pot)?;
        let fields = [&r.state.s1, &r.state.u, &r.state.s2];
        let ip = Self::int_params();
        let mut rate = 0.0;
        for (k, f) in fields.iter().enumerate() {
            let blocks = block_lp_norms(f, 2.0, &self.bank);
            for (m, v) in self.sup[k].iter_mut().zip(&blocks) {
                *m = m.max(*v);
            }
            rate += norm_from_blocks(&blocks, &ip[k], &self.bank).value;
        }
        if let Some((t0, r0)) = self.last {
            self.integral += 0.5 * (r.t - t0) * (r0 + rate);
        }
        self.last = Some((r.t, rate));
        Ok(())
    }

    pub fn value(&self) -> f64 {
        let sp = Self::sup_params();
        let sups: f64 = (0..3).map(|k| norm_from_blocks(&self.sup[k], &sp[k], &self.bank).value).sum();
        sups + self.integral
    }
}
