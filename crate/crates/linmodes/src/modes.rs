//! Per-frequency linear systems, their exact flow and the weighted energies.

use crate::expm::{expm, Mat};
use crate::LinmodesError;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// (b, d, θ) with heat conduction.
    Conducting,
    /// (a, d, R), no heat conduction.
    Nonconducting,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Conducting => "conducting",
            Variant::Nonconducting => "nonconducting",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeMatrix {
    pub r: f64,
    pub kappa_t: f64,
    pub variant: Variant,
    pub m: Mat,
}

/// State at one frequency: (b, d, θ) or (a, d, R).
pub type ModeState = [f64; 3];

/// Reduced mode matrix (ε = ν = 1).
pub fn mode_matrix(r: f64, kappa_t: f64, variant: Variant) -> Result<ModeMatrix, LinmodesError> {
    mode_matrix_scaled(r, 1.0, 1.0, kappa_t, variant).map(|mut mm| {
        mm.kappa_t = kappa_t;
        mm
    })
}

/// Mode matrix in the original variables: the first-order coupling carries
/// 1/ε, `d` diffuses with ν and θ with κ. The nonconducting variant ignores κ.
pub fn mode_matrix_scaled(r: f64, eps: f64, nu: f64, kappa: f64, variant: Variant) -> Result<ModeMatrix, LinmodesError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(LinmodesError::NonPositiveFrequency(r));
    }
    if !(kappa >= 0.0) || !(eps > 0.0) || !(nu > 0.0) {
        return Err(LinmodesError::InvalidParams(format!("eps {eps}, nu {nu}, kappa {kappa}")));
    }
    let w = r / eps;
    let m = match variant {
        Variant::Conducting => Mat::from_rows([
            [0.0, -w, 0.0],
            [w, -nu * r * r, w],
            [0.0, -w, -kappa * r * r],
        ]),
        Variant::Nonconducting => Mat::from_rows([
            [0.0, -w, 0.0],
            [0.0, -nu * r * r, w],
            [0.0, -w, 0.0],
        ]),
    };
    Ok(ModeMatrix { r, kappa_t: kappa / nu, variant, m })
}

impl ModeMatrix {
    /// Same matrix with every diffusion entry removed.
    pub fn without_diffusion(&self) -> ModeMatrix {
        let mut out = self.clone();
        for i in 0..3 {
            out.m.set(i, i, 0.0);
        }
        out
    }

    pub fn exp(&self, t: f64) -> Mat {
        expm(&self.m.scale(t))
    }
}

/// `exp(tM) s0`.
pub fn propagate(mm: &ModeMatrix, t: f64, s0: ModeState) -> ModeState {
    if t == 0.0 {
        return s0;
    }
    let v = mm.exp(t).apply(&s0);
    close_invariant(mm, s0, [v[0], v[1], v[2]])
}

/// The nonconducting flow conserves a − R; impose it exactly instead of
/// through the rounding of the exponential.
fn close_invariant(mm: &ModeMatrix, s0: ModeState, mut s: ModeState) -> ModeState {
    if mm.variant == Variant::Nonconducting {
        s[0] = s[2] + (s0[0] - s0[2]);
    }
    s
}

/// Samples of the exact flow at `t_k = k h`, k = 0..=steps.
pub fn trajectory(mm: &ModeMatrix, h: f64, steps: usize, s0: ModeState) -> Vec<ModeState> {
    let e = mm.exp(h);
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = s0;
    out.push(s);
    for _ in 0..steps {
        let v = e.apply(&s);
        s = close_invariant(mm, s0, [v[0], v[1], v[2]]);
        out.push(s);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyWeights {
    pub alpha: f64,
}

/// min(1, κ̃).
pub fn kappa_check(kappa_t: f64) -> f64 {
    kappa_t.min(1.0)
}

impl EnergyWeights {
    /// α = 2/κ̌ − 1 when κ̃ ≤ 1, α = 1 otherwise.
    pub fn for_kappa(kappa_t: f64) -> Result<Self, LinmodesError> {
        if !(kappa_t > 0.0) {
            return Err(LinmodesError::InvalidParams(format!("no admissible weight for kappa_t = {kappa_t}")));
        }
        let alpha = if kappa_t <= 1.0 { 2.0 / kappa_t - 1.0 } else { 1.0 };
        Ok(EnergyWeights { alpha })
    }
}

pub fn energy_f2(s: ModeState, r: f64, w: EnergyWeights) -> f64 {
    let [b, d, th] = s;
    let a = w.alpha;
    a * d * d + (1.0 + a) * b * b + (r * b - d).powi(2) + (1.0 + a) * th * th
}

pub fn energy_f(s: ModeState, r: f64, w: EnergyWeights) -> f64 {
    energy_f2(s, r, w).sqrt()
}

pub fn energy_h2(s: ModeState, r: f64, w: EnergyWeights, kappa_t: f64) -> Result<f64, LinmodesError> {
    let a = w.alpha;
    let coef = kappa_t * (1.0 + a) - 0.5;
    if coef < 0.0 {
        return Err(LinmodesError::NegativeHSquare { kappa_t, alpha: a });
    }
    let [b, d, th] = s;
    let r2 = r * r;
    Ok(0.5 * r2 * b * b + a * r2 * d * d + coef * r2 * th * th)
}

pub fn energy_h(s: ModeState, r: f64, w: EnergyWeights, kappa_t: f64) -> Result<f64, LinmodesError> {
    energy_h2(s, r, w, kappa_t).map(f64::sqrt)
}

/// Dissipation side of the exact identity:
/// r²b² + r²bθ + κ̃(1+α)r²θ² + αr²d².
pub fn identity_dissipation(s: ModeState, r: f64, w: EnergyWeights, kappa_t: f64) -> f64 {
    let [b, d, th] = s;
    let r2 = r * r;
    r2 * b * b + r2 * b * th + kappa_t * (1.0 + w.alpha) * r2 * th * th + w.alpha * r2 * d * d
}

/// d/dt f² at time t by central differences with Richardson extrapolation.
pub fn df2_dt(mm: &ModeMatrix, s0: ModeState, t: f64, h: f64, w: EnergyWeights) -> f64 {
    let f2 = |tt: f64| energy_f2(propagate(mm, tt, s0), mm.r, w);
    let central = |hh: f64| (f2(t + hh) - f2(t - hh)) / (2.0 * hh);
    (4.0 * central(h / 2.0) - central(h)) / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    /// |½ d/dt f² + dissipation| / f²(0).
    pub residual: f64,
    /// (d/dt f² + 2H²) / f²(0); should be ≤ 0.
    pub be4_slack: f64,
}

/// Checks the exact energy identity and the resulting inequality at time `t`.
pub fn check_energy_identity(
    s0: ModeState,
    r: f64,
    kappa_t: f64,
    t: f64,
    h: f64,
) -> Result<IdentityCheck, LinmodesError> {
    let mm = mode_matrix(r, kappa_t, Variant::Conducting)?;
    let w = EnergyWeights::for_kappa(kappa_t)?;
    let scale = energy_f2(s0, r, w);
    if scale == 0.0 {
        return Ok(IdentityCheck { residual: 0.0, be4_slack: 0.0 });
    }
    let der = df2_dt(&mm, s0, t, h, w);
    let s = propagate(&mm, t, s0);
    let residual = (0.5 * der + identity_dissipation(s, r, w, kappa_t)).abs() / scale;
    let be4_slack = (der + 2.0 * energy_h2(s, r, w, kappa_t)?) / scale;
    Ok(IdentityCheck { residual, be4_slack })
}
