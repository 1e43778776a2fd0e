//! Empirical decay constants for the per-frequency flows.

use crate::modes::{kappa_check, mode_matrix, trajectory, ModeState, Variant};
use crate::LinmodesError;
use serde::Serialize;

/// One checked inequality `lhs <= rhs`, where `rhs = C e^{-c rate t} (initial weight)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub variant: Variant,
    pub kappa_t: f64,
    pub r: f64,
    /// Index of the canonical unit initial state.
    pub state: usize,
    pub t: f64,
    pub regime: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(rename = "C_used")]
    pub big_c_used: f64,
    pub c_used: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct DecayConstants {
    /// Smallest admissible C for the reported c.
    pub big_c: f64,
    /// Largest lattice c whose C stays within the target (or the fallback c).
    pub c: f64,
    /// Whether the pair meets the requested bound on C.
    pub within_target: bool,
    pub rows: Vec<DecayRow>,
    pub failures: Vec<DecayRow>,
}

/// Lattice of decay rates tried by [`verify_decay`].
pub fn c_lattice() -> impl Iterator<Item = f64> {
    (1..=200).map(|k| 0.005 * k as f64)
}

pub const FALLBACK: (f64, f64) = (1e6, 0.001);

pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn lin_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

struct Sample {
    r: f64,
    state: usize,
    t: f64,
    regime: &'static str,
    lhs: f64,
    w0: f64,
    rate: f64,
}

fn norm2(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Regime-appropriate weighted quantities. Returns (regime, weight, rate
/// multiplier) triples; the rate multiplier scales c in the exponent.
fn weights(variant: Variant, kappa_t: f64, r: f64, s: ModeState) -> Vec<(&'static str, f64, f64)> {
    match variant {
        Variant::Conducting => {
            let kc = kappa_check(kappa_t);
            let [b, d, th] = s;
            if r * r * kc <= 1.0 {
                vec![("low", (b * b + d * d + th * th).sqrt(), kc * r * r)]
            } else {
                vec![
                    ("high", r * b.abs() + norm2(d, th) / kc, 1.0),
                    ("high_g", kc * b.abs() + norm2(d, th) / r, 1.0),
                ]
            }
        }
        Variant::Nonconducting => {
            let [_, d, rr] = s;
            if r <= 1.0 {
                vec![("low", norm2(rr, d), r * r)]
            } else {
                vec![("high", norm2(r * rr, d), 1.0)]
            }
        }
    }
}

fn required_c(samples: &[Sample], c: f64) -> f64 {
    samples
        .iter()
        .map(|s| s.lhs * (c * s.rate * s.t).exp() / s.w0)
        .fold(1.0, f64::max)
}

/// Largest decay constant on the fixed lattice (and its smallest C) for
/// which every frequency, time and canonical unit state obeys the decay
/// bound of its regime with `C <= c_target`.
pub fn verify_decay(
    kappa_t: f64,
    variant: Variant,
    r_grid: &[f64],
    t_grid: &[f64],
    c_target: f64,
) -> Result<DecayConstants, LinmodesError> {
    if variant == Variant::Conducting && !(kappa_t > 0.0) {
        return Err(LinmodesError::InvalidParams(format!("conducting decay needs kappa_t > 0, got {kappa_t}")));
    }
    let mut samples = Vec::new();
    for &r in r_grid {
        let mm = mode_matrix(r, kappa_t, variant)?;
        for e in 0..3 {
            let mut s0 = [0.0; 3];
            s0[e] = 1.0;
            let w0s = weights(variant, kappa_t, r, s0);
            for &t in t_grid {
                if t < 0.0 {
                    return Err(LinmodesError::InvalidParams(format!("negative time {t}")));
                }
                let s = crate::modes::propagate(&mm, t, s0);
                for ((regime, lhs, rate), (_, w0, _)) in weights(variant, kappa_t, r, s).into_iter().zip(&w0s) {
                    if *w0 == 0.0 {
                        continue;
                    }
                    samples.push(Sample { r, state: e, t, regime, lhs, w0: *w0, rate });
                }
            }
        }
    }
    let mut best = None;
    for c in c_lattice() {
        let big_c = required_c(&samples, c);
        if big_c <= c_target {
            best = Some((big_c, c));
        } else {
            break;
        }
    }
    let (big_c, c, within_target) = match best {
        Some((bc, c)) => (bc, c, true),
        None => {
            let bc = required_c(&samples, FALLBACK.1);
            if bc > FALLBACK.0 {
                return Err(LinmodesError::NoAdmissibleConstants);
            }
            (bc, FALLBACK.1, false)
        }
    };
    let mut rows = Vec::with_capacity(samples.len());
    let mut failures = Vec::new();
    for s in &samples {
        let rhs = big_c * (-c * s.rate * s.t).exp() * s.w0;
        let row = DecayRow {
            variant,
            kappa_t,
            r: s.r,
            state: s.state,
            t: s.t,
            regime: s.regime,
            lhs: s.lhs,
            rhs,
            big_c_used: big_c,
            c_used: c,
            pass: s.lhs <= rhs * (1.0 + 1e-12),
        };
        if s.lhs > c_target * (-c * s.rate * s.t).exp() * s.w0 * (1.0 + 1e-12) {
            failures.push(row.clone());
        }
        rows.push(row);
    }
    Ok(DecayConstants { big_c, c, within_target, rows, failures })
}

/// Worst-case ratios of the time-integrated bounds over canonical unit
/// states and the given frequencies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IntegratedConstants {
    /// `||Λ⁻¹(d,θ)(t)|| + κ̌∫||Λ(d,θ)||` against `||b0|| + κ̌⁻¹||Λ⁻¹(d,θ)0||`, high regime.
    pub be7: f64,
    /// `r²∫|d|` against the four-term data combination, high regime.
    pub be8: f64,
    /// κ = 0: `||(R,d)(t)|| + r²∫||(R,d)||` (r <= 1) or
    /// `||(rR,d)(t)|| + ∫||(rR,r²d)||` (r > 1) against the initial value.
    pub kappa0: f64,
}

/// Trapezoidal quadrature over the exact flow on `[0, t_end]`.
pub fn integrated_constants(
    kappa_t: f64,
    variant: Variant,
    r_grid: &[f64],
    t_end: f64,
    steps: usize,
) -> Result<IntegratedConstants, LinmodesError> {
    let h = t_end / steps as f64;
    let mut out = IntegratedConstants::default();
    for &r in r_grid {
        let mm = mode_matrix(r, kappa_t, variant)?;
        for e in 0..3 {
            let mut s0 = [0.0; 3];
            s0[e] = 1.0;
            let traj = trajectory(&mm, h, steps, s0);
            match variant {
                Variant::Conducting => {
                    let kc = kappa_check(kappa_t);
                    if r * r * kc < 1.0 {
                        continue;
                    }
                    let [b0, d0, t0] = s0;
                    let dt0 = norm2(d0, t0);
                    let rhs7 = b0.abs() + dt0 / (kc * r);
                    let rhs8 = r * b0.abs() + b0.abs() / kc + dt0 / (kc * kc * r) + dt0 / kc;
                    let mut int7 = 0.0;
                    let mut int8 = 0.0;
                    let mut lhs7: f64 = dt0 / r;
                    for k in 1..traj.len() {
                        let (a, b) = (traj[k - 1], traj[k]);
                        int7 += 0.5 * h * kc * r * (norm2(a[1], a[2]) + norm2(b[1], b[2]));
                        int8 += 0.5 * h * r * r * (a[1].abs() + b[1].abs());
                        lhs7 = lhs7.max(norm2(b[1], b[2]) / r + int7);
                    }
                    out.be7 = out.be7.max(lhs7 / rhs7);
                    out.be8 = out.be8.max(int8 / rhs8);
                }
                Variant::Nonconducting => {
                    let w = |s: ModeState| if r <= 1.0 { norm2(s[2], s[1]) } else { norm2(r * s[2], s[1]) };
                    let dens = |s: ModeState| {
                        if r <= 1.0 {
                            r * r * norm2(s[2], s[1])
                        } else {
                            norm2(r * s[2], r * r * s[1])
                        }
                    };
                    let w0 = w(s0);
                    if w0 == 0.0 {
                        continue;
                    }
                    let mut int = 0.0;
                    let mut lhs: f64 = w0;
                    for k in 1..traj.len() {
                        int += 0.5 * h * (dens(traj[k - 1]) + dens(traj[k]));
                        lhs = lhs.max(w(traj[k]) + int);
                    }
                    out.kappa0 = out.kappa0.max(lhs / w0);
                }
            }
        }
    }
    Ok(out)
}
