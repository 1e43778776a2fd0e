//! Acoustic wave propagation and the heat semigroup, both exact in Fourier.

use crate::expm::phi_scalar;
use crate::LinmodesError;
use oberbeck_besov::{block_lp_norms_tuple, norm_from_blocks, time_norm_from_series, BesovParams, DyadicFilterBank};
use oberbeck_spectral::{leray_project, Projector, SpectralField, C64};
use std::f64::consts::SQRT_2;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Solves `q_t + √2 div w = 0`, `w_t + √2 ∇q = 0` for curl-free `w`
/// (checked away from the Nyquist planes).
/// Per mode (q, Λ⁻¹div w) rotates with angular frequency √2|ξ|. Modes on the
/// Nyquist planes are dropped, as in the spectral derivatives.
pub fn acoustic_evolve(
    q0: &SpectralField,
    w0: &SpectralField,
    t: f64,
) -> Result<(SpectralField, SpectralField), LinmodesError> {
    let grid = q0.grid;
    if !grid.same_layout(&w0.grid) || q0.ncomp() != 1 || w0.ncomp() != grid.dim {
        return Err(LinmodesError::InvalidParams("acoustic data must be a scalar and a vector on one grid".into()));
    }
    let mut inner = w0.clone();
    for idx in 0..grid.len() {
        if grid.touches_nyquist(grid.wavevector(idx)) {
            for c in inner.comps.iter_mut() {
                c[idx] = C64::new(0.0, 0.0);
            }
        }
    }
    if leray_project(&inner, Projector::P).norm_l2() > 1e-10 * inner.norm_l2() {
        return Err(LinmodesError::NotCurlFree);
    }
    let mut q = q0.zeros_like();
    let mut w = w0.zeros_like();
    q.comps[0][0] = q0.comps[0][0];
    for idx in 1..grid.len() {
        let k = grid.wavevector(idx);
        if grid.touches_nyquist(k) {
            continue;
        }
        let xi = grid.xi(idx);
        let r = grid.xi_norm2(idx).sqrt();
        let mut d0 = C64::new(0.0, 0.0);
        for c in 0..grid.dim {
            d0 += I * xi[c] * w0.comps[c][idx];
        }
        d0 /= r;
        let (s, co) = (SQRT_2 * r * t).sin_cos();
        let qa = q0.comps[0][idx];
        q.comps[0][idx] = co * qa - s * d0;
        let d = s * qa + co * d0;
        for c in 0..grid.dim {
            w.comps[c][idx] = -I * xi[c] * d / r;
        }
    }
    Ok((q, w))
}

/// `||(q,Qu)||_{L~^{2p/(p-2)}_T(Ḃ^{s+2/p-1}_{p,1})} / ||(q0,Qu0)||_{Ḃ^s_{2,1}}` for
/// the homogeneous acoustic flow sampled at `steps + 1` uniform times in [0, T].
pub fn strichartz_ratio(
    q0: &SpectralField,
    w0: &SpectralField,
    p: f64,
    s: f64,
    t_end: f64,
    steps: usize,
    bank: &DyadicFilterBank,
) -> Result<f64, LinmodesError> {
    if !(p >= 2.0) || steps == 0 {
        return Err(LinmodesError::InvalidParams(format!("p = {p}, steps = {steps}")));
    }
    let data_blocks = block_lp_norms_tuple(&[q0, w0], &[2.0], bank).remove(0);
    let den = norm_from_blocks(&data_blocks, &BesovParams::plain(s, 2.0), bank).value;
    let q_time = if p == 2.0 { f64::INFINITY } else { 2.0 * p / (p - 2.0) };
    let dt = t_end / steps as f64;
    let mut series = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let (q, w) = acoustic_evolve(q0, w0, k as f64 * dt)?;
        series.push(block_lp_norms_tuple(&[&q, &w], &[p], bank).remove(0));
    }
    let params = BesovParams::plain(s + 2.0 / p - 1.0, p);
    let num = time_norm_from_series(&series, dt, q_time, &params, bank)?.value;
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(num / den)
}

/// One exact step of `u_t - Δu = f` with `f` linear in time between the two
/// samples.
pub fn heat_step(u: &SpectralField, f0: Option<&SpectralField>, f1: Option<&SpectralField>, h: f64) -> SpectralField {
    let grid = u.grid;
    let mut out = u.zeros_like();
    for idx in 0..grid.len() {
        let z = -grid.xi_norm2(idx) * h;
        let (e, p1, p2) = phi_scalar(z);
        for c in 0..u.ncomp() {
            let mut v = e * u.comps[c][idx];
            if let (Some(a), Some(b)) = (f0, f1) {
                let (fa, fb) = (a.comps[c][idx], b.comps[c][idx]);
                v += h * p1 * fa + h * p2 * (fb - fa);
            }
            out.comps[c][idx] = v;
        }
    }
    out
}

/// Ratio of `||u||_{L~^q_T(Ḃ^{σ+2/q}_{p,1})}` to
/// `||u0||_{Ḃ^σ_{p,1}} + ||f||_{L~^r_T(Ḃ^{σ+2/r-2}_{p,1})}`, with `u` the exact
/// solution for the sampled forcing `f` (empty slice means no forcing, otherwise
/// `steps + 1` samples).
#[allow(clippy::too_many_arguments)]
pub fn heat_regularity_ratio(
    u0: &SpectralField,
    f: &[SpectralField],
    t_end: f64,
    steps: usize,
    q: f64,
    r: f64,
    sigma: f64,
    p: f64,
    bank: &DyadicFilterBank,
) -> Result<f64, LinmodesError> {
    if !(q >= r && r >= 1.0) || steps == 0 {
        return Err(LinmodesError::InvalidParams(format!("need q >= r >= 1 and steps > 0, got q {q}, r {r}")));
    }
    if !f.is_empty() && f.len() != steps + 1 {
        return Err(LinmodesError::InvalidParams(format!("forcing has {} samples, expected {}", f.len(), steps + 1)));
    }
    let dt = t_end / steps as f64;
    let mut u = u0.clone();
    let mut series = Vec::with_capacity(steps + 1);
    series.push(block_lp_norms_tuple(&[&u], &[p], bank).remove(0));
    for k in 0..steps {
        u = if f.is_empty() { heat_step(&u, None, None, dt) } else { heat_step(&u, Some(&f[k]), Some(&f[k + 1]), dt) };
        series.push(block_lp_norms_tuple(&[&u], &[p], bank).remove(0));
    }
    let lhs = time_norm_from_series(&series, dt, q, &BesovParams::plain(sigma + 2.0 / q, p), bank)?.value;
    let b0 = block_lp_norms_tuple(&[u0], &[p], bank).remove(0);
    let mut rhs = norm_from_blocks(&b0, &BesovParams::plain(sigma, p), bank).value;
    if !f.is_empty() {
        let fs: Vec<Vec<f64>> = f.iter().map(|z| block_lp_norms_tuple(&[z], &[p], bank).remove(0)).collect();
        rhs += time_norm_from_series(&fs, dt, r, &BesovParams::plain(sigma + 2.0 / r - 2.0, p), bank)?.value;
    }
    if rhs == 0.0 {
        return Ok(if lhs == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(lhs / rhs)
}
