//! Exact per-mode propagators and ETD coefficients for the stiff linear part.

use crate::state::Triple;
use crate::{PhysParams, SolverError};
use oberbeck_linmodes::{etd_coeffs, mode_matrix_scaled, phi_scalar, Mat, Variant};
use oberbeck_spectral::{GridSpec, C64};
use std::collections::HashMap;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const DROPPED: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    /// e^{hL}
    Exp,
    /// h φ1(hL)
    Phi1,
    /// h φ2(hL)
    Phi2,
}

#[derive(Clone, Debug)]
struct BlockCoeffs {
    m: [[[f64; 3]; 3]; 3],
    w: [f64; 3],
}

fn to_arr(m: &Mat) -> [[f64; 3]; 3] {
    let mut a = [[0.0; 3]; 3];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m.get(i, j);
        }
    }
    a
}

fn integer_norm2(k: [i64; 3]) -> u64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as u64
}

fn mode_keys(grid: &GridSpec) -> (Vec<u32>, Vec<u64>) {
    let mut map: HashMap<u64, u32> = HashMap::new();
    let mut uniq = Vec::new();
    let key = (0..grid.len())
        .map(|idx| {
            let k = grid.wavevector(idx);
            if !grid.keeps_mode(k) {
                return DROPPED;
            }
            let n2 = integer_norm2(k);
            *map.entry(n2).or_insert_with(|| {
                uniq.push(n2);
                (uniq.len() - 1) as u32
            })
        })
        .collect();
    (key, uniq)
}

/// Linear part of the compressible systems: the 3×3 block on
/// (s1, d = Λ⁻¹div u, s2) and the heat factor on Pu, per unique |k|².
/// Modes outside the dealiasing window are mapped to zero.
#[derive(Clone, Debug)]
pub struct LinearPropagator {
    pub grid: GridSpec,
    pub h: f64,
    key: Vec<u32>,
    coeffs: Vec<BlockCoeffs>,
}

impl LinearPropagator {
    pub fn compressible(grid: GridSpec, params: &PhysParams, variant: Variant, h: f64) -> Result<Self, SolverError> {
        let (key, uniq) = mode_keys(&grid);
        let k0 = grid.fundamental();
        let mut coeffs = Vec::with_capacity(uniq.len());
        for &n2 in &uniq {
            if n2 == 0 {
                let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
                let sc = |s: f64| id.map(|row| row.map(|v| v * s));
                coeffs.push(BlockCoeffs { m: [id, sc(h), sc(h / 2.0)], w: [1.0, h, h / 2.0] });
                continue;
            }
            let r = k0 * (n2 as f64).sqrt();
            let kappa = if variant == Variant::Conducting { params.kappa } else { 0.0 };
            let mm = mode_matrix_scaled(r, params.eps, params.nu(), kappa, variant)?;
            let (e, p1, h2p2) = etd_coeffs(&mm.m, h);
            let p2 = h2p2.scale(1.0 / h);
            let (ew, pw1, pw2) = phi_scalar(-params.mu * r * r * h);
            coeffs.push(BlockCoeffs { m: [to_arr(&e), to_arr(&p1), to_arr(&p2)], w: [ew, h * pw1, h * pw2] });
        }
        Ok(LinearPropagator { grid, h, key, coeffs })
    }

    /// Applies the chosen operator to every mode of `x`.
    pub fn apply(&self, which: Which, x: &Triple) -> Triple {
        let grid = self.grid;
        let dim = grid.dim;
        let sel = which as usize;
        let mut out = Triple::zeros(grid);
        for idx in 0..grid.len() {
            let key = self.key[idx];
            if key == DROPPED {
                continue;
            }
            let c = &self.coeffs[key as usize];
            let m = &c.m[sel];
            let cw = c.w[sel];
            let n2 = grid.xi_norm2(idx);
            if n2 == 0.0 {
                out.s1.comps[0][idx] = m[0][0] * x.s1.comps[0][idx];
                out.s2.comps[0][idx] = m[2][2] * x.s2.comps[0][idx];
                for a in 0..dim {
                    out.u.comps[a][idx] = cw * x.u.comps[a][idx];
                }
                continue;
            }
            let xi = grid.xi(idx);
            let r = n2.sqrt();
            let mut dot = C64::new(0.0, 0.0);
            for a in 0..dim {
                dot += xi[a] * x.u.comps[a][idx];
            }
            let d = I * dot / r;
            let v = [x.s1.comps[0][idx], d, x.s2.comps[0][idx]];
            let y = [
                m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
                m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
                m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
            ];
            out.s1.comps[0][idx] = y[0];
            out.s2.comps[0][idx] = y[2];
            for a in 0..dim {
                // Qu = ξ(ξ·u)/r², Pu = u − Qu
                let q = xi[a] * dot / n2;
                let w = x.u.comps[a][idx] - q;
                out.u.comps[a][idx] = -I * xi[a] * y[1] / r + cw * w;
            }
        }
        out
    }
}

/// Diagonal heat propagators for the Boussinesq pair (Θ, v).
#[derive(Clone, Debug)]
pub struct HeatPropagator {
    pub grid: GridSpec,
    pub h: f64,
    key: Vec<u32>,
    /// per unique |k|²: [Θ: e, hφ1, hφ2, v: e, hφ1, hφ2]
    coeffs: Vec<[f64; 6]>,
}

impl HeatPropagator {
    pub fn new(grid: GridSpec, theta_diff: f64, v_diff: f64, h: f64) -> Self {
        let (key, uniq) = mode_keys(&grid);
        let k0 = grid.fundamental();
        let coeffs = uniq
            .iter()
            .map(|&n2| {
                let r2 = k0 * k0 * n2 as f64;
                let (a, b, c) = phi_scalar(-theta_diff * r2 * h);
                let (d, e, f) = phi_scalar(-v_diff * r2 * h);
                [a, h * b, h * c, d, h * e, h * f]
            })
            .collect();
        HeatPropagator { grid, h, key, coeffs }
    }

    pub fn apply(&self, which: Which, theta: &oberbeck_spectral::SpectralField, v: &oberbeck_spectral::SpectralField)
        -> (oberbeck_spectral::SpectralField, oberbeck_spectral::SpectralField) {
        let sel = which as usize;
        let mut th = theta.zeros_like();
        let mut vv = v.zeros_like();
        for idx in 0..self.grid.len() {
            let key = self.key[idx];
            if key == DROPPED {
                continue;
            }
            let c = &self.coeffs[key as usize];
            th.comps[0][idx] = c[sel] * theta.comps[0][idx];
            for a in 0..v.ncomp() {
                vv.comps[a][idx] = c[3 + sel] * v.comps[a][idx];
            }
        }
        (th, vv)
    }
}
