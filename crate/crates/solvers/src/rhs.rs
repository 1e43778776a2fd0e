//! Nonlinear tendencies, evaluated pseudo-spectrally and dealiased.

use crate::potential::PotentialField;
use crate::state::{ConductingState, NonConductingState, Triple};
use crate::{PhysParams, SolverError};
use oberbeck_spectral::{dealias_mut, fft, leray_project, GridSpec, Projector, SpectralField, C64};
use std::f64::consts::FRAC_1_SQRT_2;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Floor on 1 + εa below which the state is declared near vacuum.
pub const VACUUM_FLOOR: f64 = 0.1;

/// Spectral derivative coefficients along `axis` (Nyquist coefficient dropped).
pub fn deriv(grid: &GridSpec, c: &[C64], axis: usize) -> Vec<C64> {
    (0..grid.len())
        .map(|idx| {
            let k = grid.wavevector(idx);
            if k[axis].unsigned_abs() as usize * 2 == grid.n {
                C64::new(0.0, 0.0)
            } else {
                I * grid.xi(idx)[axis] * c[idx]
            }
        })
        .collect()
}

/// Coefficients of A u = μΔu + (λ+μ)∇div u.
fn lame(grid: &GridSpec, u: &SpectralField, mu: f64, lambda: f64) -> Vec<Vec<C64>> {
    let dim = grid.dim;
    let mut out = vec![vec![C64::new(0.0, 0.0); grid.len()]; dim];
    for idx in 0..grid.len() {
        let xi = grid.xi(idx);
        let n2 = grid.xi_norm2(idx);
        let mut dot = C64::new(0.0, 0.0);
        for a in 0..dim {
            dot += xi[a] * u.comps[a][idx];
        }
        for a in 0..dim {
            out[a][idx] = -mu * n2 * u.comps[a][idx] - (lambda + mu) * xi[a] * dot;
        }
    }
    out
}

/// Physical-space samples of the velocity and its gradient.
struct Kinematics {
    u: Vec<Vec<f64>>,
    /// grad[i][j] = ∂_j u_i
    grad: Vec<Vec<Vec<f64>>>,
    div: Vec<f64>,
    max_speed: f64,
}

/// Transforms a list of coefficient arrays to physical space.
fn to_real(grid: &GridSpec, bufs: &[Vec<C64>]) -> Vec<Vec<f64>> {
    let refs: Vec<&[C64]> = bufs.iter().map(|b| b.as_slice()).collect();
    fft::to_real_many(grid, &refs)
}

fn kinematics(grid: &GridSpec, u: &SpectralField) -> Kinematics {
    let dim = grid.dim;
    let mut bufs: Vec<Vec<C64>> = u.comps.clone();
    for i in 0..dim {
        for j in 0..dim {
            bufs.push(deriv(grid, &u.comps[i], j));
        }
    }
    let mut real = to_real(grid, &bufs).into_iter();
    let uu: Vec<Vec<f64>> = (0..dim).map(|_| real.next().unwrap()).collect();
    let grad: Vec<Vec<Vec<f64>>> = (0..dim).map(|_| (0..dim).map(|_| real.next().unwrap()).collect()).collect();
    let n = grid.len();
    let mut div = vec![0.0; n];
    for (i, gi) in grad.iter().enumerate() {
        for (d, g) in div.iter_mut().zip(&gi[i]) {
            *d += g;
        }
    }
    let mut max_speed: f64 = 0.0;
    for p in 0..n {
        let s: f64 = uu.iter().map(|c| c[p] * c[p]).sum();
        max_speed = max_speed.max(s.sqrt());
    }
    Kinematics { u: uu, grad, div, max_speed }
}

fn grad_real(grid: &GridSpec, z: &SpectralField) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut bufs = vec![z.comps[0].clone()];
    for a in 0..grid.dim {
        bufs.push(deriv(grid, &z.comps[0], a));
    }
    let mut real = to_real(grid, &bufs);
    let v = real.remove(0);
    (v, real)
}

/// 2μ|Du|² + λ(div u)² with D the symmetric gradient.
fn dissipation(k: &Kinematics, p: usize, mu: f64, lambda: f64) -> f64 {
    let dim = k.u.len();
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let d = 0.5 * (k.grad[i][j][p] + k.grad[j][i][p]);
            s += d * d;
        }
    }
    2.0 * mu * s + lambda * k.div[p] * k.div[p]
}

fn back(grid: GridSpec, samples: Vec<Vec<f64>>) -> SpectralField {
    let mut f = SpectralField::from_real(grid, &samples);
    dealias_mut(&mut f);
    f
}

/// Potential samples (V, ∇V) at time t, zero when absent.
fn potential_real(pot: &PotentialField, t: f64) -> (f64, &[f64], &[Vec<f64>]) {
    (pot.spec.modulation(t).0, &pot.shape_real, &pot.grad_real)
}

/// Nonlinear tendency of the heat-conducting system in the variables (b, u, θ):
/// everything except the 1/ε coupling, A u and κΔθ. Also returns max |u|.
pub fn rhs_conducting(
    state: &ConductingState,
    params: &PhysParams,
    pot: &PotentialField,
) -> Result<(Triple, f64), SolverError> {
    let grid = state.b.grid;
    let dim = grid.dim;
    let n = grid.len();
    let (eps, mu, lambda, kappa) = (params.eps, params.mu, params.lambda, params.kappa);
    let kin = kinematics(&grid, &state.u);
    let (b, gb) = grad_real(&grid, &state.b);
    let (th, gth) = grad_real(&grid, &state.theta);
    let mut extra: Vec<Vec<C64>> = lame(&grid, &state.u, mu, lambda);
    extra.push((0..n).map(|i| -grid.xi_norm2(i) * state.theta.comps[0][i]).collect());
    let mut extra = to_real(&grid, &extra);
    let lap_th = extra.pop().unwrap();
    let au = extra;
    let (m, vs, gv) = potential_real(pot, state.t);
    let has_v = !pot.is_zero() && m != 0.0;

    let mut nb = vec![0.0; n];
    let mut nu_: Vec<Vec<f64>> = vec![vec![0.0; n]; dim];
    let mut nth = vec![0.0; n];
    let mut min_den = f64::INFINITY;
    for p in 0..n {
        let v = if has_v { m * vs[p] } else { 0.0 };
        let a = b[p] + v;
        let den = 1.0 + eps * a;
        min_den = min_den.min(den);
        let div = kin.div[p];
        let mut ugb = 0.0;
        let mut ugth = 0.0;
        let mut ugv = 0.0;
        for j in 0..dim {
            let uj = kin.u[j][p];
            ugb += uj * gb[j][p];
            ugth += uj * gth[j][p];
            if has_v {
                ugv += uj * m * gv[j][p];
            }
        }
        nb[p] = -ugb - v * div - ugv - b[p] * div;
        let c1 = (a - th[p]) / den;
        let c2 = eps * a / den;
        for i in 0..dim {
            let mut conv = 0.0;
            for j in 0..dim {
                conv += kin.u[j][p] * kin.grad[i][j][p];
            }
            let ga = gb[i][p] + if has_v { m * gv[i][p] } else { 0.0 };
            nu_[i][p] = -conv + c1 * ga - c2 * au[i][p];
        }
        nth[p] = -ugth + eps / den * dissipation(&kin, p, mu, lambda) - kappa * c2 * lap_th[p] - th[p] * div;
    }
    if min_den < VACUUM_FLOOR {
        return Err(SolverError::VacuumApproached { min: min_den, t: state.t });
    }
    let mut s1 = back(grid, vec![nb]);
    if pot.spec.is_time_dependent() {
        s1.axpy(-1.0, &pot.dt_at(state.t));
    }
    Ok((Triple { s1, u: back(grid, nu_), s2: back(grid, vec![nth]) }, kin.max_speed))
}

/// Nonlinear tendency of the non-conducting system in (a, u, R).
pub fn rhs_nonconducting(
    state: &NonConductingState,
    params: &PhysParams,
    pot: &PotentialField,
) -> Result<(Triple, f64), SolverError> {
    let grid = state.a.grid;
    let dim = grid.dim;
    let n = grid.len();
    let (eps, mu, lambda) = (params.eps, params.mu, params.lambda);
    let kin = kinematics(&grid, &state.u);
    let (a, ga) = grad_real(&grid, &state.a);
    let (rr, gr) = grad_real(&grid, &state.r);
    let au = to_real(&grid, &lame(&grid, &state.u, mu, lambda));
    let (m, vs, gv) = potential_real(pot, state.t);
    let has_v = !pot.is_zero() && m != 0.0;

    let mut na = vec![0.0; n];
    let mut nu_: Vec<Vec<f64>> = vec![vec![0.0; n]; dim];
    let mut nr = vec![0.0; n];
    let mut min_den = f64::INFINITY;
    for p in 0..n {
        let den = 1.0 + eps * a[p];
        min_den = min_den.min(den);
        let div = kin.div[p];
        let v = if has_v { m * vs[p] } else { 0.0 };
        let (mut uga, mut ugr, mut ugv) = (0.0, 0.0, 0.0);
        for j in 0..dim {
            let uj = kin.u[j][p];
            uga += uj * ga[j][p];
            ugr += uj * gr[j][p];
            if has_v {
                ugv += uj * m * gv[j][p];
            }
        }
        na[p] = -(uga + a[p] * div);
        let c2 = eps * a[p] / den;
        let c3 = a[p] / den;
        for i in 0..dim {
            let mut conv = 0.0;
            for j in 0..dim {
                conv += kin.u[j][p] * kin.grad[i][j][p];
            }
            let gvi = if has_v { m * gv[i][p] } else { 0.0 };
            nu_[i][p] = -conv - c2 * au[i][p] + c3 * (gr[i][p] + gvi);
        }
        nr[p] = -(ugr + rr[p] * div) + eps * dissipation(&kin, p, mu, lambda) - (ugv + v * div);
    }
    if min_den < VACUUM_FLOOR {
        return Err(SolverError::VacuumApproached { min: min_den, t: state.t });
    }
    let mut s2 = back(grid, vec![nr]);
    if pot.spec.is_time_dependent() {
        s2.axpy(-1.0, &pot.dt_at(state.t));
    }
    Ok((Triple { s1: back(grid, vec![na]), u: back(grid, nu_), s2 }, kin.max_speed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoussinesqVariant {
    /// Θ with the potential forcing (√2/2)(∂t + v·∇)V.
    Conducting,
    /// Θ̃ = Θ − (√2/2)V with forcing (√2/4)κΔV.
    ConductingShifted,
    /// Pure transport of Θ, buoyancy +Θ∇V.
    Transport,
}

/// Nonlinear tendency of the limit systems; the velocity part is Leray-projected.
pub fn rhs_boussinesq(
    theta: &SpectralField,
    v: &SpectralField,
    t: f64,
    kappa: f64,
    variant: BoussinesqVariant,
    pot: &PotentialField,
) -> (SpectralField, SpectralField, f64) {
    let grid = theta.grid;
    let dim = grid.dim;
    let n = grid.len();
    let kin = kinematics(&grid, v);
    let (th, gth) = grad_real(&grid, theta);
    let (m, _, gv) = potential_real(pot, t);
    let has_v = !pot.is_zero() && m != 0.0;
    let buoy = match variant {
        BoussinesqVariant::Transport => 1.0,
        _ => -FRAC_1_SQRT_2,
    };
    let mut nth = vec![0.0; n];
    let mut nv: Vec<Vec<f64>> = vec![vec![0.0; n]; dim];
    for p in 0..n {
        let (mut ugth, mut ugv) = (0.0, 0.0);
        for j in 0..dim {
            ugth += kin.u[j][p] * gth[j][p];
            if has_v {
                ugv += kin.u[j][p] * m * gv[j][p];
            }
        }
        nth[p] = -ugth;
        if variant == BoussinesqVariant::Conducting {
            nth[p] += FRAC_1_SQRT_2 * ugv;
        }
        for i in 0..dim {
            let mut conv = 0.0;
            for j in 0..dim {
                conv += kin.u[j][p] * kin.grad[i][j][p];
            }
            let force = if has_v { buoy * th[p] * m * gv[i][p] } else { 0.0 };
            nv[i][p] = -conv + force;
        }
    }
    let mut nt = back(grid, vec![nth]);
    match variant {
        BoussinesqVariant::Conducting if pot.spec.is_time_dependent() => {
            nt.axpy(FRAC_1_SQRT_2, &pot.dt_at(t));
        }
        BoussinesqVariant::ConductingShifted if has_v => {
            let vhat = pot.at(t);
            let mut lap = vhat.zeros_like();
            for idx in 0..n {
                lap.comps[0][idx] = -grid.xi_norm2(idx) * vhat.comps[0][idx];
            }
            nt.axpy(0.25 * std::f64::consts::SQRT_2 * kappa, &lap);
        }
        _ => {}
    }
    let mut nvel = leray_project(&back(grid, nv), Projector::P);
    dealias_mut(&mut nvel);
    (nt, nvel, kin.max_speed)
}
