use oberbeck_besov::DyadicFilterBank;
use oberbeck_linmodes::*;
use oberbeck_spectral::{dealias, grad, GridSpec, SpectralField, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};

/// Dormand-Prince 5(4) with tight tolerances.
fn rk45(m: &Mat, t_end: f64, y0: [f64; 3]) -> [f64; 3] {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let f = |y: &[f64; 3]| {
        let v = m.apply(y);
        [v[0], v[1], v[2]]
    };
    let (mut t, mut y, mut h): (f64, [f64; 3], f64) = (0.0, y0, 1e-4);
    let tol = 1e-15;
    while t < t_end {
        h = h.min(t_end - t);
        let mut k = [[0.0; 3]; 7];
        k[0] = f(&y);
        for s in 1..7 {
            let mut ys = y;
            for i in 0..3 {
                for j in 0..s {
                    ys[i] += h * A[s][j] * k[j][i];
                }
            }
            k[s] = f(&ys);
        }
        let mut ynew = y;
        let mut err: f64 = 0.0;
        for i in 0..3 {
            let mut e = 0.0;
            for s in 0..6 {
                ynew[i] += h * A[6][s] * k[s][i];
            }
            for s in 0..7 {
                e += h * E[s] * k[s][i];
            }
            err = err.max(e.abs() / (tol + tol * y[i].abs().max(ynew[i].abs())));
        }
        if err <= 1.0 {
            t += h;
            y = ynew;
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    y
}

fn rel(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    d / (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt()
}

#[test]
fn mode_matrices_by_substitution() {
    let c = mode_matrix(1.0, 1.0, Variant::Conducting).unwrap();
    assert_eq!(c.m, Mat::from_rows([[0.0, -1.0, 0.0], [1.0, -1.0, 1.0], [0.0, -1.0, -1.0]]));
    let n = mode_matrix(1.0, 0.0, Variant::Nonconducting).unwrap();
    assert_eq!(n.m, Mat::from_rows([[0.0, -1.0, 0.0], [0.0, -1.0, 1.0], [0.0, -1.0, 0.0]]));
    let s = mode_matrix_scaled(2.0, 0.5, 3.0, 0.7, Variant::Conducting).unwrap();
    assert_eq!(s.m, Mat::from_rows([[0.0, -4.0, 0.0], [4.0, -12.0, 4.0], [0.0, -4.0, -2.8]]));
    assert!(matches!(mode_matrix(0.0, 1.0, Variant::Conducting), Err(LinmodesError::NonPositiveFrequency(_))));
    assert!(mode_matrix(-1.0, 1.0, Variant::Conducting).is_err());
}

/// Roots of x³ + a x² + b x + c by the trigonometric / Cardano formulas.
fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<C64> {
    let p = b - a * a / 3.0;
    let q = 2.0 * a.powi(3) / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let shift = -a / 3.0;
    if disc > 0.0 {
        let u = (-q / 2.0 + disc.sqrt()).cbrt();
        let v = (-q / 2.0 - disc.sqrt()).cbrt();
        let re = -(u + v) / 2.0;
        let im = (u - v) * 3f64.sqrt() / 2.0;
        vec![C64::new(u + v + shift, 0.0), C64::new(re + shift, im), C64::new(re + shift, -im)]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let th = (3.0 * q / (p * m)).acos() / 3.0;
        (0..3).map(|k| C64::new(m * (th - 2.0 * PI * k as f64 / 3.0).cos() + shift, 0.0)).collect()
    }
}

#[test]
fn eigenvalues_have_nonpositive_real_parts() {
    for &(r, k) in &[(1.0, 1.0), (0.01, 0.5), (8.0, 2.0), (64.0, 1.0), (0.3, 0.1)] {
        let m = mode_matrix(r, k, Variant::Conducting).unwrap().m;
        // characteristic polynomial x³ - tr x² + (sum of principal 2x2 minors) x - det
        let g = |i: usize, j: usize| m.get(i, j);
        let tr = g(0, 0) + g(1, 1) + g(2, 2);
        let minors = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2) - g(0, 2) * g(2, 0) + g(1, 1) * g(2, 2)
            - g(1, 2) * g(2, 1);
        let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
        for lam in cubic_roots(-tr, minors, -det) {
            assert!(lam.re <= 1e-12 * (1.0 + lam.norm()), "r {r}, kappa {k}: {lam}");
            // the exponential decays at least like the slowest root
            let t = 3.0;
            let e = mode_matrix(r, k, Variant::Conducting).unwrap().exp(t);
            let growth = (0..3).map(|i| (0..3).map(|j| e.get(i, j).powi(2)).sum::<f64>()).sum::<f64>().sqrt();
            assert!(growth.is_finite());
        }
    }
}

#[test]
fn propagate_matches_ode_oracle() {
    let mm = mode_matrix(1.0, 1.0, Variant::Conducting).unwrap();
    let s = propagate(&mm, 1.0, [1.0, 0.0, 0.0]);
    let oracle = rk45(&mm.m, 1.0, [1.0, 0.0, 0.0]);
    assert!(rel(s, oracle) < 1e-12, "{s:?} vs {oracle:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let r = 2f64.powf(rng.gen_range(-4.0..3.0));
        let k = rng.gen_range(0.1..3.0);
        let t = rng.gen_range(0.0..4.0);
        let s0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        for v in [Variant::Conducting, Variant::Nonconducting] {
            let mm = mode_matrix(r, k, v).unwrap();
            let a = propagate(&mm, t, s0);
            let b = rk45(&mm.m, t, s0);
            assert!(rel(a, b) < 1e-12, "r {r} k {k} t {t}: {}", rel(a, b));
        }
    }
    assert_eq!(propagate(&mm, 0.0, [0.3, -0.2, 0.1]), [0.3, -0.2, 0.1]);
}

#[test]
fn pade_exponential_on_known_matrices() {
    // rotation generator
    let th = 7.3;
    let e = expm(&Mat::from_rows([[0.0, -th], [th, 0.0]]));
    assert!((e.get(0, 0) - th.cos()).abs() < 1e-13 && (e.get(1, 0) - th.sin()).abs() < 1e-13);
    // nilpotent
    let e = expm(&Mat::from_rows([[0.0, 2.0, 0.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]));
    assert_eq!(e.get(0, 2), 3.0);
    // phi functions against the scalar formulas
    let (e, p1, p2) = etd_coeffs(&Mat::from_rows([[-2.5]]), 0.4);
    let (se, sp1, sp2) = phi_scalar(-1.0);
    assert!((e.get(0, 0) - se).abs() < 1e-15);
    assert!((p1.get(0, 0) - 0.4 * sp1).abs() < 1e-15);
    assert!((p2.get(0, 0) - 0.16 * sp2).abs() < 1e-15);
    let (_, a1, a2) = phi_scalar(1e-4);
    let (_, b1, b2) = phi_scalar(2e-3);
    assert!((a1 - 1.000050001666708).abs() < 1e-15 && (a2 - 0.500016667083342).abs() < 1e-14);
    assert!((b1 - ((2e-3f64).exp_m1() / 2e-3)).abs() < 1e-14 && b2 > 0.5);
}

#[test]
fn antisymmetric_part_conserves_norm() {
    for &r in &[0.01, 1.0, 50.0] {
        for v in [Variant::Conducting, Variant::Nonconducting] {
            let mm = mode_matrix(r, 0.0, v).unwrap().without_diffusion();
            let s0 = [0.3, -1.2, 0.7];
            let n0 = (s0.iter().map(|x| x * x).sum::<f64>()).sqrt();
            for &t in &[0.1, 1.0, 10.0, 100.0] {
                let s = propagate(&mm, t, s0);
                let n = (s.iter().map(|x| x * x).sum::<f64>()).sqrt();
                if v == Variant::Conducting {
                    assert!((n - n0).abs() < 1e-12 * n0, "r {r} t {t}");
                }
                // the nonconducting first-order part is not antisymmetric in (a,d,R) but keeps (d,R)
                let dr = |s: [f64; 3]| (s[1] * s[1] + s[2] * s[2]).sqrt();
                if v == Variant::Nonconducting {
                    assert!((dr(s) - dr(s0)).abs() < 1e-12 * n0);
                }
            }
        }
    }
}

#[test]
fn nonconducting_invariant_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let r = 2f64.powf(rng.gen_range(-6.0..6.0));
        let s0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let mm = mode_matrix(r, 0.0, Variant::Nonconducting).unwrap();
        let t = rng.gen_range(0.0..50.0);
        let s = propagate(&mm, t, s0);
        assert!(((s[0] - s[2]) - (s0[0] - s0[2])).abs() < 1e-13, "r {r}");
    }
}

#[test]
fn energy_functionals() {
    let w = EnergyWeights::for_kappa(0.5).unwrap();
    assert_eq!(w.alpha, 3.0);
    assert_eq!(EnergyWeights::for_kappa(2.0).unwrap().alpha, 1.0);
    assert!(EnergyWeights::for_kappa(0.0).is_err());
    assert_eq!(energy_f([0.0; 3], 2.0, w), 0.0);
    assert_eq!(energy_h([0.0; 3], 2.0, w, 0.5).unwrap(), 0.0);
    let bad = EnergyWeights { alpha: 1.0 };
    assert!(matches!(energy_h2([1.0, 0.0, 0.0], 1.0, bad, 0.2), Err(LinmodesError::NegativeHSquare { .. })));
}

#[test]
fn equivalence_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &kt in &[0.1, 0.5, 1.0, 2.0] {
        let w = EnergyWeights::for_kappa(kt).unwrap();
        let a = w.alpha;
        for &r in &[0.25, 1.0, 4.0] {
            for _ in 0..1000 {
                let s = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let [b, d, th] = s;
                let mid = energy_f2(s, r, w) - (a + 1.0) * (b * b + th * th);
                let rb2 = (r * b).powi(2);
                assert!((a - 0.5) * d * d + rb2 / 3.0 <= mid + 1e-14);
                assert!(mid <= (a + 2.5) * d * d + 5.0 / 3.0 * rb2 + 1e-14);
            }
        }
    }
}

#[test]
fn energy_identity_along_exact_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    let mut slack = f64::MAX;
    for _ in 0..1000 {
        let r = 2f64.powf(rng.gen_range(-3.0..3.0));
        let kt = 2f64.powf(rng.gen_range(-2.0..1.5));
        let s0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let t = rng.gen_range(0.0..2.0);
        let chk = check_energy_identity(s0, r, kt, t, 1e-5).unwrap();
        worst = worst.max(chk.residual);
        slack = slack.min(-chk.be4_slack);
    }
    assert!(worst < 1e-6, "residual {worst}");
    assert!(slack >= -1e-8, "slack {slack}");
}

#[test]
fn trivial_decay_at_time_zero() {
    let out = verify_decay(1.0, Variant::Conducting, &[2f64.powi(-6)], &[0.0], 10.0).unwrap();
    assert!(out.big_c >= 1.0 && out.big_c <= 1.0 + 1e-15);
    assert!(out.rows.iter().all(|r| r.pass));
}

#[test]
fn decay_constants_on_the_reference_sweep() {
    let rg = log_grid(2f64.powi(-6), 2f64.powi(6), 64);
    let tg = lin_grid(0.0, 50.0, 32);
    for &kt in &[0.5, 1.0, 2.0] {
        let out = verify_decay(kt, Variant::Conducting, &rg, &tg, 10.0).unwrap();
        assert!(out.within_target && out.big_c <= 10.0 && out.c >= 0.01, "kappa {kt}: C {} c {}", out.big_c, out.c);
        assert!(out.failures.is_empty() && out.rows.iter().all(|r| r.pass));
    }
    let out = verify_decay(0.0, Variant::Nonconducting, &rg, &tg, 10.0).unwrap();
    assert!(out.big_c <= 10.0 && out.c >= 0.01, "nonconducting: C {} c {}", out.big_c, out.c);
    assert!(matches!(
        verify_decay(0.0, Variant::Conducting, &rg, &tg, 10.0),
        Err(LinmodesError::InvalidParams(_))
    ));
}

#[test]
fn integrated_bounds() {
    let rg = log_grid(2f64.powi(-6), 2f64.powi(6), 64);
    for &kt in &[0.5, 1.0, 2.0] {
        let ic = integrated_constants(kt, Variant::Conducting, &rg, 50.0, 20000).unwrap();
        assert!(ic.be7 > 0.0 && ic.be7 <= 20.0 && ic.be8 <= 20.0, "{ic:?}");
    }
    let ic = integrated_constants(0.0, Variant::Nonconducting, &rg, 50.0, 20000).unwrap();
    assert!(ic.kappa0 > 0.0 && ic.kappa0 <= 20.0, "{ic:?}");
}

fn gaussian(g: GridSpec, sig: f64) -> SpectralField {
    let l = g.l;
    let mut z = SpectralField::from_fn(g, |x| {
        let r2: f64 = (0..g.dim).map(|c| (x[c] - l / 2.0).powi(2)).sum();
        (-r2 / (2.0 * sig * sig)).exp()
    });
    z.remove_mean();
    z
}

#[test]
fn acoustic_plane_wave_and_energy() {
    let g = GridSpec::new(2, 32, 2.0 * PI).unwrap();
    let q0 = SpectralField::from_fn(g, |x| (3.0 * x[0] + x[1]).cos());
    let w0 = SpectralField::zeros(g, oberbeck_spectral::Rank::Vector);
    let (q, w) = acoustic_evolve(&q0, &w0, 0.0).unwrap();
    assert!(q.sub(&q0).norm_l2() < 1e-14 && w.norm_l2() == 0.0);
    let r = 10f64.sqrt();
    for &t in &[0.3, 1.7, 5.0] {
        let (q, w) = acoustic_evolve(&q0, &w0, t).unwrap();
        let exact = SpectralField::from_fn(g, |x| (SQRT_2 * r * t).cos() * (3.0 * x[0] + x[1]).cos());
        assert!(q.sub(&exact).norm_l2() < 1e-12 * q0.norm_l2());
        // w = -(1/r) sin(√2 r t) ∇ (sin phase)... closed form for the velocity
        let wx = SpectralField::from_fn(g, |x| (SQRT_2 * r * t).sin() * 3.0 / r * (3.0 * x[0] + x[1]).sin());
        let wy = SpectralField::from_fn(g, |x| (SQRT_2 * r * t).sin() / r * (3.0 * x[0] + x[1]).sin());
        let wexact = SpectralField::from_components(vec![wx, wy]);
        assert!(w.sub(&wexact).norm_l2() < 1e-12 * q0.norm_l2());
    }
    // energy with curl-free velocity data
    let g3 = GridSpec::new(3, 16, 10.0).unwrap();
    let q0 = dealias(&gaussian(g3, 1.2));
    let w0 = dealias(&grad(&gaussian(g3, 0.9)));
    let e0 = q0.norm_l2().powi(2) + w0.norm_l2().powi(2);
    for &t in &[0.5, 4.0] {
        let (q, w) = acoustic_evolve(&q0, &w0, t).unwrap();
        let e = q.norm_l2().powi(2) + w.norm_l2().powi(2);
        assert!((e - e0).abs() < 1e-12 * e0);
    }
    let swirl = SpectralField::from_components(vec![
        SpectralField::from_fn(g, |x| x[1].sin()),
        SpectralField::from_fn(g, |x| x[0].sin()),
    ]);
    let q0 = SpectralField::zeros(g, oberbeck_spectral::Rank::Scalar);
    assert!(matches!(acoustic_evolve(&q0, &swirl, 1.0), Err(LinmodesError::NotCurlFree)));
}

#[test]
fn strichartz_endpoint_and_zero_data() {
    let g = GridSpec::new(3, 16, 12.0).unwrap();
    let bank = DyadicFilterBank::for_grid(g).unwrap();
    let q0 = gaussian(g, 1.5);
    let w0 = grad(&gaussian(g, 1.5));
    let r = strichartz_ratio(&q0, &w0, 2.0, 0.5, 3.0, 30, &bank).unwrap();
    assert!((r - 1.0).abs() < 0.05, "{r}");
    let z = q0.zeros_like();
    let wz = w0.zeros_like();
    assert_eq!(strichartz_ratio(&z, &wz, 4.0, 0.5, 3.0, 10, &bank).unwrap(), 0.0);
}

#[test]
fn dispersive_sup_norm_decay() {
    // no wrap-around: speed √2 times 10 plus four widths stays inside half the box
    let g = GridSpec::new(3, 64, 40.0).unwrap();
    let q0 = gaussian(g, 1.5);
    let w0 = q0.zeros_like();
    let w0 = SpectralField::from_components(vec![w0.clone(), w0.clone(), w0]);
    let vals: Vec<f64> = [2.0, 4.0, 6.0, 8.0, 10.0]
        .iter()
        .map(|&t| t * acoustic_evolve(&q0, &w0, t).unwrap().0.max_abs_real())
        .collect();
    let (lo, hi) = vals.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo < 3.0, "{vals:?}");
    // closed form for radial data with zero velocity: q = [(ρ−ct)G(ρ−ct) + (ρ+ct)G(ρ+ct)]/(2ρ)
    let t = 6.0;
    let (q, _) = acoustic_evolve(&q0, &w0, t).unwrap();
    let qs = q.to_real();
    let c = SQRT_2 * t;
    let gauss = |s: f64| (-s * s / (2.0 * 1.5 * 1.5)).exp();
    let mean = gaussian(g, 1.5).to_real()[0][0] - gauss(20.0 * 3f64.sqrt());
    let mut err: f64 = 0.0;
    for idx in (0..g.len()).step_by(97) {
        let x = g.position(idx);
        let rho = ((x[0] - 20.0).powi(2) + (x[1] - 20.0).powi(2) + (x[2] - 20.0).powi(2)).sqrt().max(1e-9);
        let exact = ((rho - c) * gauss(rho - c) + (rho + c) * gauss(rho + c)) / (2.0 * rho) + mean;
        err = err.max((qs[0][idx] - exact).abs());
    }
    assert!(err < 1e-6, "{err}");
}

#[test]
fn heat_ratios() {
    let g = GridSpec::new(2, 64, 30.0).unwrap();
    let bank = DyadicFilterBank::for_grid(g).unwrap();
    for &sig in &[0.7, 1.2, 2.0] {
        let u0 = gaussian(g, sig);
        let r = heat_regularity_ratio(&u0, &[], 10.0, 200, f64::INFINITY, 1.0, 0.5, 2.0, &bank).unwrap();
        assert!(r <= 1.0 + 1e-12, "{r}");
        let r = heat_regularity_ratio(&u0, &[], 10.0, 400, 1.0, 1.0, 0.5, 2.0, &bank).unwrap();
        assert!(r > 0.0 && r <= 5.0, "{r}");
    }
    let f = gaussian(g, 1.0);
    let fs = vec![f.clone(); 201];
    let u0 = f.zeros_like();
    for &q in &[1.0, 2.0, f64::INFINITY] {
        let r = heat_regularity_ratio(&u0, &fs, 10.0, 200, q, 1.0, 0.5, 2.0, &bank).unwrap();
        assert!(r > 0.0 && r <= 5.0, "q {q}: {r}");
    }
    assert!(heat_regularity_ratio(&u0, &fs, 10.0, 200, 1.0, 2.0, 0.5, 2.0, &bank).is_err());
}

#[test]
fn duhamel_step_is_exact_for_constant_forcing() {
    let g = GridSpec::new(2, 16, 2.0 * PI).unwrap();
    let f = SpectralField::from_fn(g, |x| (2.0 * x[0]).cos());
    let mut u = f.zeros_like();
    for _ in 0..7 {
        u = heat_step(&u, Some(&f), Some(&f), 0.1);
    }
    let exact = f.scale((1.0 - (-4.0f64 * 0.7).exp()) / 4.0);
    assert!(u.sub(&exact).norm_l2() < 1e-14 * exact.norm_l2());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_property(lr in -6.0f64..6.0, kt in 0.05f64..3.0, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0,
                          s0 in prop::array::uniform3(-1.0f64..1.0)) {
        let mm = mode_matrix(2f64.powf(lr), kt, Variant::Conducting).unwrap();
        let a = propagate(&mm, t1 + t2, s0);
        let b = propagate(&mm, t2, propagate(&mm, t1, s0));
        let n = s0.iter().map(|x| x * x).sum::<f64>().sqrt();
        let d = (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
        prop_assert!(d <= 1e-11 * n.max(1e-300));
    }

    #[test]
    fn energy_dissipates(lr in -4.0f64..4.0, kt in 0.05f64..3.0, t in 0.0f64..10.0,
                         s0 in prop::array::uniform3(-1.0f64..1.0)) {
        let r = 2f64.powf(lr);
        let mm = mode_matrix(r, kt, Variant::Conducting).unwrap();
        let w = EnergyWeights::for_kappa(kt).unwrap();
        let f0 = energy_f2(s0, r, w);
        let f1 = energy_f2(propagate(&mm, t, s0), r, w);
        prop_assert!(f1 <= f0 * (1.0 + 1e-12) + 1e-300);
    }
}
