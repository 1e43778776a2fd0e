use oberbeck_spectral::snapshot::{read_snapshot, write_snapshot};
use oberbeck_spectral::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_field(grid: GridSpec, ncomp: usize, kmax: i64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, if ncomp == 1 { Rank::Scalar } else { Rank::Vector });
    for c in 0..ncomp {
        for idx in 0..grid.len() {
            let k = grid.wavevector(idx);
            if k.iter().all(|v| v.abs() <= kmax) {
                f.comps[c][idx] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    f.symmetrize();
    f.remove_mean();
    f
}

fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).norm_l2() / b.norm_l2().max(1e-300)
}

#[test]
fn identity_symbol_is_noop() {
    let g = GridSpec::new(2, 16, 3.0).unwrap();
    let z = random_field(g, 1, 7, 1);
    assert_eq!(apply_symbol(&z, &Symbol::lambda_pow(0.0)).unwrap(), z);
}

#[test]
fn sine_is_laplacian_eigenfunction() {
    let l = 5.0;
    let g = GridSpec::new(2, 32, l).unwrap();
    let z = SpectralField::from_fn(g, |x| (2.0 * PI * x[0] / l).sin());
    let out = apply_symbol(&z, &Symbol::laplacian()).unwrap();
    let expect = z.scale(-(2.0 * PI / l).powi(2));
    assert!(rel_diff(&out, &expect) < 1e-13);
}

#[test]
fn heat_symbol_matches_direct_convolution() {
    // Periodised heat kernel convolved by trapezoidal quadrature.
    let (l, n, t, sig) = (10.0, 128, 0.1, 0.6);
    let g = GridSpec::new(2, n, l).unwrap();
    let bump = |x: f64| {
        let d = x - l / 2.0;
        (-d * d / (2.0 * sig * sig)).exp()
    };
    let z = SpectralField::from_fn(g, |x| bump(x[0]));
    let out = apply_symbol(&z, &Symbol::heat(t, 1.0)).unwrap().to_real().remove(0);
    let dx = l / n as f64;
    let kernel = |d: f64| -> f64 {
        (-3..=3)
            .map(|m| {
                let s = d + m as f64 * l;
                (-s * s / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
            })
            .sum()
    };
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        let x = i as f64 * dx;
        let conv: f64 = (0..n).map(|j| bump(j as f64 * dx) * kernel(x - j as f64 * dx) * dx).sum();
        err = err.max((out[i * n] - conv).abs());
        scale = scale.max(conv.abs());
    }
    assert!(err / scale < 1e-8, "relative error {}", err / scale);
}

#[test]
fn singular_symbol_rejects_mean_mode() {
    let g = GridSpec::new(2, 16, 1.0).unwrap();
    let z = SpectralField::from_fn(g, |x| 1.0 + x[0].sin());
    assert!(matches!(
        apply_symbol(&z, &Symbol::lambda_pow(-1.0)),
        Err(SpectralError::SingularSymbolOnMeanMode)
    ));
}

#[test]
fn gradient_field_has_no_solenoidal_part() {
    let g = GridSpec::new(3, 16, 2.0 * PI).unwrap();
    let phi = dealias(&random_field(g, 1, 6, 3));
    let u = grad(&phi);
    let pu = leray_project(&u, Projector::P);
    assert!(pu.norm_l2() < 1e-13 * u.norm_l2());
}

#[test]
fn solenoidal_field_has_no_gradient_part() {
    let g = GridSpec::new(2, 32, 3.0).unwrap();
    let psi = random_field(g, 1, 10, 4);
    // u = (d_y psi, -d_x psi)
    let u = SpectralField::from_components(vec![partial(&psi, 1), partial(&psi, 0).scale(-1.0)]);
    let qu = leray_project(&u, Projector::Q);
    assert!(qu.norm_l2() < 1e-13 * u.norm_l2());
}

#[test]
fn projectors_split_random_fields() {
    let g = GridSpec::new(3, 16, 4.0).unwrap();
    let u = dealias(&random_field(g, 3, 5, 5));
    let p = leray_project(&u, Projector::P);
    let q = leray_project(&u, Projector::Q);
    assert!(div(&p).norm_l2() < 1e-12 * u.norm_l2());
    assert!(rel_diff(&p.add(&q), &u) < 1e-15);
    assert!(rel_diff(&leray_project(&p, Projector::P), &p) < 1e-12);
    assert!(rel_diff(&leray_project(&q, Projector::Q), &q) < 1e-12);
    assert!(leray_project(&q, Projector::P).norm_l2() < 1e-12 * u.norm_l2());
}

#[test]
fn dealias_keeps_band_limited_fields() {
    let g = GridSpec::new(2, 48, 1.0).unwrap();
    let z = random_field(g, 1, 15, 6);
    assert_eq!(dealias(&z), z);
}

#[test]
fn dealias_removes_nyquist_content() {
    let g = GridSpec::new(2, 16, 1.0).unwrap();
    let z = SpectralField::from_fn(g, |x| (PI * 16.0 * x[0]).cos());
    assert!(z.norm_l2() > 0.5);
    assert_eq!(dealias(&z).max_abs_coeff(), 0.0);
}

#[test]
fn dealiased_product_equals_truncated_convolution() {
    let n = 24;
    let g = GridSpec::new(2, n, 1.0).unwrap();
    let f = random_field(g, 1, 7, 7);
    let h = random_field(g, 1, 7, 8);
    let prod = product(&f, &h);
    // exact convolution of the two coefficient sets
    let mut exact = SpectralField::zeros(g, Rank::Scalar);
    for a in 0..g.len() {
        let ka = g.wavevector(a);
        if f.comps[0][a].norm() == 0.0 {
            continue;
        }
        for b in 0..g.len() {
            let kb = g.wavevector(b);
            let k = [ka[0] + kb[0], ka[1] + kb[1], 0];
            if !g.keeps_mode(k) {
                continue;
            }
            let i0 = k[0].rem_euclid(n as i64) as usize;
            let i1 = k[1].rem_euclid(n as i64) as usize;
            exact.comps[0][i0 * n + i1] += f.comps[0][a] * h.comps[0][b];
        }
    }
    assert!(prod.sub(&exact).max_abs_coeff() < 1e-13 * exact.max_abs_coeff());
    // factors band-limited below n/6 give a product that dealiasing leaves alone
    let f = random_field(g, 1, 3, 9);
    let h = random_field(g, 1, 3, 10);
    let r = f.to_real().remove(0);
    let s = h.to_real().remove(0);
    let raw = SpectralField::from_real(g, &[r.iter().zip(&s).map(|(a, b)| a * b).collect()]);
    assert!(dealias(&raw).sub(&raw).max_abs_coeff() < 1e-15);
}

#[test]
fn snapshot_round_trip() {
    let g = GridSpec::new(3, 8, 2.5).unwrap();
    let u = random_field(g, 3, 3, 11);
    let mut buf = Vec::new();
    write_snapshot(&mut buf, "velocity", 0.75, &u).unwrap();
    assert_eq!(buf.len(), 8 + 16 + 24 + 4 + 8 + 3 * 512 * 8);
    let snap = read_snapshot(&mut buf.as_slice()).unwrap();
    assert_eq!(snap.name, "velocity");
    assert_eq!(snap.time, 0.75);
    assert_eq!(snap.field.grid, g);
    assert!(rel_diff(&snap.field, &u) < 1e-14);
    buf[0] = b'X';
    assert!(read_snapshot(&mut buf.as_slice()).is_err());
}

#[test]
fn grid_rejects_bad_sizes() {
    assert!(GridSpec::new(3, 4, 1.0).is_err());
    assert!(GridSpec::new(3, 20, 1.0).is_err());
    assert!(GridSpec::new(1, 16, 1.0).is_err());
    assert!(GridSpec::new(2, 16, -1.0).is_err());
    assert!(GridSpec::new(3, 48, 1.0).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(seed in any::<u64>(), dim in 2usize..=3) {
        let g = GridSpec::new(dim, 16, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = SpectralField::from_real(g, &[samples.clone()]).to_real().remove(0);
        let num: f64 = samples.iter().zip(&back).map(|(a, b)| (a - b) * (a - b)).sum();
        let den: f64 = samples.iter().map(|a| a * a).sum();
        prop_assert!((num / den).sqrt() < 1e-12);
    }

    #[test]
    fn paired_transforms_match_single(seed in any::<u64>()) {
        let g = GridSpec::new(2, 16, 1.0).unwrap();
        let a = random_field(g, 1, 7, seed);
        let b = random_field(g, 1, 7, seed ^ 0xabc);
        let pair = SpectralField::from_components(vec![a.clone(), b.clone()]).to_real();
        let ra = a.to_real().remove(0);
        let diff = pair[0].iter().zip(&ra).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        prop_assert!(diff < 1e-13);
        let back = SpectralField::from_real(g, &pair);
        prop_assert!(back.component(1).sub(&b).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn projectors_are_complementary_idempotents(seed in any::<u64>()) {
        let g = GridSpec::new(3, 8, 2.0).unwrap();
        let u = random_field(g, 3, 3, seed);
        let p = leray_project(&u, Projector::P);
        let q = leray_project(&u, Projector::Q);
        let scale = u.norm_l2();
        prop_assert!(p.add(&q).sub(&u).norm_l2() < 1e-12 * scale);
        prop_assert!(leray_project(&p, Projector::P).sub(&p).norm_l2() < 1e-12 * scale);
        prop_assert!(leray_project(&q, Projector::Q).sub(&q).norm_l2() < 1e-12 * scale);
        prop_assert!(leray_project(&q, Projector::P).norm_l2() < 1e-12 * scale);
    }

    #[test]
    fn symbols_compose_as_products(seed in any::<u64>(), s in -2.0f64..2.0, t in 0.0f64..0.5) {
        let g = GridSpec::new(2, 16, 2.0).unwrap();
        let z = random_field(g, 1, 7, seed);
        let m1 = Symbol::lambda_pow(s);
        let m2 = Symbol::heat(t, 1.0);
        let chained = apply_symbol(&apply_symbol(&z, &m1).unwrap(), &m2).unwrap();
        let joint = apply_symbol(&z, &m1.product(&m2)).unwrap();
        prop_assert!(chained.sub(&joint).max_abs_coeff() <= 1e-15 * joint.max_abs_coeff().max(1.0));
    }

    #[test]
    fn real_symbols_preserve_hermitian_symmetry(seed in any::<u64>(), s in -1.0f64..3.0) {
        let g = GridSpec::new(2, 16, 2.0).unwrap();
        let z = random_field(g, 1, 7, seed);
        let out = apply_symbol(&z, &Symbol::lambda_pow(s)).unwrap();
        prop_assert!(out.hermitian_defect() <= 1e-14 * out.max_abs_coeff().max(1e-300));
    }
}
