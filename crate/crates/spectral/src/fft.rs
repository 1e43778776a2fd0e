//! N-dimensional complex FFTs built from rustfft line transforms, plus
//! helpers that move two real fields through one complex transform.

use crate::GridSpec;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<HashMap<usize, Plans>> = RefCell::new(HashMap::new());
}

fn plans(n: usize) -> Plans {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
            })
            .clone()
    })
}

fn transform(grid: &GridSpec, data: &mut [Complex64], forward: bool) {
    let n = grid.n;
    assert_eq!(data.len(), grid.len(), "buffer does not match grid");
    let (f, i) = plans(n);
    let plan = if forward { f } else { i };
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    // contiguous last axis
    plan.process_with_scratch(data, &mut scratch);
    let total = data.len();
    let mut buf = Vec::new();
    for axis in (0..grid.dim - 1).rev() {
        let stride = n.pow((grid.dim - 1 - axis) as u32);
        let block = n * stride;
        buf.resize(block, Complex64::new(0.0, 0.0));
        for b in (0..total).step_by(block) {
            let chunk = &mut data[b..b + block];
            for m in 0..n {
                let row = &chunk[m * stride..(m + 1) * stride];
                for (line, v) in row.iter().enumerate() {
                    buf[line * n + m] = *v;
                }
            }
            plan.process_with_scratch(&mut buf, &mut scratch);
            for m in 0..n {
                let row = &mut chunk[m * stride..(m + 1) * stride];
                for (line, v) in row.iter_mut().enumerate() {
                    *v = buf[line * n + m];
                }
            }
        }
    }
}

/// In-place forward transform, normalised so that the output holds Fourier
/// series coefficients: `c_k = N^{-1} sum_x f(x) e^{-i k x}`.
pub fn forward(grid: &GridSpec, data: &mut [Complex64]) {
    transform(grid, data, true);
    let s = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= s;
    }
}

/// In-place inverse transform (plain synthesis sum, no scaling).
pub fn inverse(grid: &GridSpec, data: &mut [Complex64]) {
    transform(grid, data, false);
}

/// Synthesize two Hermitian coefficient arrays with one complex transform.
pub fn to_real_pair(grid: &GridSpec, a: &[Complex64], b: Option<&[Complex64]>) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut z: Vec<Complex64> = match b {
        Some(b) => a.iter().zip(b).map(|(x, y)| x + i * y).collect(),
        None => a.to_vec(),
    };
    inverse(grid, &mut z);
    let re = z.iter().map(|c| c.re).collect();
    let im = if b.is_some() { z.iter().map(|c| c.im).collect() } else { Vec::new() };
    (re, im)
}

/// Analyse two real arrays with one complex transform.
pub fn from_real_pair(grid: &GridSpec, f: &[f64], g: Option<&[f64]>) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut z: Vec<Complex64> = match g {
        Some(g) => f.iter().zip(g).map(|(&x, &y)| Complex64::new(x, y)).collect(),
        None => f.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    forward(grid, &mut z);
    if g.is_none() {
        return (z, Vec::new());
    }
    let mut a = vec![Complex64::new(0.0, 0.0); z.len()];
    let mut b = vec![Complex64::new(0.0, 0.0); z.len()];
    for idx in 0..z.len() {
        let zc = z[grid.neg_index(idx)].conj();
        a[idx] = (z[idx] + zc) * 0.5;
        let d = (z[idx] - zc) * 0.5;
        b[idx] = Complex64::new(d.im, -d.re);
    }
    (a, b)
}

/// Synthesize any number of Hermitian arrays, two per transform.
pub fn to_real_many(grid: &GridSpec, coeffs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(coeffs.len());
    for pair in coeffs.chunks(2) {
        let (re, im) = to_real_pair(grid, pair[0], pair.get(1).copied());
        out.push(re);
        if pair.len() == 2 {
            out.push(im);
        }
    }
    out
}

/// Analyse any number of real arrays, two per transform.
pub fn from_real_many(grid: &GridSpec, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        let (a, b) = from_real_pair(grid, pair[0], pair.get(1).copied());
        out.push(a);
        if pair.len() == 2 {
            out.push(b);
        }
    }
    out
}
