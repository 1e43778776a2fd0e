//! Small dense matrices and the matrix exponential.

use std::ops::{Add, Mul, Sub};

/// Square row-major matrix. Only meant for the 3x3 mode blocks and their
/// augmented versions, so everything is naive.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Mat { n: N, a: rows.iter().flatten().copied().collect() }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat { n: self.n, a: self.a.iter().map(|x| x * s).collect() }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Max column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// The `k x k` block starting at `(row, col)`.
    pub fn block(&self, row: usize, col: usize, k: usize) -> Mat {
        let mut b = Mat::zeros(k);
        for i in 0..k {
            for j in 0..k {
                b.set(i, j, self.get(row + i, col + j));
            }
        }
        b
    }

    /// Solves `self * X = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &Mat) -> Mat {
        let n = self.n;
        let mut a = self.a.clone();
        let mut b = rhs.a.clone();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
                .unwrap();
            if piv != col {
                for k in 0..n {
                    a.swap(piv * n + k, col * n + k);
                    b.swap(piv * n + k, col * n + k);
                }
            }
            let d = a[col * n + col];
            for row in col + 1..n {
                let f = a[row * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
                for k in 0..n {
                    b[row * n + k] -= f * b[col * n + k];
                }
            }
        }
        for col in (0..n).rev() {
            let d = a[col * n + col];
            for k in 0..n {
                b[col * n + k] /= d;
            }
            for row in 0..col {
                let f = a[row * n + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..n {
                    b[row * n + k] -= f * b[col * n + k];
                }
            }
        }
        Mat { n, a: b }
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, o: &Mat) -> Mat {
        Mat { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, o: &Mat) -> Mat {
        Mat { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x - y).collect() }
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, o: &Mat) -> Mat {
        let n = self.n;
        let mut c = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0.0 {
                    continue;
                }
                for j in 0..n {
                    c.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        c
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential: degree-13 Padé approximant with scaling and squaring.
pub fn expm(m: &Mat) -> Mat {
    let n = m.n;
    let norm = m.norm1();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = m.scale(2f64.powi(-s));
    let b = &PADE13;
    let id = Mat::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| {
        let mut r = a6.scale(c6);
        r = &r + &a4.scale(c4);
        r = &r + &a2.scale(c2);
        &r + &id.scale(c0)
    };
    let u_hi = lin(b[13], b[11], b[9], 0.0);
    let u = &a * &(&(&a6 * &u_hi) + &lin(b[7], b[5], b[3], b[1]));
    let v_hi = lin(b[12], b[10], b[8], 0.0);
    let v = &(&a6 * &v_hi) + &lin(b[6], b[4], b[2], b[0]);
    let mut r = (&v - &u).solve(&(&v + &u));
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// `(e^{hA}, h φ1(hA), h² φ2(hA))` from one exponential of an augmented matrix.
/// φ1(z) = (e^z − 1)/z and φ2(z) = (e^z − 1 − z)/z².
pub fn etd_coeffs(m: &Mat, h: f64) -> (Mat, Mat, Mat) {
    let n = m.n;
    let mut aug = Mat::zeros(3 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, h * m.get(i, j));
        }
        aug.set(i, n + i, 1.0);
        aug.set(n + i, 2 * n + i, 1.0);
    }
    let e = expm(&aug);
    (e.block(0, 0, n), e.block(0, n, n).scale(h), e.block(0, 2 * n, n).scale(h * h))
}

/// `(e^z, φ1(z), φ2(z))`, accurate near zero.
pub fn phi_scalar(z: f64) -> (f64, f64, f64) {
    if z.abs() < 0.1 {
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        let mut term1 = 1.0;
        let mut term2 = 0.5;
        for k in 1..20 {
            p1 += term1;
            p2 += term2;
            term1 *= z / (k as f64 + 1.0);
            term2 *= z / (k as f64 + 2.0);
        }
        (z.exp(), p1, p2)
    } else {
        let p1 = z.exp_m1() / z;
        (z.exp(), p1, (p1 - 1.0) / z)
    }
}
