use crate::{fft, GridSpec};
use rustfft::num_complex::Complex64;

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
}

/// Fourier coefficients of a scalar or vector field on a periodic grid.
///
/// `comps[c][idx]` is the coefficient of `e^{i xi . x}` with `xi = 2 pi k / L`
/// and `k = grid.wavevector(idx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub comps: Vec<Vec<C64>>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, rank: Rank) -> Self {
        let nc = match rank {
            Rank::Scalar => 1,
            Rank::Vector => grid.dim,
        };
        SpectralField { grid, comps: vec![vec![C64::new(0.0, 0.0); grid.len()]; nc] }
    }

    pub fn scalar(grid: GridSpec, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, comps: vec![coeffs] }
    }

    /// Build a vector field out of scalar components.
    pub fn from_components(parts: Vec<SpectralField>) -> Self {
        let grid = parts[0].grid;
        let comps = parts
            .into_iter()
            .map(|p| {
                assert!(p.grid == grid && p.comps.len() == 1);
                p.comps.into_iter().next().unwrap()
            })
            .collect();
        SpectralField { grid, comps }
    }

    /// Transform real samples (one array per component, row-major).
    pub fn from_real(grid: GridSpec, samples: &[Vec<f64>]) -> Self {
        let refs: Vec<&[f64]> = samples.iter().map(|v| v.as_slice()).collect();
        SpectralField { grid, comps: fft::from_real_many(&grid, &refs) }
    }

    /// Sample a real scalar function on the grid.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let s: Vec<f64> = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self::from_real(grid, &[s])
    }

    /// Real-space samples of every component.
    pub fn to_real(&self) -> Vec<Vec<f64>> {
        let refs: Vec<&[C64]> = self.comps.iter().map(|v| v.as_slice()).collect();
        fft::to_real_many(&self.grid, &refs)
    }

    pub fn rank(&self) -> Rank {
        if self.comps.len() == 1 {
            Rank::Scalar
        } else {
            Rank::Vector
        }
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField { grid: self.grid, comps: vec![self.comps[c].clone()] }
    }

    pub fn zeros_like(&self) -> Self {
        SpectralField {
            grid: self.grid,
            comps: vec![vec![C64::new(0.0, 0.0); self.grid.len()]; self.comps.len()],
        }
    }

    fn check(&self, other: &Self) {
        assert!(self.grid.same_layout(&other.grid), "grid layout mismatch");
        assert_eq!(self.comps.len(), other.comps.len(), "rank mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale_mut(s);
        out
    }

    pub fn scale_mut(&mut self, s: f64) {
        for c in &mut self.comps {
            for v in c.iter_mut() {
                *v *= s;
            }
        }
    }

    /// `a * self + b * other`
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        self.check(other);
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * a + q * b).collect())
            .collect();
        SpectralField { grid: self.grid, comps }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.check(other);
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            for (p, q) in x.iter_mut().zip(y) {
                *p += q * s;
            }
        }
    }

    /// Mean value of each component (the zero mode).
    pub fn mean(&self) -> Vec<f64> {
        self.comps.iter().map(|c| c[0].re).collect()
    }

    pub fn is_mean_free(&self, tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        self.comps.iter().all(|c| c[0].norm() <= tol * scale)
    }

    pub fn remove_mean(&mut self) {
        for c in &mut self.comps {
            c[0] = C64::new(0.0, 0.0);
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `L^2` norm over the box, by Parseval (pointwise Euclidean norm for vectors).
    pub fn norm_l2(&self) -> f64 {
        let s: f64 = self.comps.iter().flatten().map(|v| v.norm_sqr()).sum();
        (s * self.grid.volume()).sqrt()
    }

    /// `L^2` inner product of two real fields.
    pub fn inner_l2(&self, other: &Self) -> f64 {
        self.check(other);
        let s: f64 = self
            .comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p * q.conj()).re))
            .sum();
        s * self.grid.volume()
    }

    /// Largest violation of `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for c in &self.comps {
            for idx in 0..c.len() {
                d = d.max((c[self.grid.neg_index(idx)].conj() - c[idx]).norm());
            }
        }
        d
    }

    /// Replace the coefficients by their Hermitian part, making the field real.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        for c in &mut self.comps {
            let orig = c.clone();
            for (idx, v) in c.iter_mut().enumerate() {
                *v = (orig[idx] + orig[g.neg_index(idx)].conj()) * 0.5;
            }
        }
    }

    /// Maximum pointwise Euclidean magnitude in real space.
    pub fn max_abs_real(&self) -> f64 {
        pointwise_magnitude(&self.to_real()).into_iter().fold(0.0, f64::max)
    }
}

/// Pointwise Euclidean magnitude of a list of real component arrays.
pub fn pointwise_magnitude(comps: &[Vec<f64>]) -> Vec<f64> {
    if comps.len() == 1 {
        return comps[0].iter().map(|v| v.abs()).collect();
    }
    let n = comps[0].len();
    (0..n)
        .map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .collect()
}
