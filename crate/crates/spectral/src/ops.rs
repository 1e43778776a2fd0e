use crate::field::{SpectralField, C64};
use crate::SpectralError;
use std::sync::Arc;

/// Fourier multiplier `m(xi)`.
#[derive(Clone)]
pub struct Symbol {
    f: Arc<dyn Fn([f64; 3]) -> C64 + Send + Sync>,
    singular_at_zero: bool,
}

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Symbol {{ singular_at_zero: {} }}", self.singular_at_zero)
    }
}

fn norm2(x: [f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

impl Symbol {
    pub fn new(f: impl Fn([f64; 3]) -> C64 + Send + Sync + 'static, singular_at_zero: bool) -> Self {
        Symbol { f: Arc::new(f), singular_at_zero }
    }

    /// Real radial symbol `m(|xi|)`.
    pub fn radial(f: impl Fn(f64) -> f64 + Send + Sync + 'static, singular_at_zero: bool) -> Self {
        Symbol::new(move |x| C64::new(f(norm2(x).sqrt()), 0.0), singular_at_zero)
    }

    pub fn identity() -> Self {
        Symbol::new(|_| C64::new(1.0, 0.0), false)
    }

    /// `Lambda^s = |D|^s`.
    pub fn lambda_pow(s: f64) -> Self {
        if s == 0.0 {
            return Symbol::identity();
        }
        Symbol::new(
            move |x| {
                let r = norm2(x).sqrt();
                if r == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(r.powf(s), 0.0)
                }
            },
            s < 0.0,
        )
    }

    pub fn laplacian() -> Self {
        Symbol::new(|x| C64::new(-norm2(x), 0.0), false)
    }

    /// Heat semigroup `e^{c t Delta}`.
    pub fn heat(t: f64, c: f64) -> Self {
        Symbol::new(move |x| C64::new((-c * t * norm2(x)).exp(), 0.0), false)
    }

    /// `d / dx_axis`, i.e. `i xi_axis`.
    pub fn partial(axis: usize) -> Self {
        Symbol::new(move |x| C64::new(0.0, x[axis]), false)
    }

    /// Pointwise product `m1 m2`.
    pub fn product(&self, other: &Symbol) -> Self {
        let (a, b) = (self.f.clone(), other.f.clone());
        Symbol::new(move |x| a(x) * b(x), self.singular_at_zero || other.singular_at_zero)
    }

    pub fn eval(&self, xi: [f64; 3]) -> C64 {
        (self.f)(xi)
    }

    pub fn singular_at_zero(&self) -> bool {
        self.singular_at_zero
    }
}

/// Multiply every coefficient by `m(2 pi k / L)`.
pub fn apply_symbol(z: &SpectralField, m: &Symbol) -> Result<SpectralField, SpectralError> {
    if m.singular_at_zero && !z.is_mean_free(1e-12) {
        return Err(SpectralError::SingularSymbolOnMeanMode);
    }
    let g = z.grid;
    let mut out = z.clone();
    let mult: Vec<C64> = (0..g.len()).map(|i| if i == 0 && m.singular_at_zero { C64::new(0.0, 0.0) } else { m.eval(g.xi(i)) }).collect();
    for c in &mut out.comps {
        for (v, w) in c.iter_mut().zip(&mult) {
            *v *= w;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projector {
    /// Onto divergence-free fields.
    P,
    /// Onto gradient (curl-free) fields.
    Q,
}

/// Leray projectors. `Q u(k) = k (k . u(k)) / |k|^2`, `P = I - Q`, with the zero
/// mode assigned entirely to `P`.
pub fn leray_project(u: &SpectralField, which: Projector) -> SpectralField {
    let g = u.grid;
    assert_eq!(u.ncomp(), g.dim, "Leray projection needs a vector field");
    let mut out = u.clone();
    for idx in 0..g.len() {
        let k = g.wavevector(idx);
        let k2: i64 = k.iter().map(|c| c * c).sum();
        let mut dot = C64::new(0.0, 0.0);
        for a in 0..g.dim {
            dot += u.comps[a][idx] * k[a] as f64;
        }
        for a in 0..g.dim {
            let q = if k2 == 0 { C64::new(0.0, 0.0) } else { dot * (k[a] as f64 / k2 as f64) };
            out.comps[a][idx] = match which {
                Projector::Q => q,
                Projector::P => u.comps[a][idx] - q,
            };
        }
    }
    out
}

/// Zero every mode outside the dealiasing window.
pub fn dealias(z: &SpectralField) -> SpectralField {
    let mut out = z.clone();
    dealias_mut(&mut out);
    out
}

pub fn dealias_mut(z: &mut SpectralField) {
    let g = z.grid;
    let mask: Vec<bool> = (0..g.len()).map(|i| g.keeps_mode(g.wavevector(i))).collect();
    for c in &mut z.comps {
        for (v, keep) in c.iter_mut().zip(&mask) {
            if !keep {
                *v = C64::new(0.0, 0.0);
            }
        }
    }
}

/// Spectral derivative along `axis`. The Nyquist coefficient is dropped so the
/// result stays real.
pub fn partial(z: &SpectralField, axis: usize) -> SpectralField {
    let g = z.grid;
    let mut out = z.clone();
    for idx in 0..g.len() {
        let k = g.wavevector(idx);
        let m = if k[axis].abs() as usize * 2 == g.n { 0.0 } else { g.xi(idx)[axis] };
        for c in &mut out.comps {
            c[idx] *= C64::new(0.0, m);
        }
    }
    out
}

/// Gradient of a scalar field.
pub fn grad(z: &SpectralField) -> SpectralField {
    assert_eq!(z.ncomp(), 1);
    SpectralField::from_components((0..z.grid.dim).map(|a| partial(z, a)).collect())
}

/// Divergence of a vector field.
pub fn div(u: &SpectralField) -> SpectralField {
    let g = u.grid;
    assert_eq!(u.ncomp(), g.dim);
    let mut out = partial(&u.component(0), 0);
    for a in 1..g.dim {
        out.axpy(1.0, &partial(&u.component(a), a));
    }
    out
}

pub fn laplacian(z: &SpectralField) -> SpectralField {
    apply_symbol(z, &Symbol::laplacian()).expect("laplacian is regular")
}

/// Dealiased pseudo-spectral product of two scalar fields.
pub fn product(f: &SpectralField, g: &SpectralField) -> SpectralField {
    assert!(f.ncomp() == 1 && g.ncomp() == 1);
    let r = crate::fft::to_real_pair(&f.grid, &f.comps[0], Some(&g.comps[0]));
    let p: Vec<f64> = r.0.iter().zip(&r.1).map(|(a, b)| a * b).collect();
    let mut out = SpectralField::from_real(f.grid, &[p]);
    dealias_mut(&mut out);
    out
}
