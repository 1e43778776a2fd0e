use crate::SpectralError;
use std::f64::consts::PI;

/// Uniform periodic grid on the torus `[0, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub l: f64,
    pub dealias_fraction: f64,
}

impl GridSpec {
    /// Grid with the default 2/3 dealiasing fraction.
    pub fn new(dim: usize, n: usize, l: f64) -> Result<Self, SpectralError> {
        Self::with_dealias(dim, n, l, 2.0 / 3.0)
    }

    pub fn with_dealias(
        dim: usize,
        n: usize,
        l: f64,
        dealias_fraction: f64,
    ) -> Result<Self, SpectralError> {
        if dim != 2 && dim != 3 {
            return Err(SpectralError::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() && !is_smooth(n) {
            return Err(SpectralError::InvalidGrid(format!(
                "n must be >= 8 and a power of two (or 3*2^k), got {n}"
            )));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(SpectralError::InvalidGrid(format!("box length must be positive, got {l}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "dealias fraction must lie in (0,1], got {dealias_fraction}"
            )));
        }
        Ok(GridSpec { dim, n, l, dealias_fraction })
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Volume element used by real-space quadrature.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.l.powi(self.dim as i32)
    }

    /// Nyquist wavenumber `pi n / L`.
    pub fn k_max(&self) -> f64 {
        PI * self.n as f64 / self.l
    }

    /// Lowest nonzero frequency `2 pi / L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.l
    }

    /// Signed integer wavenumber stored at array position `i` along one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Integer wavevector of a flat index (unused axes are zero).
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        let mut k = [0i64; 3];
        let mut rem = idx;
        for a in (0..self.dim).rev() {
            k[a] = self.wavenumber(rem % n);
            rem /= n;
        }
        k
    }

    /// Physical frequency `2 pi k / L` of a flat index.
    #[inline]
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let k = self.wavevector(idx);
        let s = 2.0 * PI / self.l;
        [k[0] as f64 * s, k[1] as f64 * s, k[2] as f64 * s]
    }

    #[inline]
    pub fn xi_norm2(&self, idx: usize) -> f64 {
        let x = self.xi(idx);
        x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
    }

    /// Flat index of the wavevector `-k`.
    #[inline]
    pub fn neg_index(&self, idx: usize) -> usize {
        let n = self.n;
        let mut out = 0;
        let mut mult = 1;
        let mut rem = idx;
        for _ in 0..self.dim {
            let i = rem % n;
            rem /= n;
            out += ((n - i) % n) * mult;
            mult *= n;
        }
        out
    }

    /// True when some component of `k` sits on the Nyquist index.
    #[inline]
    pub fn touches_nyquist(&self, k: [i64; 3]) -> bool {
        let h = (self.n / 2) as i64;
        k[..self.dim].iter().any(|&c| c == h)
    }

    /// Whether a wavevector survives dealiasing. Modes with
    /// `max |k_i| >= fraction * n / 2` are removed, which for the 2/3 rule keeps
    /// exactly the modes whose quadratic interactions cannot alias back.
    #[inline]
    pub fn keeps_mode(&self, k: [i64; 3]) -> bool {
        let cut = self.dealias_fraction * self.n as f64 / 2.0;
        k[..self.dim].iter().all(|&c| (c.abs() as f64) < cut - 1e-9)
    }

    /// Physical coordinates of a flat index.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let mut x = [0.0; 3];
        let mut rem = idx;
        for a in (0..self.dim).rev() {
            x[a] = (rem % n) as f64 * self.dx();
            rem /= n;
        }
        x
    }

    /// Same number of points and dimension (box length may differ).
    pub fn same_layout(&self, other: &GridSpec) -> bool {
        self.dim == other.dim && self.n == other.n
    }

    /// Copy of this grid with another box length.
    pub fn with_length(&self, l: f64) -> Result<Self, SpectralError> {
        Self::with_dealias(self.dim, self.n, l, self.dealias_fraction)
    }
}

fn is_smooth(n: usize) -> bool {
    n % 3 == 0 && (n / 3).is_power_of_two()
}
