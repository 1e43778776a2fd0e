use crate::BesovError;
use oberbeck_spectral::{GridSpec, SpectralField, C64};

const INNER: f64 = 0.75;
const OUTER: f64 = 4.0 / 3.0;

fn bump_edge(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Radial cutoff: 1 on `[0, 3/4]`, 0 on `[4/3, inf)`, smooth and non-increasing in
/// between (ratio of `exp(-1/s)` mollifier edges).
pub fn chi(r: f64) -> f64 {
    if r <= INNER {
        return 1.0;
    }
    if r >= OUTER {
        return 0.0;
    }
    let t = (r - INNER) / (OUTER - INNER);
    let a = bump_edge(1.0 - t);
    a / (a + bump_edge(t))
}

/// Ring profile `phi(r) = chi(r/2) - chi(r)`, supported in `[3/4, 8/3]`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

type Sparse = Vec<(u32, f64)>;

/// Littlewood-Paley blocks `Delta_j = phi(2^{-j} D)` for `j_min <= j <= j_max`,
/// tabulated on one grid as sparse multiplier lists.
#[derive(Debug, Clone)]
pub struct DyadicFilterBank {
    pub grid: GridSpec,
    pub j_min: i32,
    pub j_max: i32,
    blocks: Vec<Sparse>,
    low: Sparse,
    top: Sparse,
}

impl DyadicFilterBank {
    /// Default range: the lowest ring sits above the box fundamental
    /// (`3/4 * 2^j_min >= 2 pi / L`) and `2^{j_max + 1} < pi n / L`.
    pub fn for_grid(grid: GridSpec) -> Result<Self, BesovError> {
        let j_min = (grid.fundamental() / INNER).log2().ceil() as i32;
        let mut j_max = grid.k_max().log2().floor() as i32 - 1;
        while 2f64.powi(j_max + 1) >= grid.k_max() {
            j_max -= 1;
        }
        Self::with_range(grid, j_min, j_max)
    }

    pub fn with_range(grid: GridSpec, j_min: i32, j_max: i32) -> Result<Self, BesovError> {
        if j_max < j_min {
            return Err(BesovError::InvalidRange(format!("empty block range [{j_min}, {j_max}]")));
        }
        if 2f64.powi(j_max + 1) >= grid.k_max() {
            return Err(BesovError::InvalidRange(format!(
                "2^(j_max+1) = {} must stay below the Nyquist wavenumber {}",
                2f64.powi(j_max + 1),
                grid.k_max()
            )));
        }
        let nb = (j_max - j_min + 1) as usize;
        let mut blocks = vec![Vec::new(); nb];
        let mut low = Vec::new();
        let mut top = Vec::new();
        for idx in 0..grid.len() {
            let r = grid.xi_norm2(idx).sqrt();
            let lo = chi(r * 2f64.powi(-j_min));
            if lo > 0.0 {
                low.push((idx as u32, lo));
            }
            for (b, list) in blocks.iter_mut().enumerate() {
                let w = phi(r * 2f64.powi(-(j_min + b as i32)));
                if w > 0.0 {
                    list.push((idx as u32, w));
                }
            }
            let hi = 1.0 - chi(r * 2f64.powi(-(j_max + 1)));
            if hi > 0.0 {
                top.push((idx as u32, hi));
            }
        }
        Ok(DyadicFilterBank { grid, j_min, j_max, blocks, low, top })
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_indices(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    fn apply(&self, z: &SpectralField, list: &Sparse) -> SpectralField {
        let mut out = z.zeros_like();
        for (c, src) in z.comps.iter().enumerate() {
            let dst = &mut out.comps[c];
            for &(i, w) in list {
                dst[i as usize] = src[i as usize] * w;
            }
        }
        out
    }

    /// `Delta_j z`.
    pub fn block(&self, z: &SpectralField, j: i32) -> Result<SpectralField, BesovError> {
        if j < self.j_min || j > self.j_max {
            return Err(BesovError::BlockOutOfRange { j, j_min: self.j_min, j_max: self.j_max });
        }
        Ok(self.apply(z, &self.blocks[(j - self.j_min) as usize]))
    }

    /// `S_{j_min} z = chi(2^{-j_min} D) z`, everything below the first block.
    pub fn low_residue(&self, z: &SpectralField) -> SpectralField {
        self.apply(z, &self.low)
    }

    /// `(1 - chi(2^{-j_max-1} D)) z`, everything above the last block.
    pub fn top_residue(&self, z: &SpectralField) -> SpectralField {
        self.apply(z, &self.top)
    }

    /// Multiplier list of block `j` (flat index, weight).
    pub fn block_weights(&self, j: i32) -> &[(u32, f64)] {
        &self.blocks[(j - self.j_min) as usize]
    }

    /// Coefficients of `Delta_j` applied to a raw coefficient array.
    pub fn block_coeffs(&self, coeffs: &[C64], j: i32, out: &mut Vec<C64>) {
        out.clear();
        out.resize(coeffs.len(), C64::new(0.0, 0.0));
        for &(i, w) in self.block_weights(j) {
            out[i as usize] = coeffs[i as usize] * w;
        }
    }

    /// Pieces `[S_{j_min} z, Delta_{j_min} z, ..., Delta_{j_max} z, top]`, which sum to `z`.
    pub fn pieces(&self, z: &SpectralField) -> Vec<SpectralField> {
        let mut out = Vec::with_capacity(self.blocks.len() + 2);
        out.push(self.low_residue(z));
        for b in &self.blocks {
            out.push(self.apply(z, b));
        }
        out.push(self.top_residue(z));
        out
    }
}

/// `(z_low, z_high)`: blocks with `2^j alpha <= 1` and the remaining blocks plus
/// the top residue. `z_low + z_high + S_{j_min} z = z`.
pub fn low_high_split(
    z: &SpectralField,
    alpha: f64,
    bank: &DyadicFilterBank,
) -> Result<(SpectralField, SpectralField), BesovError> {
    if !(alpha > 0.0) {
        return Err(BesovError::InvalidParams(format!("alpha must be positive, got {alpha}")));
    }
    let mut low = z.zeros_like();
    let mut high = bank.top_residue(z);
    for j in bank.block_indices() {
        let b = bank.block(z, j)?;
        if is_low(j, alpha) {
            low.axpy(1.0, &b);
        } else {
            high.axpy(1.0, &b);
        }
    }
    Ok((low, high))
}

pub(crate) fn is_low(j: i32, alpha: f64) -> bool {
    2f64.powi(j) * alpha <= 1.0
}
