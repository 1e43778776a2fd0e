use crate::filter::DyadicFilterBank;
use crate::norms::{block_lp_norms, hybrid_norm_unchecked, besov_norm_unchecked, BesovParams, HybridSign};
use crate::BesovError;
use oberbeck_spectral::{dealias_mut, fft, partial, product, SpectralField, C64};

/// Real-space pieces `[mean, S_{j_min} z - mean, Delta_{j_min} z, ..., Delta_{j_max} z, top]`.
/// The mean mode is its own piece (it sits below every block), the rest of
/// the low residue acts as block `j_min - 1` and the top residue as `j_max + 1`.
fn real_pieces(z: &SpectralField, bank: &DyadicFilterBank) -> Vec<Vec<f64>> {
    assert_eq!(z.ncomp(), 1, "paraproducts act on scalar fields");
    let mut pieces = bank.pieces(z);
    let mut mean = z.zeros_like();
    mean.comps[0][0] = pieces[0].comps[0][0];
    pieces[0].comps[0][0] = C64::new(0.0, 0.0);
    pieces.insert(0, mean);
    let refs: Vec<&[C64]> = pieces.iter().map(|p| p.comps[0].as_slice()).collect();
    fft::to_real_many(&bank.grid, &refs)
}

fn add_into(acc: &mut [f64], v: &[f64], s: f64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += s * b;
    }
}

fn mul_add(acc: &mut [f64], a: &[f64], b: &[f64]) {
    for ((o, x), y) in acc.iter_mut().zip(a).zip(b) {
        *o += x * y;
    }
}

fn finish(bank: &DyadicFilterBank, acc: Vec<f64>) -> SpectralField {
    let mut out = SpectralField::from_real(bank.grid, &[acc]);
    dealias_mut(&mut out);
    out
}

/// Bony paraproduct `T_f g = sum_j S_{j-1} f Delta_j g`, with `S_{j-1} = chi(2^{-(j-1)} D)`.
pub fn paraproduct(f: &SpectralField, g: &SpectralField, bank: &DyadicFilterBank) -> SpectralField {
    let fp = real_pieces(f, bank);
    let gp = real_pieces(g, bank);
    let mut acc = vec![0.0; bank.grid.len()];
    let mut low = fp[0].clone();
    for k in 1..gp.len() {
        if k >= 3 {
            add_into(&mut low, &fp[k - 2], 1.0);
        }
        mul_add(&mut acc, &low, &gp[k]);
    }
    finish(bank, acc)
}

/// Remainder `T'_g f = fg - T_f g = sum_j S_{j+2} g Delta_j f`.
pub fn remainder(g: &SpectralField, f: &SpectralField, bank: &DyadicFilterBank) -> SpectralField {
    let fp = real_pieces(f, bank);
    let gp = real_pieces(g, bank);
    let m = fp.len();
    let mut acc = vec![0.0; bank.grid.len()];
    mul_add(&mut acc, &fp[0], &gp[0]);
    let mut low = gp[0].clone();
    add_into(&mut low, &gp[1], 1.0);
    for i in 1..m {
        if i + 1 < m {
            add_into(&mut low, &gp[i + 1], 1.0);
        }
        mul_add(&mut acc, &low, &fp[i]);
    }
    finish(bank, acc)
}

/// Paraconvection pairing at block `j`:
/// `lhs = |<Delta_j (T_{v^k} d_k z), Delta_j z>|` and
/// `rhs = ||grad v||_inf ||Delta_j z|| sum_{|j'-j| <= N} ||Delta_j' z||`, `N = 4`.
pub fn paraconv_pairing(
    v: &SpectralField,
    z: &SpectralField,
    j: i32,
    bank: &DyadicFilterBank,
) -> Result<(f64, f64), BesovError> {
    const N: i32 = 4;
    let zj = bank.block(z, j)?;
    let grid = bank.grid;
    let mut t = z.zeros_like();
    for k in 0..grid.dim {
        t.axpy(1.0, &paraproduct(&v.component(k), &partial(z, k), bank));
    }
    let lhs = bank.block(&t, j)?.inner_l2(&zj).abs();
    // pointwise Frobenius norm of grad v
    let mut grads = Vec::new();
    for k in 0..grid.dim {
        for a in 0..grid.dim {
            grads.push(partial(&v.component(k), a).comps.remove(0));
        }
    }
    let refs: Vec<&[C64]> = grads.iter().map(|g| g.as_slice()).collect();
    let real = fft::to_real_many(&grid, &refs);
    let gmax = (0..grid.len())
        .map(|i| real.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let norms = block_lp_norms(z, 2.0, bank);
    let near: f64 = bank
        .block_indices()
        .zip(&norms)
        .filter(|(jp, _)| (jp - j).abs() <= N)
        .map(|(_, n)| n)
        .sum();
    let own = norms[(j - bank.j_min) as usize];
    Ok((lhs, gmax * own * near))
}

/// Empirical product-law ratio
/// `||fg||_{B~^{s-beta,+-}_{p,alpha}} / (||f||_{B~^{s,+-}_{p,alpha}} ||g||_{B^{3/2-beta}_{2,1}})`.
pub fn product_law_ratio(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
    beta: f64,
    p: f64,
    alpha: f64,
    sign: HybridSign,
    bank: &DyadicFilterBank,
) -> f64 {
    let fg = product(f, g);
    let num = hybrid_norm_unchecked(&fg, &BesovParams::hybrid(s - beta, p, alpha, sign), bank).value;
    let den = hybrid_norm_unchecked(f, &BesovParams::hybrid(s, p, alpha, sign), bank).value
        * besov_norm_unchecked(g, 1.5 - beta, 2.0, bank).value;
    num / den
}
