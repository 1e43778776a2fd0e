use oberbeck_spectral::{GridSpec, Rank, SpectralField, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random real mean-free field with `|xi| <= rmax` (radial band limit).
pub fn random_radial(grid: GridSpec, ncomp: usize, rmax: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, if ncomp == 1 { Rank::Scalar } else { Rank::Vector });
    for c in 0..ncomp {
        for idx in 0..grid.len() {
            let r = grid.xi_norm2(idx).sqrt();
            if r <= rmax && grid.keeps_mode(grid.wavevector(idx)) {
                let amp = 1.0 / (1.0 + r * r);
                f.comps[c][idx] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
            }
        }
    }
    f.symmetrize();
    f.remove_mean();
    f
}
