use crate::filter::{is_low, DyadicFilterBank};
use crate::BesovError;
use oberbeck_spectral::{fft, pointwise_magnitude, SpectralField, C64};
use serde::{Deserialize, Serialize};

/// Hybrid variant: weight `min(alpha^{-1}, 2^j)^{+1}`, `^{-1}`, or none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HybridSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "none")]
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub alpha: f64,
    pub sign: HybridSign,
}

impl BesovParams {
    pub fn plain(s: f64, p: f64) -> Self {
        BesovParams { s, p, alpha: 1.0, sign: HybridSign::Plain }
    }

    pub fn hybrid(s: f64, p: f64, alpha: f64, sign: HybridSign) -> Self {
        BesovParams { s, p, alpha, sign }
    }

    pub fn validate(&self) -> Result<(), BesovError> {
        if !(self.p >= 1.0) {
            return Err(BesovError::InvalidParams(format!("p must be >= 1, got {}", self.p)));
        }
        if !(self.alpha > 0.0) {
            return Err(BesovError::InvalidParams(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !self.s.is_finite() {
            return Err(BesovError::InvalidParams("s must be finite".into()));
        }
        Ok(())
    }

    /// Block weight `2^{js} min(alpha^{-1}, 2^j)^{+-1}`.
    pub fn weight(&self, j: i32) -> f64 {
        let base = 2f64.powf(j as f64 * self.s);
        let m = if is_low(j, self.alpha) { 2f64.powi(j) } else { 1.0 / self.alpha };
        match self.sign {
            HybridSign::Plain => base,
            HybridSign::Plus => base * m,
            HybridSign::Minus => base / m,
        }
    }
}

/// Truncated norm value plus the ratio of the last two weighted terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub tail_ratio: f64,
}

/// Sum of weighted block terms with the top-of-range Cauchy diagnostic.
pub fn weighted_sum(terms: &[f64]) -> NormValue {
    let value = terms.iter().sum();
    let tail_ratio = match terms.len() {
        0 | 1 => 0.0,
        n => {
            let (a, b) = (terms[n - 1], terms[n - 2]);
            if a == 0.0 {
                0.0
            } else if b == 0.0 {
                f64::INFINITY
            } else {
                a / b
            }
        }
    };
    NormValue { value, tail_ratio }
}

/// Threshold on the tail ratio above which a truncated norm is rejected.
pub const TAIL_LIMIT: f64 = 0.5;

pub fn check_tail(v: NormValue) -> Result<NormValue, BesovError> {
    if v.tail_ratio > TAIL_LIMIT {
        Err(BesovError::NormDivergent { tail_ratio: v.tail_ratio })
    } else {
        Ok(v)
    }
}

/// `L^p` norm of real samples on the grid (grid max for `p = inf`).
pub fn lp_norm(samples: &[f64], p: f64, cell_volume: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if p == 2.0 {
        return (samples.iter().map(|v| v * v).sum::<f64>() * cell_volume).sqrt();
    }
    (samples.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell_volume).powf(1.0 / p)
}

/// `||Delta_j z||_{L^p}` for every block and every exponent in `ps`;
/// result is indexed `[p][j - j_min]`. Vector fields use the pointwise
/// Euclidean magnitude.
pub fn block_lp_norms_multi(z: &SpectralField, ps: &[f64], bank: &DyadicFilterBank) -> Vec<Vec<f64>> {
    block_lp_norms_tuple(&[z], ps, bank)
}

/// Block norms of a tuple of fields taken jointly, i.e. of the pointwise
/// magnitude of the stacked components.
pub fn block_lp_norms_tuple(fields: &[&SpectralField], ps: &[f64], bank: &DyadicFilterBank) -> Vec<Vec<f64>> {
    let grid = bank.grid;
    let dv = grid.cell_volume();
    let mut out = vec![Vec::with_capacity(bank.num_blocks()); ps.len()];
    let mut bufs: Vec<Vec<C64>> = Vec::new();
    for j in bank.block_indices() {
        bufs.clear();
        for f in fields {
            for c in &f.comps {
                let mut b = Vec::new();
                bank.block_coeffs(c, j, &mut b);
                bufs.push(b);
            }
        }
        let all_zero = bufs.iter().all(|b| b.iter().all(|v| *v == C64::new(0.0, 0.0)));
        if all_zero {
            for o in out.iter_mut() {
                o.push(0.0);
            }
            continue;
        }
        let refs: Vec<&[C64]> = bufs.iter().map(|b| b.as_slice()).collect();
        let real = fft::to_real_many(&grid, &refs);
        let mag = pointwise_magnitude(&real);
        for (o, &p) in out.iter_mut().zip(ps) {
            o.push(lp_norm(&mag, p, dv));
        }
    }
    out
}

pub fn block_lp_norms(z: &SpectralField, p: f64, bank: &DyadicFilterBank) -> Vec<f64> {
    block_lp_norms_multi(z, &[p], bank).remove(0)
}

/// Weighted block sum for precomputed block norms.
pub fn norm_from_blocks(blocks: &[f64], params: &BesovParams, bank: &DyadicFilterBank) -> NormValue {
    let terms: Vec<f64> = blocks
        .iter()
        .zip(bank.block_indices())
        .map(|(b, j)| params.weight(j) * b)
        .collect();
    weighted_sum(&terms)
}

/// `||z||_{B^s_{p,1}} = sum_j 2^{js} ||Delta_j z||_{L^p}` over the bank's range,
/// without the tail check.
pub fn besov_norm_unchecked(z: &SpectralField, s: f64, p: f64, bank: &DyadicFilterBank) -> NormValue {
    norm_from_blocks(&block_lp_norms(z, p, bank), &BesovParams::plain(s, p), bank)
}

pub fn besov_norm(z: &SpectralField, s: f64, p: f64, bank: &DyadicFilterBank) -> Result<NormValue, BesovError> {
    BesovParams::plain(s, p).validate()?;
    check_tail(besov_norm_unchecked(z, s, p, bank))
}

pub fn hybrid_norm_unchecked(z: &SpectralField, params: &BesovParams, bank: &DyadicFilterBank) -> NormValue {
    norm_from_blocks(&block_lp_norms(z, params.p, bank), params, bank)
}

/// Hybrid norm in the direct weighted form
/// `sum_j 2^{js} min(alpha^{-1}, 2^j)^{+-1} ||Delta_j z||_{L^p}`.
pub fn hybrid_norm(z: &SpectralField, params: &BesovParams, bank: &DyadicFilterBank) -> Result<NormValue, BesovError> {
    params.validate()?;
    check_tail(hybrid_norm_unchecked(z, params, bank))
}

/// Hybrid norm in split form: the low blocks (`2^j alpha <= 1`) summed with
/// regularity `s +- 1`, plus `alpha^{-+1}` times the high blocks summed with `s`.
pub fn hybrid_norm_split(z: &SpectralField, params: &BesovParams, bank: &DyadicFilterBank) -> Result<f64, BesovError> {
    params.validate()?;
    let blocks = block_lp_norms(z, params.p, bank);
    let shift = match params.sign {
        HybridSign::Plus => 1.0,
        HybridSign::Minus => -1.0,
        HybridSign::Plain => 0.0,
    };
    let mut low = 0.0;
    let mut high = 0.0;
    for (b, j) in blocks.iter().zip(bank.block_indices()) {
        if is_low(j, params.alpha) {
            low += 2f64.powf(j as f64 * (params.s + shift)) * b;
        } else {
            high += 2f64.powf(j as f64 * params.s) * b;
        }
    }
    Ok(low + params.alpha.powf(-shift) * high)
}

/// Per-block time norm of a sampled series (uniform step `dt`): trapezoidal
/// `L^q` for finite `q`, max over samples for `q = inf`.
pub fn time_lq(samples: &[f64], dt: f64, q: f64) -> f64 {
    if q.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(*v));
    }
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (k, v) in samples.iter().enumerate() {
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        acc += w * v.powf(q);
    }
    (acc * dt).powf(1.0 / q)
}

/// Time-Besov norm from a series of block norms `series[t][j - j_min]`:
/// the time norm is taken per block, then the weighted block sum.
pub fn time_norm_from_series(
    series: &[Vec<f64>],
    dt: f64,
    q: f64,
    params: &BesovParams,
    bank: &DyadicFilterBank,
) -> Result<NormValue, BesovError> {
    if series.is_empty() {
        return Err(BesovError::EmptySequence);
    }
    let nb = bank.num_blocks();
    let per_block: Vec<f64> = (0..nb)
        .map(|b| {
            let col: Vec<f64> = series.iter().map(|row| row[b]).collect();
            time_lq(&col, dt, q)
        })
        .collect();
    Ok(norm_from_blocks(&per_block, params, bank))
}

/// `||u||_{L~^q_T(B)}` for uniformly spaced snapshots.
pub fn time_besov_norm(
    snapshots: &[SpectralField],
    dt: f64,
    q: f64,
    params: &BesovParams,
    bank: &DyadicFilterBank,
) -> Result<NormValue, BesovError> {
    params.validate()?;
    if snapshots.is_empty() {
        return Err(BesovError::EmptySequence);
    }
    let series: Vec<Vec<f64>> = snapshots.iter().map(|z| block_lp_norms(z, params.p, bank)).collect();
    time_norm_from_series(&series, dt, q, params, bank)
}

/// The ordinary `L^q_T(B)` norm (time norm outside the block sum), for
/// comparison with the `L~^q_T` convention.
pub fn lq_of_besov_from_series(series: &[Vec<f64>], dt: f64, q: f64, params: &BesovParams, bank: &DyadicFilterBank) -> f64 {
    let per_time: Vec<f64> = series.iter().map(|row| norm_from_blocks(row, params, bank).value).collect();
    time_lq(&per_time, dt, q)
}

/// JSON record of one norm evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub name: String,
    pub s: f64,
    #[serde(with = "exponent_serde")]
    pub p: f64,
    pub alpha: Option<f64>,
    pub sign: HybridSign,
    pub value: f64,
    #[serde(with = "exponent_serde")]
    pub tail_ratio: f64,
}

impl NormRecord {
    pub fn new(name: impl Into<String>, params: &BesovParams, v: NormValue) -> Self {
        NormRecord {
            name: name.into(),
            s: params.s,
            p: params.p,
            alpha: if params.sign == HybridSign::Plain { None } else { Some(params.alpha) },
            sign: params.sign,
            value: v.value,
            tail_ratio: v.tail_ratio,
        }
    }
}

/// Writes infinite exponents as the string `"inf"`.
pub mod exponent_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad exponent {s}"))),
        }
    }
}
