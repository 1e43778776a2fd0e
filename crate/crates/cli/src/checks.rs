//! Computations behind `linear-verify`, `strichartz` and `besov-test`.

use crate::config::{BesovTestConfig, LinearVerifyConfig, StrichartzConfig};
use crate::CliError;
use oberbeck_besov::{paraproduct, product_law_ratio, remainder, DyadicFilterBank, HybridSign};
use oberbeck_linmodes::{
    acoustic_evolve, heat_regularity_ratio, strichartz_ratio, verify_decay, DecayConstants, DecayRow, EnergyWeights,
    LinmodesError, Variant,
};
use oberbeck_solvers::initial::{gaussian_bump, random_smooth};
use oberbeck_solvers::{relation_check, ConductingState};
use oberbeck_spectral::{product, GridSpec, Rank, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One measured quantity against its bound. Rows without a bound carry
/// `limit = NaN` and always pass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub case: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl CheckRow {
    fn bounded(check: &str, case: String, value: f64, limit: f64) -> Self {
        CheckRow { check: check.into(), case, value, limit, pass: value <= limit }
    }

    fn info(check: &str, case: String, value: f64) -> Self {
        CheckRow { check: check.into(), case, value, limit: f64::NAN, pass: value.is_finite() }
    }
}

pub fn all_pass(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    hi / lo
}

fn grid(dim: usize, n: usize, l: f64) -> Result<GridSpec, CliError> {
    GridSpec::new(dim, n, l).map_err(|e| CliError::Config(e.to_string()))
}

fn bank(g: GridSpec) -> Result<DyadicFilterBank, CliError> {
    DyadicFilterBank::for_grid(g).map_err(|e| CliError::Config(e.to_string()))
}

/// Result of the decay sweep with one row per (r, unit state, t).
#[derive(Clone, Debug)]
pub struct LinearVerifyOutcome {
    pub constants: DecayConstants,
    pub rows: Vec<DecayRow>,
}

/// Keeps, for each (r, unit state, t), the regime with the largest lhs/rhs.
pub fn merge_regimes(rows: &[DecayRow]) -> Vec<DecayRow> {
    let load = |r: &DecayRow| if r.rhs > 0.0 { r.lhs / r.rhs } else { f64::INFINITY };
    let mut out: Vec<DecayRow> = Vec::with_capacity(rows.len());
    for r in rows {
        match out.last_mut() {
            Some(last) if last.r == r.r && last.state == r.state && last.t == r.t => {
                let pass = last.pass && r.pass;
                if load(r) > load(last) {
                    *last = r.clone();
                }
                last.pass = pass;
            }
            _ => out.push(r.clone()),
        }
    }
    out
}

/// Sweeps the decay bounds. `Err(Verification)` when no admissible pair
/// exists or the pair misses the target.
pub fn linear_verify(cfg: &LinearVerifyConfig) -> Result<LinearVerifyOutcome, CliError> {
    cfg.validate()?;
    if cfg.variant == Variant::Conducting {
        if let Err(e) = EnergyWeights::for_kappa(cfg.kappa_t) {
            return Err(CliError::Verification(format!(
                "inadmissible energy weight alpha = 2/min(1, kappa_t) - 1 for the conducting variant ({e})"
            )));
        }
    }
    let constants = match verify_decay(cfg.kappa_t, cfg.variant, &cfg.r_values(), &cfg.t_values(), cfg.c_target) {
        Ok(c) => c,
        Err(LinmodesError::NoAdmissibleConstants) => {
            return Err(CliError::Verification(LinmodesError::NoAdmissibleConstants.to_string()))
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    let rows = merge_regimes(&constants.rows);
    Ok(LinearVerifyOutcome { constants, rows })
}

fn zero_vector(g: GridSpec) -> SpectralField {
    SpectralField::zeros(g, Rank::Vector)
}

/// Strichartz ratios across widths, t‖q(t)‖_∞ over the pre-wrap window and
/// the heat maximal-regularity ratios.
pub fn strichartz_suite(cfg: &StrichartzConfig) -> Result<Vec<CheckRow>, CliError> {
    cfg.validate()?;
    let g = grid(cfg.dim, cfg.n, cfg.l)?;
    let b = bank(g)?;
    let lin = |e: LinmodesError| CliError::Runtime(e.to_string());
    let mut rows = Vec::new();

    let mut ratios = Vec::new();
    for &w in &cfg.widths {
        let q0 = gaussian_bump(g, 1.0, w, 0.0);
        let r = strichartz_ratio(&q0, &zero_vector(g), cfg.p, cfg.s, cfg.t_end, cfg.steps, &b).map_err(lin)?;
        rows.push(CheckRow::info("strichartz_ratio", format!("width={w} p={} s={}", cfg.p, cfg.s), r));
        ratios.push(r);
    }
    rows.push(CheckRow::bounded("strichartz_spread", "max/min over widths".into(), spread(&ratios), cfg.spread_limit));

    let q0 = gaussian_bump(g, 1.0, cfg.dispersion_width, 0.0);
    let mut decay = Vec::new();
    for &t in &cfg.dispersion_times {
        let (q, _) = acoustic_evolve(&q0, &zero_vector(g), t).map_err(lin)?;
        let v = t * q.max_abs_real();
        rows.push(CheckRow::info("dispersion", format!("t={t}"), v));
        decay.push(v);
    }
    rows.push(CheckRow::bounded("dispersion_spread", "max/min of t*|q(t)|_inf".into(), spread(&decay), cfg.dispersion_limit));

    let hg = grid(cfg.heat_dim, cfg.heat_n, cfg.heat_l)?;
    let hb = bank(hg)?;
    let (t, n) = (cfg.heat_t_end, cfg.heat_steps);
    for &w in &cfg.heat_widths {
        let u0 = gaussian_bump(hg, 1.0, w, 0.0);
        for q in [f64::INFINITY, 1.0] {
            let r = heat_regularity_ratio(&u0, &[], t, n, q, 1.0, 0.5, 2.0, &hb).map_err(lin)?;
            rows.push(CheckRow::bounded("heat_free", format!("width={w} q={q}"), r, cfg.heat_limit));
        }
    }
    let f = gaussian_bump(hg, 1.0, cfg.heat_widths[0], 0.0);
    let fs = vec![f.clone(); n + 1];
    let u0 = f.zeros_like();
    for q in [1.0, 2.0, f64::INFINITY] {
        let r = heat_regularity_ratio(&u0, &fs, t, n, q, 1.0, 0.5, 2.0, &hb).map_err(lin)?;
        rows.push(CheckRow::bounded("heat_forced", format!("q={q}"), r, cfg.heat_limit));
    }
    Ok(rows)
}

/// Random smooth dealiased field with a random spectral peak.
fn draw(g: GridSpec, rank: Rank, rng: &mut ChaCha8Rng) -> SpectralField {
    let kmax = g.n as f64 / 6.0;
    let k_peak = rng.gen_range(1.0..kmax.max(1.5)) * g.fundamental();
    random_smooth(g, rank, 1.0, k_peak, rng.gen())
}

/// Bony and buoyancy-relation residuals, then the product-law ratios.
pub fn besov_suite(cfg: &BesovTestConfig) -> Result<Vec<CheckRow>, CliError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for &(dim, n) in &cfg.identity_grids {
        let g = grid(dim, n, cfg.l)?;
        let b = bank(g)?;
        let (mut bony, mut rel) = (0.0f64, 0.0f64);
        for _ in 0..cfg.samples {
            let f = draw(g, Rank::Scalar, &mut rng);
            let h = draw(g, Rank::Scalar, &mut rng);
            let fg = product(&f, &h);
            let split = paraproduct(&f, &h, &b).add(&remainder(&h, &f, &b));
            bony = bony.max(split.sub(&fg).norm_l2() / fg.norm_l2());
            let s = ConductingState {
                b: draw(g, Rank::Scalar, &mut rng),
                u: draw(g, Rank::Vector, &mut rng),
                theta: draw(g, Rank::Scalar, &mut rng),
                t: 0.0,
            };
            let v = draw(g, Rank::Scalar, &mut rng);
            rel = rel.max(relation_check(&s, &v));
        }
        rows.push(CheckRow::bounded("bony", format!("dim={dim} n={n}"), bony, cfg.residual_limit));
        rows.push(CheckRow::bounded("relation", format!("dim={dim} n={n}"), rel, cfg.residual_limit));
    }

    let g = grid(cfg.product_dim, cfg.product_n, cfg.l)?;
    let b = bank(g)?;
    let pairs: Vec<(SpectralField, SpectralField)> =
        (0..cfg.samples).map(|_| (draw(g, Rank::Scalar, &mut rng), draw(g, Rank::Scalar, &mut rng))).collect();
    for c in &cfg.product_cases {
        for (sign, s) in [(HybridSign::Minus, c.s), (HybridSign::Plus, 3.0 / c.p - 1.0)] {
            for &alpha in &cfg.alphas {
                let worst = pairs
                    .iter()
                    .map(|(f, h)| product_law_ratio(f, h, s, c.beta, c.p, alpha, sign, &b))
                    .fold(0.0f64, f64::max);
                let case = format!("s={s} beta={} p={} sign={} alpha={alpha}", c.beta, c.p, sign_str(sign));
                rows.push(CheckRow::bounded("product_law", case, worst, cfg.ratio_limit));
            }
        }
    }
    Ok(rows)
}

fn sign_str(s: HybridSign) -> &'static str {
    match s {
        HybridSign::Plus => "+",
        HybridSign::Minus => "-",
        HybridSign::Plain => "plain",
    }
}
