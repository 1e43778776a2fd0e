//! Experiment plans: the ε-ladder, shared data and the list of measured norms.

use crate::HarnessError;
use oberbeck_besov::exponent_serde;
use oberbeck_solvers::{InitKind, InitialDataSpec, PotentialSpec, Variant};
use serde::{Deserialize, Serialize};

/// Which convergence norm a measurement evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// ν^{1/2}‖q‖_{L̃²(B̃^{s−1,+}_{p,εν})}
    OscQ,
    /// ν^{1/2}‖Qu‖_{L̃²(Ḃ^s_{p,1})}
    OscQu,
    /// ‖(Qu, R)‖_{L̃^{2p/(p−2)}(Ḃ^{2/p−1/2}_{p,1})}, no conduction
    Strichartz,
    /// ν^{1/2}‖(Qu, R)‖_{L̃²(Ḃ^s_{p,1})}, no conduction
    StrichartzL2,
    /// Distance of (Θ^ε, Pu^ε) to the limit solution.
    Incompressible,
}

impl MeasureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureKind::OscQ => "osc_q",
            MeasureKind::OscQu => "osc_Qu",
            MeasureKind::Strichartz => "strichartz",
            MeasureKind::StrichartzL2 => "strichartz_l2",
            MeasureKind::Incompressible => "incompressible",
        }
    }

    fn variant(&self) -> Option<Variant> {
        match self {
            MeasureKind::OscQ | MeasureKind::OscQu => Some(Variant::Conducting),
            MeasureKind::Strichartz | MeasureKind::StrichartzL2 => Some(Variant::Nonconducting),
            MeasureKind::Incompressible => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measurement {
    pub kind: MeasureKind,
    #[serde(with = "exponent_serde")]
    pub p: f64,
    /// Regularity index; fixed to 2/p − 1/2 for the Strichartz norm, where
    /// it may be omitted.
    #[serde(default = "unset")]
    pub s: f64,
    /// Whether the fitted slope gates acceptance.
    #[serde(default = "yes")]
    pub accept: bool,
    /// Optional declared slope; must agree with the theorem's exponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_slope: Option<f64>,
}

fn yes() -> bool {
    true
}

fn unset() -> f64 {
    f64::NAN
}

impl Measurement {
    pub fn new(kind: MeasureKind, p: f64, s: f64) -> Self {
        let s = if kind == MeasureKind::Strichartz { 2.0 / p - 0.5 } else { s };
        Measurement { kind, p, s, accept: true, expected_slope: None }
    }

    /// 3/p − s for the hybrid and incompressible norms, 1/2 − 1/p for the
    /// Strichartz norm.
    pub fn theory_slope(&self) -> f64 {
        match self.kind {
            MeasureKind::Strichartz => 0.5 - 1.0 / self.p,
            _ => 3.0 / self.p - self.s,
        }
    }

    /// Stable identifier naming the space, regularity, integrability,
    /// threshold and time exponent.
    pub fn norm_id(&self) -> String {
        let p = fmt_exp(self.p);
        let s = self.s;
        match self.kind {
            MeasureKind::OscQ => format!("osc_q:nu^1/2 L~^2_T(B~^{{{},+}}_{{{p},eps*nu}})", s - 1.0),
            MeasureKind::OscQu => format!("osc_Qu:nu^1/2 L~^2_T(B^{{{s}}}_{{{p},1}})"),
            MeasureKind::Strichartz => {
                format!("strichartz:L~^{}_T(B^{{{s}}}_{{{p},1}})", fmt_exp(strichartz_time_exponent(self.p)))
            }
            MeasureKind::StrichartzL2 => format!("strichartz_l2:nu^1/2 L~^2_T(B^{{{s}}}_{{{p},1}})"),
            MeasureKind::Incompressible => format!("incompressible:s={s},p={p},alpha=eps*nu"),
        }
    }

    fn validate(&self, variant: Variant) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidPlan(m));
        let (p, s) = (self.p, self.s);
        if s.is_nan() {
            return bad(format!("{}: missing s", self.kind.as_str()));
        }
        if let Some(v) = self.kind.variant() {
            if v != variant {
                return bad(format!("{} needs the {} system", self.kind.as_str(), v.as_str()));
            }
        }
        if !(p >= 2.0) {
            return bad(format!("{}: p = {p} outside [2, inf]", self.kind.as_str()));
        }
        match self.kind {
            MeasureKind::Strichartz => {
                if p.is_infinite() {
                    return bad("strichartz: p must be finite".into());
                }
                if (s - (2.0 / p - 0.5)).abs() > 1e-12 {
                    return bad(format!("strichartz: s must be 2/p - 1/2 = {}, got {s}", 2.0 / p - 0.5));
                }
            }
            _ => {
                let (lo, hi) = (-0.5 + 4.0 / p, 3.0 / p);
                if s < lo - 1e-12 || s > hi + 1e-12 {
                    return bad(format!("{}: s = {s} outside [{lo}, {hi}] for p = {p}", self.kind.as_str()));
                }
                if self.kind == MeasureKind::Incompressible && s <= 0.5 {
                    return bad(format!("incompressible: s = {s} must exceed 1/2"));
                }
            }
        }
        if let Some(e) = self.expected_slope {
            if (e - self.theory_slope()).abs() > 1e-12 {
                return bad(format!(
                    "{}: declared slope {e} differs from {}",
                    self.norm_id(),
                    self.theory_slope()
                ));
            }
        }
        Ok(())
    }
}

/// 2p/(p−2), infinite at p = 2.
pub fn strichartz_time_exponent(p: f64) -> f64 {
    if p == 2.0 {
        f64::INFINITY
    } else {
        2.0 * p / (p - 2.0)
    }
}

pub(crate) fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentPlan {
    pub variant: Variant,
    pub eps_ladder: Vec<f64>,
    pub dim: usize,
    pub n: usize,
    pub l: f64,
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub potential: PotentialSpec,
    /// Shared data: (Θ₀, Pu₀) and the oscillating part, identical for every ε.
    pub initial: InitialDataSpec,
    /// Draw the oscillating part with an ε-dependent seed.
    pub ill_prepared: bool,
    /// Drop every nonlinear and potential term in the ε-runs.
    pub linear_only: bool,
    pub measurements: Vec<Measurement>,
    pub t_end: f64,
    pub dt: f64,
    pub snapshot_stride: usize,
    /// Accepted distance between fitted and expected slope.
    pub slope_tolerance: f64,
    /// Incompressible measurements pass when monotone with slope at least
    /// expected − soft_tolerance.
    pub soft_tolerance: f64,
    /// Keep full states in memory (small grids only).
    pub keep_states: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            variant: Variant::Conducting,
            eps_ladder: vec![0.25, 0.125, 0.0625, 0.03125],
            dim: 3,
            n: 48,
            l: 2.0 * std::f64::consts::PI,
            mu: 1.0,
            lambda: 0.0,
            kappa: 1.0,
            potential: PotentialSpec { autoscale: true, ..PotentialSpec::gaussian(1.0, 0.4) },
            initial: InitialDataSpec { kind: InitKind::Random, amplitude: 0.1, k_peak: 2.0, ..Default::default() },
            ill_prepared: false,
            linear_only: false,
            measurements: vec![
                Measurement::new(MeasureKind::OscQ, 4.0, 0.5),
                Measurement::new(MeasureKind::OscQ, 8.0, 0.0),
                Measurement::new(MeasureKind::OscQu, 4.0, 0.5),
                Measurement::new(MeasureKind::Incompressible, 4.0, 0.6),
            ],
            t_end: 2.0,
            dt: 0.01,
            snapshot_stride: 1,
            slope_tolerance: 0.25,
            soft_tolerance: 0.3,
            keep_states: false,
        }
    }
}

impl ExperimentPlan {
    /// Small 2D plan for smoke runs.
    pub fn pilot_2d() -> Self {
        ExperimentPlan {
            eps_ladder: vec![0.25, 0.125, 0.0625],
            dim: 2,
            n: 48,
            t_end: 0.5,
            dt: 0.01,
            ..Default::default()
        }
    }

    /// Parses a TOML plan, fills the Strichartz regularity and validates.
    pub fn from_toml_str(src: &str) -> Result<Self, HarnessError> {
        let mut plan: ExperimentPlan = toml::from_str(src).map_err(|e| HarnessError::InvalidPlan(e.to_string()))?;
        for m in plan.measurements.iter_mut() {
            if m.kind == MeasureKind::Strichartz && m.s.is_nan() {
                m.s = 2.0 / m.p - 0.5;
            }
        }
        plan.validate()?;
        Ok(plan)
    }

    pub fn documented_defaults() -> String {
        toml::to_string(&ExperimentPlan::default()).unwrap_or_default()
    }

    pub fn nu(&self) -> f64 {
        self.lambda + 2.0 * self.mu
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Time between two recorded snapshots.
    pub fn snapshot_dt(&self) -> f64 {
        self.dt * self.snapshot_stride as f64
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidPlan(m));
        if self.eps_ladder.is_empty() {
            return bad("empty eps ladder".into());
        }
        for &e in &self.eps_ladder {
            if !(e > 0.0) || (e.log2() - e.log2().round()).abs() > 1e-12 {
                return bad(format!("ladder entry {e} is not a power of two"));
            }
        }
        for w in self.eps_ladder.windows(2) {
            if !(w[1] < w[0]) {
                return bad("ladder must be strictly decreasing".into());
            }
        }
        if !(self.mu > 0.0) || !(self.nu() > 0.0) || !(self.kappa >= 0.0) {
            return bad(format!("mu {}, lambda {}, kappa {}", self.mu, self.lambda, self.kappa));
        }
        if (self.variant == Variant::Conducting) != (self.kappa > 0.0) {
            return bad(format!("the {} system needs {}", self.variant.as_str(), match self.variant {
                Variant::Conducting => "kappa > 0",
                Variant::Nonconducting => "kappa = 0",
            }));
        }
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || self.snapshot_stride == 0 {
            return bad(format!("dt {}, t_end {}, stride {}", self.dt, self.t_end, self.snapshot_stride));
        }
        if self.steps() % self.snapshot_stride != 0 {
            return bad("snapshot stride must divide the number of steps".into());
        }
        for m in &self.measurements {
            m.validate(self.variant)?;
        }
        Ok(())
    }

    /// Measurements whose fits gate acceptance: finite p only.
    pub fn accepted(&self) -> impl Iterator<Item = &Measurement> {
        self.measurements.iter().filter(|m| m.accept && m.p.is_finite())
    }
}
