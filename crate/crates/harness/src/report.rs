//! Convergence reports: per-ε values, fitted slopes, CSV/JSON/SVG output.
//!
//! CSV columns, one row per (measurement, ε):
//! `variant, eps, p, s, norm_id, value, expected_slope`, with `p = inf`
//! written as the string `inf`.

use crate::fit::{fit_rate_adaptive, RateFit};
use crate::measure::MeasuredValue;
use crate::plan::{ExperimentPlan, MeasureKind, Measurement};
use crate::HarnessError;
use oberbeck_besov::exponent_serde;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown format {s}, expected csv or json")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub variant: String,
    pub eps: f64,
    #[serde(with = "exponent_serde")]
    pub p: f64,
    pub s: f64,
    pub norm_id: String,
    pub value: f64,
    pub expected_slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub norm_id: String,
    pub kind: MeasureKind,
    #[serde(with = "exponent_serde")]
    pub p: f64,
    pub s: f64,
    pub expected_slope: f64,
    pub fit: Option<RateFit>,
    /// Why no fit was produced.
    pub fit_error: Option<String>,
    /// Values strictly decrease as ε decreases.
    pub monotone: bool,
    pub accept: bool,
    /// `None` for measurements that are reported only.
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub variant: String,
    pub slope_tolerance: f64,
    pub soft_tolerance: f64,
    pub records: Vec<ReportRecord>,
    pub fits: Vec<FitRecord>,
}

impl ConvergenceReport {
    pub fn empty(variant: &str) -> Self {
        ConvergenceReport {
            schema_version: SCHEMA_VERSION,
            variant: variant.into(),
            slope_tolerance: 0.0,
            soft_tolerance: 0.0,
            records: Vec::new(),
            fits: Vec::new(),
        }
    }

    /// Every acceptance-gated fit passed.
    pub fn passed(&self) -> bool {
        self.fits.iter().all(|f| f.pass != Some(false))
    }

    /// Acceptance-gated measurements without a usable fit.
    pub fn degenerate(&self) -> Vec<&FitRecord> {
        self.fits.iter().filter(|f| f.accept && f.fit.is_none()).collect()
    }

    pub fn fit_for(&self, kind: MeasureKind, p: f64, s: f64) -> Option<&FitRecord> {
        self.fits.iter().find(|f| f.kind == kind && f.p == p && (f.s - s).abs() < 1e-12)
    }
}

/// Groups measured values by measurement, fits each and applies the
/// acceptance rule.
pub fn build_report(plan: &ExperimentPlan, values: &[MeasuredValue]) -> ConvergenceReport {
    let variant = plan.variant.as_str().to_string();
    let mut report = ConvergenceReport {
        slope_tolerance: plan.slope_tolerance,
        soft_tolerance: plan.soft_tolerance,
        ..ConvergenceReport::empty(&variant)
    };
    for m in &plan.measurements {
        let mut pts: Vec<(f64, f64)> =
            values.iter().filter(|v| v.measurement == *m).map(|v| (v.eps, v.value)).collect();
        pts.sort_by(|a, b| b.0.total_cmp(&a.0));
        for &(eps, value) in &pts {
            report.records.push(ReportRecord {
                variant: variant.clone(),
                eps,
                p: m.p,
                s: m.s,
                norm_id: m.norm_id(),
                value,
                expected_slope: m.theory_slope(),
            });
        }
        report.fits.push(fit_record(plan, m, &pts));
    }
    report
}

fn fit_record(plan: &ExperimentPlan, m: &Measurement, pts: &[(f64, f64)]) -> FitRecord {
    let eps: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let vals: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (fit, fit_error) = match fit_rate_adaptive(&eps, &vals) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let monotone = !vals.is_empty() && vals.windows(2).all(|w| w[1] < w[0]);
    let gated = m.accept && m.p.is_finite();
    let expected = m.theory_slope();
    let pass = gated.then(|| match (&fit, m.kind) {
        (None, _) => false,
        (Some(f), MeasureKind::Incompressible) => monotone && f.slope >= expected - plan.soft_tolerance,
        (Some(f), _) => (f.slope - expected).abs() <= plan.slope_tolerance,
    });
    FitRecord {
        norm_id: m.norm_id(),
        kind: m.kind,
        p: m.p,
        s: m.s,
        expected_slope: expected,
        fit,
        fit_error,
        monotone,
        accept: gated,
        pass,
    }
}

/// Writes the report; CSV carries the per-ε records only.
pub fn emit_report(report: &ConvergenceReport, fmt: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    match fmt {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            if report.records.is_empty() {
                w.write_record(["variant", "eps", "p", "s", "norm_id", "value", "expected_slope"])?;
            }
            for r in &report.records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            std::fs::write(path, s)?;
        }
    }
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<ReportRecord>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<ReportRecord>, _>>()?)
}

pub fn read_json(path: &Path) -> Result<ConvergenceReport, HarnessError> {
    let s = std::fs::read_to_string(path)?;
    let r: ConvergenceReport = serde_json::from_str(&s)?;
    if r.schema_version != SCHEMA_VERSION {
        return Err(HarnessError::InvalidPlan(format!("report schema {} != {SCHEMA_VERSION}", r.schema_version)));
    }
    Ok(r)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Log-log plot of every norm against ε with its fitted line.
pub fn emit_svg(report: &ConvergenceReport, path: &Path) -> Result<(), HarnessError> {
    let (w, h, pad) = (720.0, 480.0, 60.0);
    let pts: Vec<(f64, f64)> = report
        .records
        .iter()
        .filter(|r| r.value > 0.0)
        .map(|r| (r.eps.log10(), r.value.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{}" font-family="sans-serif" font-size="11">"#,
        h + 20.0 * report.fits.len() as f64
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if pts.is_empty() {
        let _ = writeln!(svg, r#"<text x="{pad}" y="{pad}">no data</text></svg>"#);
        std::fs::write(path, svg)?;
        return Ok(());
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| pts.iter().map(sel).fold(init, f);
    let (x0, x1) = (fold(f64::min, f64::MAX, |p| p.0).floor(), fold(f64::max, f64::MIN, |p| p.0).ceil());
    let (y0, y1) = (fold(f64::min, f64::MAX, |p| p.1).floor(), fold(f64::max, f64::MIN, |p| p.1).ceil());
    let (x1, y1) = (if x1 > x0 { x1 } else { x0 + 1.0 }, if y1 > y0 { y1 } else { y0 + 1.0 });
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let _ = writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for d in (x0 as i32)..=(x1 as i32) {
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#, sx(d as f64), h - pad + 16.0);
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#, pad - 6.0, sy(d as f64) + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">eps</text>"#, w / 2.0, h - 12.0);
    for (i, f) in report.fits.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mine: Vec<&ReportRecord> = report.records.iter().filter(|r| r.norm_id == f.norm_id && r.value > 0.0).collect();
        for r in &mine {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                sx(r.eps.log10()),
                sy(r.value.log10())
            );
        }
        if let Some(fit) = &f.fit {
            let (e0, e1) = mine.iter().fold((f64::MAX, f64::MIN), |(a, b), r| (a.min(r.eps), b.max(r.eps)));
            let line = |e: f64| (fit.intercept + fit.slope * e.ln()).exp().log10();
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
                sx(e0.log10()),
                sy(line(e0)),
                sx(e1.log10()),
                sy(line(e1))
            );
        }
        let slope = f.fit.as_ref().map_or("none".to_string(), |ft| format!("{:.3} ± {:.3}", ft.slope, ft.stderr));
        let _ = writeln!(
            svg,
            r#"<text x="{pad}" y="{:.1}" fill="{color}">{}: slope {slope}, expected {:.3}</text>"#,
            h + 14.0 + 20.0 * i as f64,
            xml_escape(&f.norm_id),
            f.expected_slope
        );
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
