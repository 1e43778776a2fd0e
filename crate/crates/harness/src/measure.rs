//! Convergence norms evaluated on recorded block-norm series.

use crate::plan::{strichartz_time_exponent, ExperimentPlan, MeasureKind, Measurement};
use crate::run::{series_key, FamilyRun, LimitTrajectory, Trajectory};
use crate::HarnessError;
use oberbeck_besov::{time_norm_from_series, BesovParams, DyadicFilterBank, HybridSign};
use oberbeck_solvers::Variant;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredValue {
    pub measurement: Measurement,
    pub eps: f64,
    pub value: f64,
}

fn series<'a>(traj: &'a Trajectory, field: &str, p: f64) -> Result<&'a [Vec<f64>], HarnessError> {
    traj.series
        .get(&series_key(field, p))
        .map(|v| v.as_slice())
        .ok_or_else(|| HarnessError::InvalidPlan(format!("no recorded series {}", series_key(field, p))))
}

/// `‖·‖_{L̃^q_T(B)}` of a recorded field.
fn tnorm(
    traj: &Trajectory,
    field: &str,
    q: f64,
    params: BesovParams,
    bank: &DyadicFilterBank,
) -> Result<f64, HarnessError> {
    params.validate()?;
    Ok(time_norm_from_series(series(traj, field, params.p)?, traj.dt(), q, &params, bank)?.value)
}

fn check_covered(traj: &Trajectory, plan: &ExperimentPlan) -> Result<(), HarnessError> {
    let last = traj.times.last().copied().unwrap_or(f64::NAN);
    if traj.times.first() != Some(&0.0) || (last - plan.t_end).abs() > 1e-9 * plan.t_end.max(1.0) {
        return Err(HarnessError::TimeGridMismatch(format!(
            "trajectory at eps = {} covers [{:?}, {last}], plan horizon {}",
            traj.eps,
            traj.times.first(),
            plan.t_end
        )));
    }
    Ok(())
}

/// Oscillating-mode norms with α = εν:
/// ν^{1/2}‖q‖_{L̃²(B̃^{s−1,+}_{p,εν})}, ν^{1/2}‖Qu‖_{L̃²(Ḃ^s_{p,1})},
/// ‖(Qu,R)‖_{L̃^{2p/(p−2)}(Ḃ^{2/p−1/2}_{p,1})} and ν^{1/2}‖(Qu,R)‖_{L̃²(Ḃ^s_{p,1})}.
pub fn measure_osc_decay(
    traj: &Trajectory,
    eps: f64,
    plan: &ExperimentPlan,
    bank: &DyadicFilterBank,
) -> Result<Vec<MeasuredValue>, HarnessError> {
    check_covered(traj, plan)?;
    let nu = plan.nu();
    let alpha = eps * nu;
    let mut out = Vec::new();
    for m in &plan.measurements {
        let (p, s) = (m.p, m.s);
        let value = match m.kind {
            MeasureKind::OscQ => {
                nu.sqrt() * tnorm(traj, "q", 2.0, BesovParams::hybrid(s - 1.0, p, alpha, HybridSign::Plus), bank)?
            }
            MeasureKind::OscQu => nu.sqrt() * tnorm(traj, "Qu", 2.0, BesovParams::plain(s, p), bank)?,
            MeasureKind::Strichartz => tnorm(traj, "QuR", strichartz_time_exponent(p), BesovParams::plain(s, p), bank)?,
            MeasureKind::StrichartzL2 => nu.sqrt() * tnorm(traj, "QuR", 2.0, BesovParams::plain(s, p), bank)?,
            MeasureKind::Incompressible => continue,
        };
        out.push(MeasuredValue { measurement: m.clone(), eps, value });
    }
    Ok(out)
}

/// δ-norms of (Θ^ε − Θ, Pu^ε − v).
///
/// With conduction, α = εν:
/// ν^{1/2}‖δΘ‖_{L̃²(B̃^{s−1,+})} + ‖δΘ‖_{L̃^∞(B̃^{s−2,+})} + ν‖δv‖_{L¹(B̃^{s,+})} + ‖δv‖_{L̃^∞(B̃^{s−2,+})}.
///
/// Without conduction:
/// ‖δΘ‖_{L̃^∞(Ḃ^{s−2}_{p,1})} + ‖δv‖_{L̃^∞(Ḃ^{s−1}_{p,1}+Ḃ^{s−2}_{p,1})} + ‖δv‖_{L¹(Ḃ^s_{p,1})}.
/// The sum space is evaluated blockwise as B̃^{s−2,+}_{p,1}, the weight
/// min(2^{j(s−1)}, 2^{j(s−2)}), and the L̃² + L¹ sum space by its L¹ member.
pub fn measure_incompressible_error(
    traj: &Trajectory,
    limit: &LimitTrajectory,
    eps: f64,
    plan: &ExperimentPlan,
    bank: &DyadicFilterBank,
) -> Result<Vec<MeasuredValue>, HarnessError> {
    check_covered(traj, plan)?;
    if traj.times.len() != limit.times.len()
        || traj.times.iter().zip(&limit.times).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + b.abs()))
    {
        return Err(HarnessError::TimeGridMismatch(format!(
            "eps = {eps}: {} snapshots against {} limit snapshots",
            traj.times.len(),
            limit.times.len()
        )));
    }
    let nu = plan.nu();
    let alpha = eps * nu;
    let plus = |s: f64, p: f64, a: f64| BesovParams::hybrid(s, p, a, HybridSign::Plus);
    let mut out = Vec::new();
    for m in plan.measurements.iter().filter(|m| m.kind == MeasureKind::Incompressible) {
        let (p, s) = (m.p, m.s);
        let value = match plan.variant {
            Variant::Conducting => {
                nu.sqrt() * tnorm(traj, "dTheta", 2.0, plus(s - 1.0, p, alpha), bank)?
                    + tnorm(traj, "dTheta", f64::INFINITY, plus(s - 2.0, p, alpha), bank)?
                    + nu * tnorm(traj, "dv", 1.0, plus(s, p, alpha), bank)?
                    + tnorm(traj, "dv", f64::INFINITY, plus(s - 2.0, p, alpha), bank)?
            }
            Variant::Nonconducting => {
                tnorm(traj, "dTheta", f64::INFINITY, BesovParams::plain(s - 2.0, p), bank)?
                    + tnorm(traj, "dv", f64::INFINITY, plus(s - 2.0, p, 1.0), bank)?
                    + tnorm(traj, "dv", 1.0, BesovParams::plain(s, p), bank)?
            }
        };
        out.push(MeasuredValue { measurement: m.clone(), eps, value });
    }
    Ok(out)
}

/// All measurements of a family run, ordered by measurement then ε.
pub fn measure_family(run: &FamilyRun) -> Result<Vec<MeasuredValue>, HarnessError> {
    let bank = DyadicFilterBank::for_grid(run.grid)?;
    let mut all = Vec::new();
    for traj in &run.runs {
        all.extend(measure_osc_decay(traj, traj.eps, &run.plan, &bank)?);
        all.extend(measure_incompressible_error(traj, &run.limit, traj.eps, &run.plan, &bank)?);
    }
    let order = |v: &MeasuredValue| run.plan.measurements.iter().position(|m| *m == v.measurement).unwrap_or(0);
    all.sort_by(|a, b| order(a).cmp(&order(b)).then(b.eps.total_cmp(&a.eps)));
    Ok(all)
}
