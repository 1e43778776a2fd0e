//! Lockstep execution of the ε-runs and the limit run, with streaming
//! block-norm recording.

use crate::plan::{fmt_exp, ExperimentPlan};
use crate::HarnessError;
use oberbeck_besov::{block_lp_norms_multi, block_lp_norms_tuple, DyadicFilterBank};
use oberbeck_solvers::{
    autoscaled, mode_split, mode_split_nonconducting, BoussinesqSolver, BoussinesqState,
    BoussinesqVariant, CompressibleSolver, ConductingState, InitialDataSpec, ModeSplit, NonConductingState,
    PhysParams, PotentialSpec, Triple, Variant,
};
use oberbeck_solvers::initial::building_blocks;
use oberbeck_spectral::{GridSpec, SpectralField};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

/// Per-snapshot block norms of one ε-run. `series[key][snapshot][block]`
/// with keys `"{field}@{p}"`; fields are `q` (R without conduction), `Qu`,
/// `QuR` (the pair (Qu, R), κ = 0 only), `dTheta` and `dv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub eps: f64,
    pub times: Vec<f64>,
    pub series: BTreeMap<String, Vec<Vec<f64>>>,
    /// Mode splits at every snapshot when the plan keeps states.
    pub states: Option<Vec<ModeSplit>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitTrajectory {
    pub times: Vec<f64>,
    pub series: BTreeMap<String, Vec<Vec<f64>>>,
    pub states: Option<Vec<BoussinesqState>>,
}

#[derive(Clone, Debug)]
pub struct FamilyRun {
    pub plan: ExperimentPlan,
    pub grid: GridSpec,
    /// Potential actually used (autoscaled once for the whole ladder).
    pub potential: PotentialSpec,
    pub runs: Vec<Trajectory>,
    pub limit: LimitTrajectory,
}

pub fn series_key(field: &str, p: f64) -> String {
    format!("{field}@{}", fmt_exp(p))
}

/// Computes and appends the block norms of one snapshot.
#[derive(Clone, Debug)]
pub struct Recorder {
    pub ps: Vec<f64>,
    pub variant: Variant,
    pub bank: DyadicFilterBank,
}

impl Recorder {
    pub fn new(ps: Vec<f64>, variant: Variant, bank: DyadicFilterBank) -> Self {
        Recorder { ps, variant, bank }
    }

    fn push(&self, series: &mut BTreeMap<String, Vec<Vec<f64>>>, field: &str, blocks: Vec<Vec<f64>>) {
        for (p, b) in self.ps.iter().zip(blocks) {
            series.entry(series_key(field, *p)).or_default().push(b);
        }
    }

    /// Oscillating and δ-block norms of an ε-snapshot against the limit
    /// snapshot at the same time.
    pub fn record(&self, series: &mut BTreeMap<String, Vec<Vec<f64>>>, m: &ModeSplit, limit: &BoussinesqState) {
        let (ps, bank) = (&self.ps, &self.bank);
        self.push(series, "q", block_lp_norms_multi(&m.q, ps, bank));
        self.push(series, "Qu", block_lp_norms_multi(&m.qu, ps, bank));
        if self.variant == Variant::Nonconducting {
            self.push(series, "QuR", block_lp_norms_tuple(&[&m.qu, &m.q], ps, bank));
        }
        self.push(series, "dTheta", block_lp_norms_multi(&m.theta.sub(&limit.theta), ps, bank));
        self.push(series, "dv", block_lp_norms_multi(&m.pu.sub(&limit.v), ps, bank));
    }

    pub fn record_limit(&self, series: &mut BTreeMap<String, Vec<Vec<f64>>>, s: &BoussinesqState) {
        let (ps, bank) = (&self.ps, &self.bank);
        self.push(series, "Theta", block_lp_norms_multi(&s.theta, ps, bank));
        self.push(series, "v", block_lp_norms_multi(&s.v, ps, bank));
    }
}

impl Trajectory {
    /// Rebuilds the recorded series from stored snapshots.
    pub fn from_states(
        eps: f64,
        times: Vec<f64>,
        states: &[ModeSplit],
        limit: &[BoussinesqState],
        recorder: &Recorder,
    ) -> Result<Self, HarnessError> {
        if states.len() != limit.len() || states.len() != times.len() {
            return Err(HarnessError::TimeGridMismatch(format!(
                "{} snapshots, {} limit snapshots, {} times",
                states.len(),
                limit.len(),
                times.len()
            )));
        }
        let mut series = BTreeMap::new();
        for (m, l) in states.iter().zip(limit) {
            recorder.record(&mut series, m, l);
        }
        Ok(Trajectory { eps, times, series, states: Some(states.to_vec()) })
    }

    /// Uniform snapshot spacing.
    pub fn dt(&self) -> f64 {
        uniform_dt(&self.times)
    }
}

pub(crate) fn uniform_dt(times: &[f64]) -> f64 {
    if times.len() < 2 {
        0.0
    } else {
        (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64
    }
}

/// Distinct exponents over the plan's measurements.
fn plan_ps(plan: &ExperimentPlan) -> Vec<f64> {
    let mut ps: Vec<f64> = Vec::new();
    for m in &plan.measurements {
        if !ps.contains(&m.p) {
            ps.push(m.p);
        }
    }
    ps
}

/// Seed of the oscillating part: shared unless the plan is ill-prepared.
fn osc_seed(plan: &ExperimentPlan, eps: f64) -> u64 {
    if plan.ill_prepared {
        plan.initial.seed.wrapping_add(1000 * (-eps.log2()).round() as u64 + 1)
    } else {
        plan.initial.seed
    }
}

/// The four building blocks (Θ₀, Pu₀, q₀, Qu₀) for one ladder entry.
fn blocks(plan: &ExperimentPlan, grid: GridSpec, eps: f64) -> [SpectralField; 4] {
    let [th, pu, q, qu] = building_blocks(&plan.initial, grid);
    if osc_seed(plan, eps) == plan.initial.seed {
        return [th, pu, q, qu];
    }
    let other = InitialDataSpec { seed: osc_seed(plan, eps), ..plan.initial.clone() };
    let [_, _, q2, qu2] = building_blocks(&other, grid);
    [th, pu, q2, qu2]
}

struct EpsRun {
    eps: f64,
    solver: CompressibleSolver,
    x: Triple,
    t: f64,
    traj: Trajectory,
}

impl EpsRun {
    fn split(&self) -> ModeSplit {
        match self.solver.variant {
            Variant::Conducting => mode_split(&ConductingState::from_triple(self.x.clone(), self.t)),
            Variant::Nonconducting => mode_split_nonconducting(
                &NonConductingState::from_triple(self.x.clone(), self.t),
                &self.solver.pot.at(self.t),
            ),
        }
    }
}

/// Autoscales the potential so the small-data quantity stays at η ν for
/// every ε of the ladder (largest quantity wins).
fn ladder_potential(plan: &ExperimentPlan, grid: GridSpec, bank: &DyadicFilterBank) -> Result<PotentialSpec, HarnessError> {
    if !plan.potential.autoscale {
        return Ok(plan.potential.clone());
    }
    let mut best: Option<PotentialSpec> = None;
    for &eps in &plan.eps_ladder {
        let s = autoscaled(&plan.potential, grid, eps, plan.nu(), plan.t_end, plan.steps().max(1), bank)
            .map_err(HarnessError::solver(eps))?;
        if best.as_ref().map_or(true, |b| s.amplitude.abs() < b.amplitude.abs()) {
            best = Some(s);
        }
    }
    Ok(best.unwrap_or_else(|| plan.potential.clone()))
}

/// Runs every ε of the ladder and the Boussinesq limit with the same time
/// step, recording block norms at every `snapshot_stride` steps.
pub fn run_epsilon_family(plan: &ExperimentPlan) -> Result<FamilyRun, HarnessError> {
    plan.validate()?;
    let grid = GridSpec::new(plan.dim, plan.n, plan.l).map_err(|e| HarnessError::InvalidPlan(e.to_string()))?;
    let bank = DyadicFilterBank::for_grid(grid)?;
    let potential = ladder_potential(plan, grid, &bank)?;
    let recorder = Recorder::new(plan_ps(plan), plan.variant, bank);

    let limit_variant = match plan.variant {
        Variant::Conducting => BoussinesqVariant::Conducting,
        Variant::Nonconducting => BoussinesqVariant::Transport,
    };
    let limit_solver = BoussinesqSolver::new(grid, plan.mu, plan.kappa, limit_variant, &potential, plan.dt)
        .map_err(HarnessError::solver(0.0))?;
    let [th0, pu0, _, _] = building_blocks(&plan.initial, grid);
    let mut limit_state = limit_solver.prepare(&BoussinesqState { theta: th0, v: pu0, t: 0.0 });

    let mut runs = Vec::with_capacity(plan.eps_ladder.len());
    for &eps in &plan.eps_ladder {
        let params = PhysParams::new(eps, plan.mu, plan.lambda, plan.kappa).map_err(HarnessError::solver(eps))?;
        let solver = CompressibleSolver::new(grid, params, plan.variant, &potential, plan.dt)
            .map_err(HarnessError::solver(eps))?
            .with_linear_only(plan.linear_only);
        let [th, pu, q, qu] = blocks(plan, grid, eps);
        let x = match plan.variant {
            Variant::Conducting => Triple {
                s1: q.lincomb(FRAC_1_SQRT_2, &th, -FRAC_1_SQRT_2),
                u: qu.add(&pu),
                s2: q.lincomb(FRAC_1_SQRT_2, &th, FRAC_1_SQRT_2),
            },
            Variant::Nonconducting => Triple { s1: th.add(&q).add(&solver.pot.at(0.0)), u: qu.add(&pu), s2: q },
        };
        let x = solver.prepare(&x);
        let traj = Trajectory {
            eps,
            times: Vec::new(),
            series: BTreeMap::new(),
            states: plan.keep_states.then(Vec::new),
        };
        runs.push(EpsRun { eps, solver, x, t: 0.0, traj });
    }
    let mut limit = LimitTrajectory {
        times: Vec::new(),
        series: BTreeMap::new(),
        states: plan.keep_states.then(Vec::new),
    };

    let steps = plan.steps();
    for k in 0..=steps {
        let t = k as f64 * plan.dt;
        if k % plan.snapshot_stride == 0 {
            limit.times.push(t);
            recorder.record_limit(&mut limit.series, &limit_state);
            if let Some(st) = limit.states.as_mut() {
                st.push(limit_state.clone());
            }
            runs.par_iter_mut().for_each(|r| {
                let m = r.split();
                r.traj.times.push(t);
                recorder.record(&mut r.traj.series, &m, &limit_state);
                if let Some(st) = r.traj.states.as_mut() {
                    st.push(m);
                }
            });
        }
        if k == steps {
            break;
        }
        let (lres, rres) = rayon::join(
            || limit_solver.step(&limit_state),
            || {
                runs.par_iter_mut()
                    .map(|r| {
                        r.x = r.solver.step_triple(&r.x, r.t).map_err(HarnessError::solver(r.eps))?;
                        r.t = (k + 1) as f64 * plan.dt;
                        Ok(())
                    })
                    .collect::<Result<Vec<()>, HarnessError>>()
            },
        );
        rres?;
        limit_state = lres.map_err(HarnessError::solver(0.0))?;
        limit_state.t = (k + 1) as f64 * plan.dt;
    }

    Ok(FamilyRun {
        plan: plan.clone(),
        grid,
        potential,
        runs: runs.into_iter().map(|r| r.traj).collect(),
        limit,
    })
}
