//! Command-line entry points. Each command reads an optional TOML config,
//! writes its tables under `--out` and maps its outcome to an exit code:
//! 0 pass, 1 config error, 2 verification failure, 3 runtime error.

pub mod checks;
pub mod config;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use config::{load, BesovTestConfig, LinearVerifyConfig, ReportConfig, StrichartzConfig};
use oberbeck_harness::{
    build_report, emit_report, emit_svg, measure_family, read_json, run_epsilon_family, ConvergenceReport,
    ExperimentPlan, HarnessError, ReportFormat,
};
use oberbeck_solvers::{RunConfig, SolverError};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::InvalidPlan(_) | HarnessError::DegenerateFit(_) => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Runtime(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "oberbeck", version, about = "Low Mach number Oberbeck-Boussinesq verification suite")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config; defaults are used for missing keys and unknown keys are rejected
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the random seed of the config
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (changes wall time only)
    #[arg(long, global = true, env = "OBERBECK_THREADS")]
    pub threads: Option<usize>,
    /// Table format
    #[arg(long, global = true, default_value = "csv")]
    pub format: ReportFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Empirical decay constants of the linearized per-frequency flows
    LinearVerify,
    /// Acoustic Strichartz ratios, dispersive decay and heat maximal regularity
    Strichartz,
    /// Bony and buoyancy-relation identities and product-law constants
    BesovTest,
    /// One configured simulation with snapshot output
    Simulate,
    /// ε-ladder convergence study with fitted rates
    Converge,
    /// Re-renders a converge JSON report and re-applies its acceptance rule
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::LinearVerify => "linear-verify",
            Command::Strichartz => "strichartz",
            Command::BesovTest => "besov-test",
            Command::Simulate => "simulate",
            Command::Converge => "converge",
            Command::Report => "report",
        }
    }

    fn defaults(self) -> String {
        match self {
            Command::LinearVerify => format!(
                "{}# r_grid = [...]  explicit frequencies, replaces r_min/r_max/r_points\n\
                 # t_grid = [...]  explicit times, replaces t_max/t_points\n",
                config::defaults_toml::<LinearVerifyConfig>()
            ),
            Command::Strichartz => config::defaults_toml::<StrichartzConfig>(),
            Command::BesovTest => config::defaults_toml::<BesovTestConfig>(),
            Command::Simulate => RunConfig::documented_defaults(),
            Command::Converge => ExperimentPlan::documented_defaults(),
            Command::Report => config::defaults_toml::<ReportConfig>(),
        }
    }
}

const ALL: [Command; 6] =
    [Command::LinearVerify, Command::Strichartz, Command::BesovTest, Command::Simulate, Command::Converge, Command::Report];

/// The clap command with every subcommand's config keys and defaults in its help.
pub fn command() -> clap::Command {
    let mut cmd = Cli::command()
        .after_help("Exit codes: 0 pass, 1 config error, 2 verification failure, 3 runtime error.");
    for c in ALL {
        let text = format!("Config keys and defaults:\n\n{}", c.defaults());
        cmd = cmd.mut_subcommand(c.name(), |s| s.after_help(text));
    }
    cmd
}

pub fn parse_from<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let m = command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&m)
}

fn configure_threads(n: Option<usize>) -> Result<(), CliError> {
    match n {
        Some(0) => Err(CliError::Config("threads must be positive".into())),
        // the pool can only be set once per process; later calls keep it
        Some(n) => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(())
        }
        None => Ok(()),
    }
}

/// Writes rows as `<stem>.csv` or `<stem>.json`.
pub fn write_table<T: Serialize>(rows: &[T], dir: &Path, stem: &str, fmt: ReportFormat) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(format!("{stem}.{}", match fmt {
        ReportFormat::Csv => "csv",
        ReportFormat::Json => "json",
    }));
    let rt = |e: &dyn std::fmt::Display| CliError::Runtime(format!("{}: {e}", path.display()));
    match fmt {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_path(&path).map_err(|e| rt(&e))?;
            for r in rows {
                w.serialize(r).map_err(|e| rt(&e))?;
            }
            w.flush().map_err(|e| rt(&e))?;
        }
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| rt(&e))?;
            s.push('\n');
            std::fs::write(&path, s).map_err(|e| rt(&e))?;
        }
    }
    Ok(path)
}

/// Runs a parsed command line; `Ok` carries the summary printed on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    configure_threads(cli.threads)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::LinearVerify => cmd_linear_verify(&load(cfg)?, &out, cli.format),
        Command::Strichartz => cmd_strichartz(&load(cfg)?, &out, cli.format),
        Command::BesovTest => {
            let mut c: BesovTestConfig = load(cfg)?;
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            cmd_besov_test(&c, &out, cli.format)
        }
        Command::Simulate => {
            let mut c = match cfg {
                Some(p) => RunConfig::from_path(p).map_err(|e| CliError::Config(e.to_string()))?,
                None => RunConfig::default(),
            };
            if let Some(s) = cli.seed {
                c.initial_data.seed = s;
            }
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(&c.output.dir));
            cmd_simulate(&c, &dir)
        }
        Command::Converge => {
            let mut plan = match cfg {
                Some(p) => {
                    let src = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                    ExperimentPlan::from_toml_str(&src)?
                }
                None => ExperimentPlan::default(),
            };
            if let Some(s) = cli.seed {
                plan.initial.seed = s;
            }
            let report = run_converge(&plan, &out, cli.format)?;
            converge_verdict(&report)?;
            Ok(fit_summary(&report))
        }
        Command::Report => {
            let c: ReportConfig = load(cfg)?;
            let input = if c.input.is_empty() { out.join("converge.json") } else { PathBuf::from(c.input) };
            let report = read_json(&input).map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
            write_report(&report, &out, "report", cli.format)?;
            converge_verdict(&report)?;
            Ok(fit_summary(&report))
        }
    }
}

pub fn cmd_linear_verify(cfg: &LinearVerifyConfig, out: &Path, fmt: ReportFormat) -> Result<String, CliError> {
    let res = checks::linear_verify(cfg)?;
    let path = write_table(&res.rows, out, "linear_verify", fmt)?;
    let k = &res.constants;
    let line = format!(
        "{} kappa_t = {}: C = {:.4}, c = {:.3}, {} rows -> {}",
        cfg.variant.as_str(),
        cfg.kappa_t,
        k.big_c,
        k.c,
        res.rows.len(),
        path.display()
    );
    if !k.within_target {
        return Err(CliError::Verification(format!("{line}; C exceeds the target {}", cfg.c_target)));
    }
    Ok(line)
}

fn check_outcome(rows: &[checks::CheckRow], path: &Path) -> Result<String, CliError> {
    let failed: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| format!("{} [{}] = {:.4e}", r.check, r.case, r.value)).collect();
    if failed.is_empty() {
        Ok(format!("{} checks passed -> {}", rows.len(), path.display()))
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}

pub fn cmd_strichartz(cfg: &StrichartzConfig, out: &Path, fmt: ReportFormat) -> Result<String, CliError> {
    let rows = checks::strichartz_suite(cfg)?;
    let path = write_table(&rows, out, "strichartz", fmt)?;
    check_outcome(&rows, &path)
}

pub fn cmd_besov_test(cfg: &BesovTestConfig, out: &Path, fmt: ReportFormat) -> Result<String, CliError> {
    let rows = checks::besov_suite(cfg)?;
    let path = write_table(&rows, out, "besov_test", fmt)?;
    check_outcome(&rows, &path)
}

pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<String, CliError> {
    let summary = oberbeck_solvers::simulate(cfg, out).map_err(|e| match e {
        SolverError::Config(_) => CliError::Config(e.to_string()),
        _ => CliError::Runtime(e.to_string()),
    })?;
    let path = out.join("simulate.json");
    let s = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::write(&path, s + "\n").map_err(io_err(&path))?;
    Ok(format!("{} steps to t = {}, {} snapshots -> {}", summary.steps, summary.t_final, summary.snapshots.len(), out.display()))
}

fn write_report(report: &ConvergenceReport, out: &Path, stem: &str, fmt: ReportFormat) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    if fmt == ReportFormat::Csv {
        emit_report(report, ReportFormat::Csv, &out.join(format!("{stem}.csv")))?;
    }
    emit_report(report, ReportFormat::Json, &out.join(format!("{stem}.json")))?;
    emit_svg(report, &out.join(format!("{stem}.svg")))?;
    Ok(())
}

/// Runs the family, measures, fits and writes `converge.{csv,json,svg}`.
/// Fit outcomes are left to [`converge_verdict`].
pub fn run_converge(plan: &ExperimentPlan, out: &Path, fmt: ReportFormat) -> Result<ConvergenceReport, CliError> {
    plan.validate()?;
    if plan.eps_ladder.len() < 3 {
        return Err(CliError::Config(format!(
            "degenerate fit: a rate fit needs at least 3 ladder entries, got {}",
            plan.eps_ladder.len()
        )));
    }
    let run = run_epsilon_family(plan)?;
    let report = build_report(plan, &measure_family(&run)?);
    write_report(&report, out, "converge", fmt)?;
    Ok(report)
}

/// `Ok` iff every acceptance-gated fit exists and passes.
pub fn converge_verdict(report: &ConvergenceReport) -> Result<(), CliError> {
    let degenerate: Vec<String> = report
        .degenerate()
        .iter()
        .map(|f| format!("{}: {}", f.norm_id, f.fit_error.as_deref().unwrap_or("no fit")))
        .collect();
    if !degenerate.is_empty() {
        return Err(CliError::Verification(format!("fit failed for {}", degenerate.join("; "))));
    }
    if !report.passed() {
        return Err(CliError::Verification(fit_summary(report)));
    }
    Ok(())
}

pub fn fit_summary(report: &ConvergenceReport) -> String {
    report
        .fits
        .iter()
        .map(|f| {
            let slope = f.fit.as_ref().map_or("none".to_string(), |x| format!("{:.3}", x.slope));
            let verdict = match f.pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "reported",
            };
            format!("{}: slope {slope} expected {:.3} {verdict}", f.norm_id, f.expected_slope)
        })
        .collect::<Vec<_>>()
        .join("\n")
}
