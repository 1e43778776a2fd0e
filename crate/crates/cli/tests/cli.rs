use oberbeck_cli::config::{BesovTestConfig, LinearVerifyConfig, ReportConfig, StrichartzConfig};
use oberbeck_harness::ExperimentPlan;
use oberbeck_solvers::RunConfig;
use std::path::Path;
use std::process::{Command, Output};

fn oberbeck(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_oberbeck"));
    c.args(args).env_remove("OBERBECK_THREADS");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("spawn oberbeck")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn csv_rows(path: &Path) -> usize {
    csv::Reader::from_path(path).unwrap().records().count()
}

const TINY_PLAN: &str = r#"
dim = 2
n = 16
eps_ladder = [0.25, 0.125, 0.0625]
t_end = 0.1
dt = 0.01
measurements = [{ kind = "osc_q", p = 4.0, s = 0.5 }, { kind = "incompressible", p = 4.0, s = 0.6 }]
[initial]
amplitude = 0.05
"#;

#[test]
fn help_lists_every_config_key_with_its_default() {
    let cases = [
        ("linear-verify", toml::to_string(&LinearVerifyConfig::default()).unwrap()),
        ("strichartz", toml::to_string(&StrichartzConfig::default()).unwrap()),
        ("besov-test", toml::to_string(&BesovTestConfig::default()).unwrap()),
        ("simulate", RunConfig::documented_defaults()),
        ("converge", ExperimentPlan::documented_defaults()),
        ("report", toml::to_string(&ReportConfig::default()).unwrap()),
    ];
    for (cmd, defaults) in cases {
        let o = oberbeck(&[cmd, "--help"], &[]);
        assert_eq!(code(&o), 0, "{cmd}");
        let help = String::from_utf8_lossy(&o.stdout);
        for line in defaults.lines().filter(|l| !l.trim().is_empty()) {
            assert!(help.contains(line), "{cmd} help misses `{line}`");
        }
    }
    let help = String::from_utf8_lossy(&oberbeck(&["linear-verify", "--help"], &[]).stdout).into_owned();
    assert!(help.contains("r_grid") && help.contains("t_grid"));
}

#[test]
fn linear_verify_default_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = oberbeck(&["linear-verify", "--out", out], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(csv_rows(&dir.path().join("linear_verify.csv")), 64 * 32 * 3);

    // the unit state e_a carries no (R, d) weight without conduction
    let cfg = write(dir.path(), "nc.toml", "variant = \"nonconducting\"\nkappa_t = 0.0\n");
    let o = oberbeck(&["linear-verify", "--config", &cfg, "--out", out, "--format", "json"], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("linear_verify.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 64 * 32 * 2);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn linear_verify_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = write(dir.path(), "empty.toml", "r_grid = []\n");
    let o = oberbeck(&["linear-verify", "--config", &cfg, "--out", out], &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("r_grid"), "{}", stderr(&o));

    let cfg = write(dir.path(), "unknown.toml", "kappa = 1.0\n");
    let o = oberbeck(&["linear-verify", "--config", &cfg, "--out", out], &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("kappa"), "{}", stderr(&o));

    let cfg = write(dir.path(), "zero.toml", "kappa_t = 0.0\n");
    let o = oberbeck(&["linear-verify", "--config", &cfg, "--out", out], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha"), "{}", stderr(&o));

    let o = oberbeck(&["linear-verify", "--config", "/nonexistent/cfg.toml", "--out", out], &[]);
    assert_eq!(code(&o), 1);
    let o = oberbeck(&["linear-verify", "--threads", "0", "--out", out], &[]);
    assert_eq!(code(&o), 1);
}

#[test]
fn converge_ladder_of_one_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "one.toml", "eps_ladder = [1.0]\ndim = 2\nn = 16\n");
    let o = oberbeck(&["converge", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("degenerate fit"), "{}", stderr(&o));
}

#[test]
fn converge_solver_failure_names_eps() {
    let dir = tempfile::tempdir().unwrap();
    let plan = r#"
dim = 2
n = 16
eps_ladder = [0.25, 0.125, 0.0625]
t_end = 1.0
dt = 0.05
[initial]
amplitude = 50.0
"#;
    let cfg = write(dir.path(), "blow.toml", plan);
    let o = oberbeck(&["converge", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("eps = "), "{}", stderr(&o));
}

#[test]
fn converge_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "plan.toml", TINY_PLAN);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let oa = oberbeck(&["converge", "--config", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"], &[]);
    let ob = oberbeck(&["converge", "--config", &cfg, "--out", b.to_str().unwrap()], &[("OBERBECK_THREADS", "3")]);
    assert!(matches!(code(&oa), 0 | 2), "{}", stderr(&oa));
    assert_eq!(code(&oa), code(&ob));
    for f in ["converge.csv", "converge.json", "converge.svg"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(csv_rows(&a.join("converge.csv")), 6);

    // a different seed changes the data
    let c = dir.path().join("c");
    oberbeck(&["converge", "--config", &cfg, "--out", c.to_str().unwrap(), "--seed", "99"], &[]);
    assert_ne!(std::fs::read(a.join("converge.csv")).unwrap(), std::fs::read(c.join("converge.csv")).unwrap());

    // report re-applies the same verdict to the stored JSON
    let o = oberbeck(&["report", "--out", a.to_str().unwrap(), "--format", "json"], &[]);
    assert_eq!(code(&o), code(&oa), "{}", stderr(&o));
    let stored: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("converge.json")).unwrap()).unwrap();
    let again: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(stored, again);
    let o = oberbeck(&["report", "--out", dir.path().join("missing").to_str().unwrap()], &[]);
    assert_eq!(code(&o), 1);
}

#[test]
fn simulate_writes_snapshots_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sim.toml",
        "[grid]\nn = 16\n[time]\nt_end = 0.05\ndt = 0.01\n[output]\nsnapshot_stride = 1\n",
    );
    let out = dir.path().join("sim");
    let o = oberbeck(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("simulate.json")).unwrap()).unwrap();
    assert_eq!(summary["steps"], 5);
    // six snapshots of three fields
    assert_eq!(summary["snapshots"].as_array().unwrap().len(), 18);

    let bad = write(dir.path(), "bad.toml", "[time]\ndt = -1.0\n");
    let o = oberbeck(&["simulate", "--config", &bad, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 1);
}

#[test]
fn small_besov_and_strichartz_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = write(
        dir.path(),
        "besov.toml",
        "samples = 3\nidentity_grids = [[2, 16], [3, 12]]\nproduct_n = 16\nalphas = [1.0]\n",
    );
    let o = oberbeck(&["besov-test", "--config", &cfg, "--out", out], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // two identities per grid, then 3 cases x 2 signs x 1 alpha
    assert_eq!(csv_rows(&dir.path().join("besov_test.csv")), 4 + 6);

    let cfg = write(
        dir.path(),
        "str.toml",
        "n = 16\nl = 24.0\nwidths = [1.5, 2.0]\nt_end = 4.0\nsteps = 8\n\
         dispersion_width = 2.0\ndispersion_times = [1.0, 2.0]\nheat_n = 16\nheat_widths = [2.0]\nheat_steps = 20\n",
    );
    let o = oberbeck(&["strichartz", "--config", &cfg, "--out", out], &[]);
    assert!(matches!(code(&o), 0 | 2), "{}", stderr(&o));
    // 2 ratios + spread, 2 samples + spread, 2 free heat ratios, 3 forced
    assert_eq!(csv_rows(&dir.path().join("strichartz.csv")), 3 + 3 + 2 + 3);
}
