//! Runs a plan (TOML path or the 2D pilot) and prints values and fits.

use oberbeck_harness::{build_report, measure_family, run_epsilon_family, ExperimentPlan};

fn main() {
    let plan: ExperimentPlan = match std::env::args().nth(1) {
        Some(p) => ExperimentPlan::from_toml_str(&std::fs::read_to_string(p).expect("read plan")).expect("parse plan"),
        None => ExperimentPlan::pilot_2d(),
    };
    let t0 = std::time::Instant::now();
    let run = run_epsilon_family(&plan).expect("family run");
    let report = build_report(&plan, &measure_family(&run).expect("measure"));
    for r in &report.records {
        println!("{:<60} eps {:<8} {:.6e}", r.norm_id, r.eps, r.value);
    }
    for f in &report.fits {
        let s = f.fit.as_ref().map_or(f64::NAN, |x| x.slope);
        println!("{:<60} slope {s:.3} expected {:.3} monotone {} pass {:?}", f.norm_id, f.expected_slope, f.monotone, f.pass);
    }
    println!("amplitude {:.3e}, {:.1} s", run.potential.amplitude, t0.elapsed().as_secs_f64());
}
