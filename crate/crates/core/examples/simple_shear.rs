//! Rectangular sheet sheared by its top edge: midline principal stresses
//! and shear force per step.
//!
//! `cargo run --release --example simple_shear -- [mixed|strain]`

use wrinkle_fem::benchmarks::{build_case, BenchOptions, Benchmark};
use wrinkle_fem::constitutive::Model;
use wrinkle_fem::run::run_case;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model: Model = std::env::args().nth(1).as_deref().unwrap_or("mixed").parse()?;
    let case = build_case(Benchmark::Shear, &BenchOptions { model: Some(model), ..Default::default() })?;
    let out = run_case(&case)?;
    for (eta, err) in &out.failed_attempts {
        println!("eta = {eta:e} failed: {err}");
    }
    if let Some(e) = out.error() {
        println!("solver stopped early: {e}");
    }
    println!("reported run uses eta = {:e}", out.eta);
    println!("step  stage        sigma1 (MPa)  max|sigma2| (MPa)  shear force (N)  iterations");
    for snap in &out.schedule.snapshots {
        let get = |p: &str| out.probes.iter().find(|v| v.probe == p && v.step == snap.step).map_or(f64::NAN, |v| v.value);
        println!(
            "{:>4}  {:<11}  {:>12.3}  {:>17.4}  {:>15.4}  {:>10}",
            snap.step,
            snap.stage_name,
            get("sigma1_midline"),
            get("sigma2_midline_maxabs"),
            get("shear_force"),
            snap.iterations
        );
    }
    for c in out.reference_checks() {
        println!(
            "{} at {}: {:.3} vs {:.1} (tol {:.0}%) -> {}",
            c.probe,
            c.stage,
            c.measured.unwrap_or(f64::NAN),
            c.expected,
            100.0 * c.rel_tol,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    println!("{:.1} s", out.elapsed.as_secs_f64());
    Ok(())
}
