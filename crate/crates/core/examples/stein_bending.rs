//! Pre-tensioned strip in in-plane bending compared with the analytical
//! tension-field solution.
//!
//! `cargo run --release --example stein_bending -- [mixed|stress|strain] [eta]`

use wrinkle_fem::benchmarks::{
    bending_sample_heights, bending_stage_name, build_case, stein_band_height, stein_moment_curvature,
    stein_stress_profile, BenchOptions, Benchmark, SteinOracle,
};
use wrinkle_fem::constitutive::Model;
use wrinkle_fem::run::run_case;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model: Model = std::env::args().nth(1).as_deref().unwrap_or("mixed").parse()?;
    let eta = std::env::args().nth(2).map(|s| s.parse()).transpose()?;
    let case = build_case(Benchmark::Bending, &BenchOptions { model: Some(model), eta, ..Default::default() })?;
    let out = run_case(&case)?;
    for (eta, err) in &out.failed_attempts {
        println!("eta = {eta:e} failed: {err}");
    }
    if let Some(e) = out.error() {
        println!("solver stopped early: {e}");
    }
    println!("reported run uses eta = {:e}", out.eta);
    let o = SteinOracle::default();
    for r in [0.4, 0.6, 0.8] {
        let stage = bending_stage_name(r);
        let h = stein_band_height(o.moment(r), o.axial_load(), o.height)?;
        println!("\n{model} 2M/PH = {r}: analytical band h/H = {h:.3}");
        println!("  y/H   sigma_x/sigma0   analytical");
        for y in bending_sample_heights() {
            let fem = out.value_at(&format!("sigma_x(y={y:.1})"), Some(&stage));
            let exact = stein_stress_profile(y, h, o.sigma0) / o.sigma0;
            match fem {
                Some(v) => println!("  {y:.1}   {:>14.4}   {exact:>10.4}", v / o.sigma0),
                None => println!("  {y:.1}   {:>14}   {exact:>10.4}", "-"),
            }
        }
        if let (Some(band), Some(kappa)) = (out.value_at("band_height", Some(&stage)), out.value_at("curvature", Some(&stage))) {
            let ratio = stein_moment_curvature(kappa, o.youngs_modulus, o.height, o.thickness, o.axial_load())
                .map_or(f64::NAN, |r| r);
            println!("  band h/H = {band:.3}; curvature {kappa:.4e} -> 2M/PH = {ratio:.4}");
        }
    }
    let iters: Vec<usize> = out.schedule.state.step_iterations.clone();
    println!("\niterations per step: {iters:?} ({:.2} s)", out.elapsed.as_secs_f64());
    Ok(())
}
