//! Square sheet pulled at its corners with unequal diagonal forces:
//! wrinkled-point fraction along the loaded diagonal per load ratio.
//!
//! `cargo run --release --example corner_load -- [mesh]`
//!
//! The default 40×40 cubic mesh takes a few minutes; pass a smaller mesh
//! (e.g. `20`) for a quick look.

use wrinkle_fem::benchmarks::{build_case, corner_stage_name, BenchOptions, Benchmark};
use wrinkle_fem::run::run_case;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = std::env::args().nth(1).map(|s| s.parse()).transpose()?;
    let case = build_case(Benchmark::Corner, &BenchOptions { mesh, ..Default::default() })?;
    let out = run_case(&case)?;
    if let Some(e) = out.error() {
        println!("solver stopped early: {e}");
    }
    println!("T1/T2  wrinkled fraction (diagonal band)  sigma1 centre");
    for r in [1.0, 2.0, 3.0, 4.0] {
        let stage = corner_stage_name(r);
        let f = out.value_at("wrinkled_fraction_t1_diagonal", Some(&stage)).unwrap_or(f64::NAN);
        let s = out.value_at("sigma1_center", Some(&stage)).unwrap_or(f64::NAN);
        println!("{r:>5}  {f:>36.3}  {s:>13.4e}");
    }
    println!("iterations per step: {:?}", out.schedule.state.step_iterations);
    println!("{:.1} s", out.elapsed.as_secs_f64());
    Ok(())
}
