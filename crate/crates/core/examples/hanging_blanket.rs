//! Square blanket hanging from its corners under self-weight, held in
//! plane by penalty springs.
//!
//! `cargo run --release --example hanging_blanket -- [mixed|strain|stress] [weight N/m²]`

use wrinkle_fem::benchmarks::{blanket_reference, build_case, BenchOptions, Benchmark};
use wrinkle_fem::constitutive::Model;
use wrinkle_fem::run::run_case;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model: Model = std::env::args().nth(1).as_deref().unwrap_or("mixed").parse()?;
    let weight = std::env::args().nth(2).map(|s| s.parse()).transpose()?;
    let case = build_case(Benchmark::Blanket, &BenchOptions { model: Some(model), weight, ..Default::default() })?;
    let out = run_case(&case)?;
    if let Some(e) = out.error() {
        println!("solver stopped early: {e}");
    }
    let reported = blanket_reference(model);
    for (k, p) in ["u_z^M", "u_x^A", "u_x^B", "sigma_1^M"].iter().enumerate() {
        let v = out.value_at(p, None).unwrap_or(f64::NAN);
        match reported {
            Some(r) => println!("{p:<10} {v:>12.5e}   reported {:>12.5e}", r[k]),
            None => println!("{p:<10} {v:>12.5e}"),
        }
    }
    println!("iterations per step: {:?}", out.schedule.state.step_iterations);
    println!("eta {:e}, {:.1} s", out.eta, out.elapsed.as_secs_f64());
    Ok(())
}
