//! Square airbag inflated by follower pressure, quarter model: tabulated
//! displacements per mesh and the observed convergence order of w_M.
//!
//! `cargo run --release --example airbag_inflation -- [eta]`

use wrinkle_fem::benchmarks::{airbag_reference, build_case, BenchOptions, Benchmark};
use wrinkle_fem::run::run_case;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eta = std::env::args().nth(1).map(|s| s.parse()).transpose()?;
    println!("mesh      w_M       r_A       u_B   sigma_M   (reported)");
    let mut w = Vec::new();
    for n in [4, 5, 8, 10, 16] {
        let case = build_case(Benchmark::Airbag, &BenchOptions { mesh: Some(n), eta, ..Default::default() })?;
        let out = run_case(&case)?;
        let v: Vec<f64> = ["w_M", "r_A", "u_B", "sigma_M"].iter().map(|p| out.value_at(p, None).unwrap_or(f64::NAN)).collect();
        let reported = airbag_reference(n).map_or_else(String::new, |r| format!("({:.4} {:.4} {:.4} {:.1})", r[0], r[1], r[2], r[3]));
        println!("{n:>2}x{n:<2}  {:.5}  {:.5}  {:.5}  {:>7.3}   {reported}  eta {:e}", v[0], v[1], v[2], v[3], out.eta);
        w.push((n, v[0]));
    }
    let get = |n| w.iter().find(|(m, _)| *m == n).map(|(_, v)| *v).unwrap();
    let order = ((get(8) - get(4)) / (get(16) - get(8))).abs().log2();
    println!("observed order of w_M from meshes 4/8/16: {order:.2}");
    Ok(())
}
