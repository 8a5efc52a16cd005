//! Membrane state, stress and tangent symmetry of every model along a
//! path from biaxial tension through uniaxial tension into compression.
//!
//! `cargo run --example constitutive_models -- [nu]`

use wrinkle_fem::constitutive::{classify, evaluate, Criterion, Material, Model};
use wrinkle_fem::tensor2d::SymTensor2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nu: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.3);
    let mat = Material::new(1.0, nu, 1.0, 0.0)?;
    println!("E = 1, nu = {nu}, eta = 0; strain E = diag(0.02, e22)");
    println!("{:>8}  {:<6} {:>9} {:>9} {:>9} {:>10}  state", "e22", "model", "S11", "S22", "psi", "|C-C^T|");
    for k in 0..=6 {
        let e22 = 0.01 - 0.005 * k as f64;
        let strain = SymTensor2::diag(0.02, e22);
        let criteria: Vec<String> = [Criterion::Stress, Criterion::Strain, Criterion::Mixed]
            .iter()
            .map(|&c| format!("{c:?}:{:?}", classify(&strain, &mat, c)))
            .collect();
        println!("{e22:>8.3}  criteria {}", criteria.join(" "));
        for model in Model::ALL {
            let p = evaluate(model, &strain, &mat)?;
            println!(
                "{:>8}  {:<6} {:>9.2e} {:>9.2e} {:>9.2e} {:>10.1e}  {:?}",
                "",
                model.name(),
                p.stress.a11,
                p.stress.a22,
                p.energy(mat.eta),
                p.tangent.asymmetry(),
                p.state
            );
        }
    }
    Ok(())
}
