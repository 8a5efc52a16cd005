//! Finite-difference verification of the constitutive tangents and of the
//! assembled element stiffness.
//!
//! `cargo run --release --example tangent_check`

use wrinkle_fem::constitutive::{evaluate, tangent_fd_check, Material, Model};
use wrinkle_fem::fem::assembly::internal_force;
use wrinkle_fem::fem::{build_rect_mesh, internal_force_and_tangent, TangentMode};
use wrinkle_fem::tensor2d::SymTensor2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mat = Material::new(100.0, 0.3, 0.01, 0.0)?;
    println!("material point, step 1e-6 (relative max-entry error):");
    for strain in [SymTensor2::new(0.03, 0.01, 0.004), SymTensor2::new(0.03, -0.02, 0.01), SymTensor2::new(-0.02, -0.03, 0.0)] {
        for model in Model::ALL {
            let state = evaluate(model, &strain, &mat)?.state;
            match tangent_fd_check(model, &strain, &mat, 1e-6) {
                Ok(err) => println!("  {:<6} {:<9} {err:.2e}", model.name(), format!("{state:?}")),
                Err(e) => println!("  {:<6} {:<9} skipped: {e}", model.name(), format!("{state:?}")),
            }
        }
    }

    println!("assembled stiffness vs central difference of the internal force:");
    let mesh = build_rect_mesh(1.0, 0.8, 2, 1, 2, [0.0; 2])?;
    for (label, stretch_y) in [("taut", 0.02), ("wrinkled", -0.03)] {
        let u: Vec<f64> = mesh
            .nodes
            .iter()
            .flat_map(|x| [0.04 * x[0], stretch_y * x[1], 0.02 * (1.3 * x[0]).sin() * (0.7 * x[1]).cos()])
            .collect();
        for model in Model::ALL {
            let models = vec![model; mesh.elements.len()];
            let (_, k) = internal_force_and_tangent(&mesh, &u, &mat, &models, TangentMode::Consistent)?;
            let k = k.to_dense();
            let scale = k.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
            let h = 1e-7;
            let mut worst: f64 = 0.0;
            for col in 0..u.len() {
                let (mut up, mut um) = (u.clone(), u.clone());
                up[col] += h;
                um[col] -= h;
                let (fp, fm) = (internal_force(&mesh, &up, &mat, &models)?, internal_force(&mesh, &um, &mat, &models)?);
                for row in 0..u.len() {
                    worst = worst.max(((fp[row] - fm[row]) / (2.0 * h) - k[row][col]).abs());
                }
            }
            println!("  {label:<9} {:<6} {:.2e}", model.name(), worst / scale);
        }
    }
    Ok(())
}
