//! Eigenvalues, eigenvectors and eigenprojectors of a plane symmetric tensor.
//!
//! `cargo run --example spectral_decomposition -- [a11 a22 a12]`

use wrinkle_fem::tensor2d::{rotate_to_principal, spectral_decompose, SymTensor2, DEFAULT_TOL_EIG};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let t = match args.as_slice() {
        [a11, a22, a12] => SymTensor2::new(*a11, *a22, *a12),
        [] => SymTensor2::new(0.03, -0.01, 0.02),
        _ => return Err("expected three components a11 a22 a12".into()),
    };
    let sp = spectral_decompose(&t, DEFAULT_TOL_EIG)?;
    println!("tensor      {t:?}");
    println!("e1 = {:.6e}, n1 = [{:.6}, {:.6}]", sp.e1, sp.n1[0], sp.n1[1]);
    println!("e2 = {:.6e}, n2 = [{:.6}, {:.6}]", sp.e2, sp.n2[0], sp.n2[1]);
    println!("M1 = {:?}", sp.m1);
    println!("M2 = {:?}", sp.m2);
    println!("M1 + M2 = {:?}", sp.m1 + sp.m2);
    println!("M1:M2 = {:.1e}, M1:M1 = {:.15}", sp.m1.ddot(&sp.m2), sp.m1.ddot(&sp.m1));
    println!("reconstruction error {:.1e}", (sp.reconstruct() - t).norm());
    println!("in principal axes   {:?}", rotate_to_principal(&t, &sp));
    println!("degenerate: {}", sp.degenerate);
    Ok(())
}
