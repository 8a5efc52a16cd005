//! Load a JSON case, run it and write the result bundle.
//!
//! `cargo run --release --example custom_case_json -- [case.json] [out-dir]`

use std::path::PathBuf;

use wrinkle_fem::case::Case;
use wrinkle_fem::io::write_bundle;
use wrinkle_fem::run::run_case;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let default = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("cases/strip_tension.json");
    let path = std::env::args().nth(1).map_or(default, PathBuf::from);
    let out_dir = std::env::args().nth(2).map_or_else(|| std::env::temp_dir().join("wrinkle-example"), PathBuf::from);

    let case = Case::from_file(&path)?;
    println!("case '{}': {} ({} stages, {} probes)", case.name, case.description, case.stages.len(), case.probes.len());
    let out = run_case(&case)?;
    for c in out.reference_checks() {
        println!(
            "{:<16} measured {:.10e} expected {:.10e} -> {}",
            c.probe,
            c.measured.unwrap_or(f64::NAN),
            c.expected,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let bundle = write_bundle(&out, &out_dir.join(&case.name))?;
    for f in &bundle.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
