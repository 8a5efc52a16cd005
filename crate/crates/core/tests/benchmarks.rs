use wrinkle_fem::benchmarks::{build_case, BenchOptions, Benchmark};
use wrinkle_fem::constitutive::Model;
use wrinkle_fem::run::run_case;

fn probe_names(b: Benchmark) -> Vec<String> {
    build_case(b, &BenchOptions::default()).unwrap().probes.iter().map(|p| p.name().to_string()).collect()
}

#[test]
fn tabulated_probes_are_present() {
    let airbag = probe_names(Benchmark::Airbag);
    for p in ["w_M", "r_A", "u_B", "sigma_M"] {
        assert!(airbag.iter().any(|n| n == p), "{p}");
    }
    let blanket = probe_names(Benchmark::Blanket);
    for p in ["u_z^M", "u_x^A", "u_x^B", "sigma_1^M"] {
        assert!(blanket.iter().any(|n| n == p), "{p}");
    }
    let bending = probe_names(Benchmark::Bending);
    assert_eq!(bending.iter().filter(|n| n.starts_with("sigma_x(")).count(), 11);
}

#[test]
fn shear_schedule_pretensions_then_shears_in_ten_substeps() {
    let case = build_case(Benchmark::Shear, &BenchOptions::default()).unwrap();
    assert_eq!(case.stages[0].steps, 1);
    assert_eq!(case.stages[1..].iter().map(|s| s.steps).sum::<usize>(), 10);
    assert_eq!(case.stages.last().unwrap().targets["shear"], 3.0);
    let r = case.resolve().unwrap();
    assert_eq!(r.problem.mesh.elements.len(), 400);
}

#[test]
fn airbag_result_is_independent_of_the_stabiliser() {
    let run = |scale| {
        let case = build_case(
            Benchmark::Airbag,
            &BenchOptions { model: Some(Model::Mixed), stabilizer_scale: Some(scale), ..Default::default() },
        )
        .unwrap();
        let out = run_case(&case).unwrap();
        assert!(out.converged(), "{:?}", out.error());
        out.value_at("w_M", None).unwrap()
    };
    let (w1, w2) = (run(1.0), run(2.0));
    assert!((w1 - w2).abs() <= 1e-6, "{w1} vs {w2}");
}
