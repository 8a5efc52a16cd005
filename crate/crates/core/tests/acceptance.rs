//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --release --test acceptance`
//!
//! `ACCEPTANCE_ONLY=1,2,7` restricts the run to the listed criteria.
//! `ACCEPTANCE_STRICT=1` makes any FAIL line a nonzero exit status;
//! without it the harness only fails on panics, so that a known shortfall
//! is reported rather than masking the rest of the test run.

mod common;

use std::time::{Duration, Instant};

use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wrinkle_fem::benchmarks::{
    airbag_reference, bending_sample_heights, bending_stage_name, blanket_reference, build_case,
    corner_stage_name, stein_band_height, stein_moment_curvature, stein_stress_profile, BenchOptions,
    Benchmark, SteinOracle,
};
use wrinkle_fem::constitutive::Model;
use wrinkle_fem::run::{rel_diff, run_case, RunOutcome};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn bench(b: Benchmark, opts: BenchOptions) -> RunOutcome {
    let case = build_case(b, &opts).expect("benchmark case");
    run_case(&case).expect("benchmark run")
}

fn eta_note(out: &RunOutcome) -> String {
    if out.failed_attempts.is_empty() {
        format!("eta {:e}", out.eta)
    } else {
        let failed: Vec<String> = out.failed_attempts.iter().map(|(e, _)| format!("{e:e}")).collect();
        format!("eta {:e} after failures at [{}]", out.eta, failed.join(", "))
    }
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn check(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

// ---------------------------------------------------------------------------

const SUITE_PER_NU: usize = 3400;
const SUITE_SEED: u64 = 20_240_601;

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let r = constitutive_suite(SUITE_PER_NU, SUITE_SEED);
    let elapsed = t.elapsed();
    let fast = elapsed < Duration::from_secs(5);
    verdict(
        r.samples >= 10_000 && r.energy_ok() && r.taut_ok() && r.uniaxial_ok() && r.trace_law_ok() && fast,
        format!(
            "{} strains; energy {:.1e}; taut {:.1e} ({} pts); uniaxial {:.1e} ({} pts); trace law {:.1e} ({} pts); {}",
            r.samples,
            r.energy,
            r.taut,
            r.taut_samples,
            r.uniaxial,
            r.uniaxial_samples,
            r.trace_law,
            r.trace_samples,
            secs(elapsed)
        ),
    )
}

fn criterion_2() -> Verdict {
    let r = constitutive_suite(SUITE_PER_NU, SUITE_SEED);
    let parts: Vec<String> = r.tangent.iter().map(|((m, s), (n, e))| format!("{m}/{s} {e:.1e} (n={n})")).collect();
    verdict(
        r.tangent_ok(),
        format!("max FD error {:.2e} < {TOL_TANGENT_FD:e}; coverage {}; {}", r.tangent_max(), check(r.tangent_coverage_complete()), parts.join(", ")),
    )
}

fn criterion_3() -> Verdict {
    let r = constitutive_suite(SUITE_PER_NU, SUITE_SEED);
    verdict(
        r.symmetry_ok(),
        format!(
            "mixed/strain max |C-C^T|/|C| {:.1e}; stress-split nu=0.3 asymmetric wrinkled samples {}; stress-split nu=0 max {:.1e}",
            r.symmetric, r.stress_split_asymmetric_nu03, r.stress_split_nu0
        ),
    )
}

const BENDING_RATIOS: [f64; 3] = [0.4, 0.6, 0.8];

struct BendingMetrics {
    /// RMS profile error over all heights, fraction of the profile max
    rms: Vec<f64>,
    /// RMS error over heights inside the analytical band, fraction of σ₀
    band_rms: Vec<f64>,
    /// mean σx/σ₀ over heights inside the analytical band
    band_mean: Vec<f64>,
    band_error: Vec<f64>,
    moment_error: Vec<f64>,
}

fn bending_metrics(out: &RunOutcome) -> Option<BendingMetrics> {
    let o = SteinOracle::default();
    let mut m = BendingMetrics { rms: vec![], band_rms: vec![], band_mean: vec![], band_error: vec![], moment_error: vec![] };
    for r in BENDING_RATIOS {
        let stage = bending_stage_name(r);
        let h = stein_band_height(o.moment(r), o.axial_load(), o.height).ok()?;
        let (mut sq, mut peak, mut band_sq, mut band_sum, mut band_n) = (0.0, 0.0_f64, 0.0, 0.0, 0);
        let heights = bending_sample_heights();
        for &y in &heights {
            let fem = out.value_at(&format!("sigma_x(y={y:.1})"), Some(&stage))?;
            let exact = stein_stress_profile(y, h, o.sigma0);
            sq += (fem - exact).powi(2);
            peak = peak.max(exact.abs());
            // strictly inside the band; the edge point itself carries zero analytical stress
            if y < h - 1e-9 {
                band_sq += ((fem - exact) / o.sigma0).powi(2);
                band_sum += fem / o.sigma0;
                band_n += 1;
            }
        }
        m.rms.push((sq / heights.len() as f64).sqrt() / peak);
        m.band_rms.push(if band_n > 0 { (band_sq / band_n as f64).sqrt() } else { 0.0 });
        m.band_mean.push(if band_n > 0 { band_sum / band_n as f64 } else { 0.0 });
        m.band_error.push((out.value_at("band_height", Some(&stage))? - h).abs());
        let kappa = out.value_at("curvature", Some(&stage))?;
        let implied = stein_moment_curvature(kappa, o.youngs_modulus, o.height, o.thickness, o.axial_load()).ok()?;
        m.moment_error.push(rel_diff(implied, r));
    }
    Some(m)
}

fn fmt_list(v: &[f64], scale: f64, digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{:.*}", digits, x * scale)).collect();
    parts.join("/")
}

fn criterion_4() -> Verdict {
    let out = bench(Benchmark::Bending, BenchOptions { model: Some(Model::Mixed), ..Default::default() });
    let Some(m) = (out.converged()).then(|| bending_metrics(&out)).flatten() else {
        return verdict(false, format!("bending mixed did not converge: {:?}; {}", out.error(), eta_note(&out)));
    };
    let ok_rms = m.rms.iter().all(|&e| e <= 0.05);
    let ok_band = m.band_error.iter().all(|&e| e <= 0.1);
    let ok_mk = m.moment_error.iter().all(|&e| e <= 0.05);
    let ok_time = out.elapsed < Duration::from_secs(60);
    verdict(
        ok_rms && ok_band && ok_mk && ok_time,
        format!(
            "2M/PH 0.4/0.6/0.8: profile RMS {}% of max [{}]; band |dh|/H {} [{}]; moment-curvature {}% [{}]; {}; {} [{}]",
            fmt_list(&m.rms, 100.0, 2),
            check(ok_rms),
            fmt_list(&m.band_error, 1.0, 3),
            check(ok_band),
            fmt_list(&m.moment_error, 100.0, 2),
            check(ok_mk),
            eta_note(&out),
            secs(out.elapsed),
            check(ok_time)
        ),
    )
}

fn criterion_5() -> Verdict {
    let stress = bench(Benchmark::Bending, BenchOptions { model: Some(Model::StressSplit), ..Default::default() });
    let strain = bench(Benchmark::Bending, BenchOptions { model: Some(Model::StrainSplit), ..Default::default() });
    let ms = stress.converged().then(|| bending_metrics(&stress)).flatten();
    let me = strain.converged().then(|| bending_metrics(&strain)).flatten();
    let (Some(ms), Some(me)) = (ms, me) else {
        return verdict(
            false,
            format!(
                "stress-split converged {} ({}), strain-split converged {} ({})",
                stress.converged(),
                eta_note(&stress),
                strain.converged(),
                eta_note(&strain)
            ),
        );
    };
    let ok_stress = ms.rms.iter().all(|&e| e <= 0.05);
    let ok_tension = me.band_mean[0] > 0.0;
    let ok_monotone = me.band_rms.windows(2).all(|w| w[1] < w[0]);
    verdict(
        ok_stress && ok_tension && ok_monotone,
        format!(
            "stress-split profile RMS {}% [{}] ({}); strain-split band mean sigma_x/sigma0 at 0.4 = {:.3} [{}], band RMS/sigma0 {} [{}] ({})",
            fmt_list(&ms.rms, 100.0, 2),
            check(ok_stress),
            eta_note(&stress),
            me.band_mean[0],
            check(ok_tension),
            fmt_list(&me.band_rms, 1.0, 3),
            check(ok_monotone),
            eta_note(&strain)
        ),
    )
}

fn criterion_6() -> Verdict {
    let mixed = bench(Benchmark::Shear, BenchOptions { model: Some(Model::Mixed), ..Default::default() });
    let strain = bench(Benchmark::Shear, BenchOptions { model: Some(Model::StrainSplit), ..Default::default() });
    let get = |o: &RunOutcome, p: &str, s: &str| o.value_at(p, Some(s)).unwrap_or(f64::NAN);
    let levels = [("ux=1.6", 23.0, 18.0), ("ux=3.0", 43.0, 33.0)];
    let mut ok = mixed.converged() && strain.converged();
    let mut parts = Vec::new();
    for (stage, mixed_ref, strain_ref) in levels {
        let s1 = get(&mixed, "sigma1_midline", stage);
        let s2 = get(&mixed, "sigma2_midline_maxabs", stage);
        let e1 = get(&strain, "sigma1_midline", stage);
        let ok_mixed = rel_diff(s1, mixed_ref) <= 0.10;
        let ok_s2 = s2.abs() <= 0.01 * s1;
        let ok_strain = e1 < s1 && rel_diff(e1, strain_ref) <= 0.15;
        ok &= ok_mixed && ok_s2 && ok_strain;
        parts.push(format!(
            "{stage}: sigma1 {s1:.2} MPa vs {mixed_ref} [{}], |sigma2| {:.2}% [{}], strain {e1:.2} vs {strain_ref} [{}]",
            check(ok_mixed),
            100.0 * s2.abs() / s1,
            check(ok_s2),
            check(ok_strain)
        ));
    }
    let ok_time = mixed.elapsed < Duration::from_secs(300);
    ok &= ok_time;
    verdict(
        ok,
        format!(
            "{}; mixed {} in {} [{}]; strain {} in {}",
            parts.join("; "),
            eta_note(&mixed),
            secs(mixed.elapsed),
            check(ok_time),
            eta_note(&strain),
            secs(strain.elapsed)
        ),
    )
}

const AIRBAG_PROBES: [&str; 4] = ["w_M", "r_A", "u_B", "sigma_M"];

fn airbag(n: usize, stabilizer_scale: Option<f64>) -> RunOutcome {
    bench(Benchmark::Airbag, BenchOptions { model: Some(Model::Mixed), mesh: Some(n), stabilizer_scale, ..Default::default() })
}

fn criterion_7() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, tols) in [(5, [0.03, 0.03, 0.03, 0.10]), (8, [0.03; 4]), (10, [0.03; 4])] {
        let out = airbag(n, None);
        let reference = airbag_reference(n).expect("tabulated mesh");
        let mut line = format!("{n}x{n}:");
        ok &= out.converged();
        for ((probe, expected), tol) in AIRBAG_PROBES.iter().zip(reference).zip(tols) {
            let v = out.value_at(probe, None).unwrap_or(f64::NAN);
            let pass = rel_diff(v, expected) <= tol;
            ok &= pass;
            line += &format!(" {probe} {v:.4} ({:+.1}%{})", 100.0 * (v - expected) / expected, if pass { "" } else { " FAIL" });
        }
        parts.push(line);
    }
    let w: Vec<f64> = [4, 8, 16].iter().map(|&n| airbag(n, None).value_at("w_M", None).unwrap_or(f64::NAN)).collect();
    let order = ((w[1] - w[0]).abs() / (w[2] - w[1]).abs()).log2();
    let ok_order = order >= 1.5;
    let base = airbag(5, None).value_at("w_M", None).unwrap_or(f64::NAN);
    let doubled = airbag(5, Some(2.0)).value_at("w_M", None).unwrap_or(f64::NAN);
    let stab = (base - doubled).abs();
    let elapsed = t.elapsed();
    let ok_time = elapsed < Duration::from_secs(600);
    ok &= ok_order && ok_time;
    verdict(
        ok,
        format!(
            "{}; w_M order (4/8/16) {order:.2} [{}]; stabiliser x2 |dw_M| {stab:.1e} m; {} [{}]",
            parts.join("; "),
            check(ok_order),
            secs(elapsed),
            check(ok_time)
        ),
    )
}

fn criterion_8() -> Verdict {
    let mixed = bench(Benchmark::Blanket, BenchOptions { model: Some(Model::Mixed), ..Default::default() });
    let strain = bench(Benchmark::Blanket, BenchOptions { model: Some(Model::StrainSplit), ..Default::default() });
    let reference = blanket_reference(Model::Mixed).expect("tabulated model");
    let mut ok = mixed.converged();
    let mut parts = Vec::new();
    for (probe, expected) in ["u_z^M", "u_x^A", "u_x^B"].iter().zip(reference) {
        let v = mixed.value_at(probe, None).unwrap_or(f64::NAN);
        let pass = rel_diff(v, expected) <= 0.02;
        ok &= pass;
        parts.push(format!("{probe} {v:.5} vs {expected} ({:+.1}%) [{}]", 100.0 * (v - expected) / expected, check(pass)));
    }
    let last_iters = mixed.schedule.state.step_iterations.last().copied().unwrap_or(usize::MAX);
    let ok_iters = mixed.converged() && last_iters <= 25;
    let (uz_mixed, uz_strain) = (mixed.value_at("u_z^M", None), strain.value_at("u_z^M", None));
    let ok_order = strain.converged() && matches!((uz_mixed, uz_strain), (Some(m), Some(s)) if s.abs() > m.abs());
    ok &= ok_iters && ok_order;
    verdict(
        ok,
        format!(
            "{}; final-step Newton iterations {last_iters} [{}]; strain-split u_z^M {:.5} [{}]; mixed {}, {}",
            parts.join("; "),
            check(ok_iters),
            uz_strain.unwrap_or(f64::NAN),
            check(ok_order),
            eta_note(&mixed),
            secs(mixed.elapsed + strain.elapsed)
        ),
    )
}

fn criterion_9() -> Verdict {
    let out = bench(Benchmark::Corner, BenchOptions { model: Some(Model::Mixed), ..Default::default() });
    let fractions: Vec<f64> = [1.0, 2.0, 3.0, 4.0]
        .iter()
        .map(|&r| out.value_at("wrinkled_fraction_t1_diagonal", Some(&corner_stage_name(r))).unwrap_or(f64::NAN))
        .collect();
    let increasing = fractions.windows(2).all(|w| w[1] > w[0]);
    verdict(
        out.converged() && increasing,
        format!(
            "converged {}; diagonal-band wrinkled fraction T1/T2=1..4: {} [{}]; {}, {}",
            out.converged(),
            fmt_list(&fractions, 1.0, 3),
            check(increasing),
            eta_note(&out),
            secs(out.elapsed)
        ),
    )
}

fn criterion_10() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SUITE_SEED);
    let mut conj: f64 = 0.0;
    let mut frame: f64 = 0.0;
    let mut states_kept = true;
    for _ in 0..16 {
        let direction: Vec<f64> = (0..54).map(|_| rng.random_range(-1.0..1.0)).collect();
        let stretch = rng.random_range(-0.03..0.03);
        for model in Model::ALL {
            conj = conj.max(work_conjugacy_error(&direction, stretch, model));
        }
        let (a, b, c) = (rng.random_range(0.0..6.28), rng.random_range(-1.5..1.5), rng.random_range(0.0..6.28));
        for model in [Model::Mixed, Model::StressSplit, Model::StrainSplit] {
            let (e, same) = frame_invariance_error(a, b, c, stretch, model);
            frame = frame.max(e);
            states_kept &= same;
        }
    }
    let patch = patch_test_error();
    let stiffness = stiffness_fd_error();
    let (ratios, quadratic) = quadratic_convergence();
    let ok_conj = conj <= TOL_CONJUGACY;
    let ok_frame = frame <= TOL_FRAME && states_kept;
    let ok_patch = patch.is_some_and(|e| e < TOL_PATCH);
    let ok_k = stiffness < TOL_TANGENT_FD;
    let tail: Vec<String> = ratios.iter().map(|r| format!("{r:.1e}")).collect();
    verdict(
        ok_conj && ok_frame && ok_patch && ok_k && quadratic,
        format!(
            "work conjugacy {conj:.1e} [{}]; frame invariance {frame:.1e} [{}]; patch {} [{}]; K vs FD {stiffness:.1e} [{}]; Newton ratios {} [{}]",
            check(ok_conj),
            check(ok_frame),
            patch.map_or_else(|| "solve failed".into(), |e| format!("{e:.1e}")),
            check(ok_patch),
            check(ok_k),
            tail.join(" "),
            check(quadratic)
        ),
    )
}

const CRITERIA: [(usize, &str, fn() -> Verdict); 10] = [
    (1, "constitutive property suite", criterion_1),
    (2, "tangent consistency", criterion_2),
    (3, "tangent symmetry", criterion_3),
    (4, "bending, mixed model", criterion_4),
    (5, "bending, stress- and strain-split", criterion_5),
    (6, "simple shear", criterion_6),
    (7, "airbag inflation", criterion_7),
    (8, "hanging blanket", criterion_8),
    (9, "corner load pattern", criterion_9),
    (10, "FEM property suite", criterion_10),
];

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let strict = std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v != "0");
    let mut failed = 0;
    let mut ran = 0;
    for (id, title, run) in CRITERIA {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        let v = run();
        ran += 1;
        if !v.pass {
            failed += 1;
        }
        println!("{} {id:>2} {title}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail, secs(t.elapsed()));
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
