//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bearing_equiv::analysis::{
    acyclic_nonequivalence_conditions, classify_equivalence, laplacian_spectrum, Tolerances,
};
use bearing_equiv::dynamics::{bearing_error, simulate, SimulationOptions, TargetSpec, Verdict};
use bearing_equiv::fixtures;
use bearing_equiv::generate::{generate, random_configuration, GenKind, GenSpec, DEFAULT_BOX};
use bearing_equiv::geometry::{Configuration, DirectedFormation, COLLINEAR_TOL};
use bearing_equiv::linalg::{kernel_range_intersection_dim, EIGEN_CAP, RANK_TOL};
use bearing_equiv::operators::{
    bearing_laplacian_blocks, bearing_laplacian_factored, bearing_rigidity_matrix, scaled_factors,
};
use bearing_equiv::Error;
use common::*;
use num_complex::Complex64;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn report(f: &DirectedFormation) -> bearing_equiv::analysis::EquivalenceReport {
    classify_equivalence(f, &Tolerances::default()).expect("classification succeeds")
}

/// Greedy matching of `found` against `expected`; returns the worst distance.
fn match_spectrum(found: &[Complex64], expected: &[Complex64]) -> f64 {
    assert_eq!(found.len(), expected.len());
    let mut left: Vec<Complex64> = found.to_vec();
    let mut worst = 0.0f64;
    for e in expected {
        let (k, dist) = left
            .iter()
            .enumerate()
            .map(|(k, z)| (k, (z - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(dist);
        left.swap_remove(k);
    }
    worst
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let spectrum = laplacian_spectrum(&fixtures::ga(), EIGEN_CAP).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = [
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(1.6400, 0.7564),
        c(1.6400, -0.7564),
        c(0.8879, 0.3799),
        c(0.8879, -0.3799),
        c(-0.0559, 0.0),
    ];
    let worst = match_spectrum(&spectrum, &expected);
    check(
        worst <= 1e-3,
        format!("worst eigenvalue deviation {worst:.2e}"),
    )?;
    check(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("worst deviation {worst:.2e}, {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let r = report(&fixtures::ga());
    check(r.spectral.has_negative_real_part, "no negative real part")?;
    check(
        (r.min_real_part + 0.0559).abs() <= 1e-3,
        format!("min real part {}", r.min_real_part),
    )?;
    check(r.is_bearing_equivalent, "not bearing equivalent")?;
    check(
        r.dim_null_lb == 3,
        format!("dim Null(L_B) = {}", r.dim_null_lb),
    )?;
    Ok(format!(
        "min real part {:.6}, equivalent, dim Null(L_B) = 3",
        r.min_real_part
    ))
}

fn criterion_3() -> Outcome {
    let r = report(&fixtures::t3());
    let h = 0.5f64.sqrt();
    let expected = [0.0, 0.0, 0.0, 1.0 - h, 1.0, 1.0 + h].map(|x| c(x, 0.0));
    let worst = match_spectrum(&r.spectrum, &expected);
    check(
        worst <= 1e-9,
        format!("worst eigenvalue deviation {worst:.2e}"),
    )?;
    check(r.is_bearing_equivalent, "not bearing equivalent")?;
    Ok(format!("worst deviation {worst:.2e}, equivalent"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    for seed in 0..200u64 {
        let mut r = rng(seed);
        let n = r.random_range(2..=10);
        let d = r.random_range(2..=3);
        let f = random_acyclic(&mut r, n, d);
        let spectrum = laplacian_spectrum(&f, EIGEN_CAP).map_err(|e| e.to_string())?;
        let scale = spectrum
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let max_im = spectrum.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let min_re = spectrum.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        check(
            max_im <= 1e-8 * scale && min_re >= -1e-8 * scale,
            format!("seed {seed}: max|Im| {max_im:.2e}, min Re {min_re:.2e}, scale {scale:.2e}"),
        )?;
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(30),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("200 formations real and nonnegative, {elapsed:?}"))
}

fn criterion_5() -> Outcome {
    type Builder = fn(&mut rand_chacha::ChaCha8Rng, usize, usize) -> DirectedFormation;
    let cases: [(&str, Builder, usize); 3] = [
        ("I", with_two_leaders, 3),
        ("II", with_two_single_edge, 3),
        ("III", with_two_collinear, 4),
    ];
    for (name, build, n_min) in cases {
        for seed in 0..100u64 {
            let mut r = rng(1000 + seed);
            let n = r.random_range(n_min..=10);
            let d = r.random_range(2..=3);
            let f = build(&mut r, n, d);
            let c =
                acyclic_nonequivalence_conditions(&f, COLLINEAR_TOL).map_err(|e| e.to_string())?;
            let holds = match name {
                "I" => c.cond_i,
                "II" => c.cond_ii,
                _ => c.cond_iii,
            };
            check(
                holds,
                format!("condition {name}, seed {seed}: construction does not satisfy it"),
            )?;
            let rep = report(&f);
            check(
                rep.dim_null_lb > d + 1,
                format!(
                    "condition {name}, seed {seed}: dim Null(L_B) = {}",
                    rep.dim_null_lb
                ),
            )?;
        }
    }
    Ok("3 x 100 formations, all with dim Null(L_B) > d+1".into())
}

fn criterion_6() -> Outcome {
    for seed in 0..100u64 {
        let mut r = rng(2000 + seed);
        let n = r.random_range(2..=10);
        let d = r.random_range(2..=3);
        let f = generate(&GenSpec::new(GenKind::Lff, n, d, seed)).map_err(|e| e.to_string())?;
        let rep = report(&f);
        check(
            rep.conditions.lff,
            format!("seed {seed}: generator output is not LFF"),
        )?;
        check(
            rep.is_bearing_equivalent,
            format!("seed {seed}: LFF formation not equivalent"),
        )?;
    }
    Ok("100 LFF formations equivalent".into())
}

fn criterion_7() -> Outcome {
    let mut equivalent = 0;
    for seed in 0..200u64 {
        let f = mixed_formation(3000 + seed);
        let rep = report(&f);
        let (jt, rt) = scaled_factors(&f);
        let kr = kernel_range_intersection_dim(&jt, &rt, RANK_TOL).map_err(|e| e.to_string())?;
        check(
            (rep.is_ibr && kr == 0) == rep.is_bearing_equivalent,
            format!(
                "seed {seed}: ibr {} kr {kr} equivalent {}",
                rep.is_ibr, rep.is_bearing_equivalent
            ),
        )?;
        equivalent += rep.is_bearing_equivalent as usize;
    }
    Ok(format!(
        "200 agree ({equivalent} equivalent, {} not)",
        200 - equivalent
    ))
}

fn criterion_8() -> Outcome {
    let mut formations = vec![
        fixtures::e2(),
        fixtures::t3(),
        fixtures::c3(),
        fixtures::p3(),
        fixtures::two_leaders(),
        fixtures::ga(),
        fixtures::gc(),
        fixtures::rigid_not_equivalent(),
    ];
    formations.extend((0..200u64).map(|s| mixed_formation(4000 + s)));
    let mut worst_fact = 0.0f64;
    let mut worst_jac = 0.0f64;
    for (k, f) in formations.iter().enumerate() {
        let blocks = bearing_laplacian_blocks(f, None).map_err(|e| e.to_string())?;
        let fact = bearing_laplacian_factored(f);
        worst_fact = worst_fact.max((blocks - fact).abs().max());
        let jac = fd_jacobian(f, 1e-5);
        worst_jac = worst_jac.max((jac - bearing_rigidity_matrix(f)).abs().max());
        check(
            worst_fact <= 1e-12,
            format!("formation {k}: factorization gap {worst_fact:.2e}"),
        )?;
        check(
            worst_jac <= 1e-6,
            format!("formation {k}: Jacobian gap {worst_jac:.2e}"),
        )?;
    }
    Ok(format!(
        "{} formations, factorization gap {worst_fact:.2e}, Jacobian gap {worst_jac:.2e}",
        formations.len()
    ))
}

fn criterion_9() -> Outcome {
    let mut grown = 0;
    let mut seed = 5000u64;
    while grown < 50 {
        seed += 1;
        let f = mixed_formation(seed);
        if !report(&f).is_bearing_equivalent {
            continue;
        }
        let mut r = rng(seed);
        let n = f.vertex_count();
        let d = f.dim();
        let g = loop {
            let position: Vec<f64> = (0..d).map(|_| r.random_range(0.0..DEFAULT_BOX)).collect();
            let a = r.random_range(0..n);
            let b = (a + r.random_range(1..n)) % n;
            match f.grow(&position, &[a, b], COLLINEAR_TOL) {
                Ok(g) => break g,
                Err(Error::CollinearOutEdges | Error::CoincidentPoints { .. }) => continue,
                Err(e) => return Err(e.to_string()),
            }
        };
        let rep = report(&g);
        check(
            rep.is_bearing_equivalent && rep.dim_null_lb == d + 1,
            format!(
                "seed {seed}: grown formation equivalent {} dim Null(L_B) {}",
                rep.is_bearing_equivalent, rep.dim_null_lb
            ),
        )?;
        grown += 1;
    }
    let mut equivalent = 0;
    for s in 0..100u64 {
        let f = mixed_formation_in(6000 + s, 2);
        let before = report(&f).is_bearing_equivalent;
        let after = report(&f.lift(3).map_err(|e| e.to_string())?).is_bearing_equivalent;
        check(
            before == after,
            format!(
                "seed {}: lift changed verdict {before} -> {after}",
                6000 + s
            ),
        )?;
        equivalent += before as usize;
    }
    Ok(format!(
        "50 grown equivalent; 100 lifted preserve verdict ({equivalent} equivalent)"
    ))
}

fn criterion_10() -> Outcome {
    let target = TargetSpec::from_formation(&fixtures::t3());
    let l = target.laplacian();
    let mut failures = Vec::new();
    let mut worst_oracle = 0.0f64;
    for seed in 0..20u64 {
        let p0 = random_configuration(3, 2, seed, DEFAULT_BOX).map_err(|e| e.to_string())?;
        let tr =
            simulate(&target, &p0, &SimulationOptions::default()).map_err(|e| e.to_string())?;
        if tr.verdict != Verdict::Converged || tr.final_bearing_error() > 1e-6 {
            // bearing error of the exact flow at the same time
            let exact = expm(&(-50.0 * &l)) * p0.stacked();
            let exact_err =
                bearing_error(&Configuration::from_stacked(2, exact).unwrap(), &target).unwrap();
            failures.push(format!(
                "seed {seed}: {} with error {:.2e} (exact flow {:.2e})",
                tr.verdict,
                tr.final_bearing_error(),
                exact_err
            ));
        }
        let short = SimulationOptions {
            t_end: 1.0,
            stride: 1,
            ..SimulationOptions::default()
        };
        let tr = simulate(&target, &p0, &short).map_err(|e| e.to_string())?;
        let oracle = expm(&(-&l)) * p0.stacked();
        worst_oracle = worst_oracle.max((tr.final_state() - oracle).abs().max());
    }
    check(
        worst_oracle <= 1e-8,
        format!("RK4 vs matrix exponential at t=1: {worst_oracle:.2e}"),
    )?;

    let ga = TargetSpec::from_formation(&fixtures::ga());
    let opts = SimulationOptions {
        t_end: 400.0,
        ..SimulationOptions::default()
    };
    let mut rates = Vec::new();
    for seed in 0..5u64 {
        let p0 = random_configuration(4, 2, 100 + seed, DEFAULT_BOX).map_err(|e| e.to_string())?;
        let tr = simulate(&ga, &p0, &opts).map_err(|e| e.to_string())?;
        check(
            tr.verdict == Verdict::Diverged,
            format!("GA seed {seed}: verdict {}", tr.verdict),
        )?;
        let rate = tr.growth_rate(&ga, 200.0).map_err(|e| e.to_string())?;
        check(
            (rate / 0.0559 - 1.0).abs() <= 0.1,
            format!("GA seed {seed}: growth rate {rate}"),
        )?;
        rates.push(rate);
    }
    check(
        failures.is_empty(),
        format!(
            "T3 did not reach 1e-6 by t=50 in {}/20 seeds: {}",
            failures.len(),
            failures.join("; ")
        ),
    )?;
    Ok(format!(
        "T3 20/20 converged, oracle gap {worst_oracle:.2e}; GA diverged, rate {:.5}",
        rates[0]
    ))
}

fn criterion_11() -> Outcome {
    for seed in 0..100u64 {
        let mut r = rng(7000 + seed);
        let n = r.random_range(3..=10);
        let d = r.random_range(2..=3);
        let f = two_leader_graph(&mut r, n, d);
        check(
            f.graph().spanning_root().is_none(),
            format!("seed {seed}: has a spanning root"),
        )?;
        let rep = report(&f);
        check(
            rep.dim_null_lb > d + 1,
            format!("seed {seed}: dim Null(L_B) = {}", rep.dim_null_lb),
        )?;
    }
    Ok("100 two-leader formations, all with dim Null(L_B) > d+1".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("GA spectrum reproduction", criterion_1),
        (
            "negative eigenvalue on an equivalent formation",
            criterion_2,
        ),
        ("T3 spectrum and equivalence", criterion_3),
        ("acyclic spectra real and nonnegative", criterion_4),
        ("non-equivalence conditions I/II/III", criterion_5),
        ("LFF formations are equivalent", criterion_6),
        ("kernel-range condition matches classification", criterion_7),
        ("factorization identity and Jacobian", criterion_8),
        ("growing and lifting", criterion_9),
        ("dynamics", criterion_10),
        ("spanning root necessity", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
