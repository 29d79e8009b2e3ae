mod common;

use bearing_equiv::analysis::{classify_equivalence, Tolerances};
use bearing_equiv::dynamics::{simulate, SimulationOptions, TargetSpec, Verdict};
use bearing_equiv::fixtures;
use bearing_equiv::generate::{random_configuration, DEFAULT_BOX};
use bearing_equiv::io::{
    digest, export_trace, parse_formation, parse_report, serialize_report, ReportDocument,
};
use common::expm;

fn data(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn csv_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn t3_from_seed_1_converges() {
    let target = TargetSpec::from_formation(&fixtures::t3());
    let p0 = random_configuration(3, 2, 1, DEFAULT_BOX).unwrap();
    let tr = simulate(&target, &p0, &SimulationOptions::default()).unwrap();
    assert_eq!(tr.verdict, Verdict::Converged);
    assert!(tr.final_bearing_error() <= 1e-6);

    // half-step integration agrees
    let half = SimulationOptions {
        dt: 0.005,
        ..SimulationOptions::default()
    };
    let tr_half = simulate(&target, &p0, &half).unwrap();
    assert!((tr.final_state() - tr_half.final_state()).abs().max() <= 1e-8);

    // and so does the exact flow
    let exact = expm(&(-50.0 * target.laplacian())) * p0.stacked();
    assert!((tr.final_state() - exact).abs().max() <= 1e-8);

    let csv = export_trace(&tr);
    assert_eq!(
        csv.lines().next().unwrap(),
        "t,p_1_1,p_1_2,p_2_1,p_2_2,p_3_1,p_3_2,bearing_error"
    );
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), tr.times.len());
    assert!(rows.last().unwrap()[7] <= 1e-6);
    assert_eq!(rows.last().unwrap()[0], 50.0);
}

#[test]
fn stationary_trace_has_zero_error() {
    let f = fixtures::t3();
    let tr = simulate(
        &TargetSpec::from_formation(&f),
        f.config(),
        &SimulationOptions::default(),
    )
    .unwrap();
    assert!(csv_rows(&export_trace(&tr)).iter().all(|r| r[7] <= 1e-15));
}

#[test]
fn ga_target_diverges_at_the_negative_eigenvalue_rate() {
    let target = TargetSpec::from_formation(&fixtures::ga());
    let p0 = random_configuration(4, 2, 3, DEFAULT_BOX).unwrap();
    let opts = SimulationOptions {
        t_end: 400.0,
        ..SimulationOptions::default()
    };
    let tr = simulate(&target, &p0, &opts).unwrap();
    assert_eq!(tr.verdict, Verdict::Diverged);
    assert!(tr.spectral.has_negative_real_part);
    let rate = tr.growth_rate(&target, 200.0).unwrap();
    assert!((rate - 0.0559).abs() <= 0.1 * 0.0559, "rate {rate}");

    // state norm grows monotonically over the tail
    let rows = csv_rows(&export_trace(&tr));
    let norms: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] >= 200.0)
        .map(|r| r[1..r.len() - 1].iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    assert!(norms.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn ga_document_reports_the_negative_eigenvalue() {
    let text = data("ga.json");
    let (f, target) = parse_formation(&text).unwrap();
    assert_eq!(f, fixtures::ga());
    assert!(target.is_none());
    let report = classify_equivalence(&f, &Tolerances::default()).unwrap();
    let serialized = serialize_report(&ReportDocument::new(&report, digest(&text)));
    let doc = parse_report(&serialized).unwrap();
    assert!((doc.min_real_part + 0.0559).abs() < 1e-3);
    assert!(doc.is_bearing_equivalent);
    assert_eq!(doc.dim_null_lb, 3);
    assert_eq!(doc.spectrum.len(), 8);
}

#[test]
fn control_document_carries_its_target() {
    let (f, target) = parse_formation(&data("t3_control.json")).unwrap();
    let target = target.unwrap();
    assert_eq!(target, TargetSpec::from_formation(&fixtures::t3()));
    let tr = simulate(&target, f.config(), &SimulationOptions::default()).unwrap();
    assert_eq!(tr.verdict, Verdict::Converged);
}

#[test]
fn rigid_but_not_equivalent() {
    let r =
        classify_equivalence(&fixtures::rigid_not_equivalent(), &Tolerances::default()).unwrap();
    assert!(r.is_ibr);
    assert!(!r.kernel_equal);
    assert!(!r.is_bearing_equivalent);
    assert!(!r.conditions.thm2_condition_ii_holds);
    assert_eq!((r.dim_null_rb, r.dim_null_lb), (3, 4));
}
