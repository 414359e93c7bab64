use hamlower_core::adiabatic::{
    eval_path, forbidden_penalty, gadgetize_path, gap_scan, gap_scan_on, GapScanConfig, ParticleState, PolyPath,
    PARTICLE_ENCODING,
};
use hamlower_core::gadget::{apply_round_with, CoefficientSplit, GadgetJob};
use hamlower_core::pauli::{Hamiltonian, PauliString};
use hamlower_core::spectral::dense_eigenvalues;
use hamlower_core::Error;

fn h(n: usize, terms: &[(f64, &str)]) -> Hamiltonian<f64> {
    Hamiltonian::from_terms(n, terms.iter().map(|(c, s)| (*c, s.parse::<PauliString>().unwrap()))).unwrap()
}

/// `(1 − s)(I − X)/2 + s(I − Z)/2`.
fn toy() -> PolyPath<f64> {
    PolyPath::interpolate(&h(1, &[(0.5, "I"), (-0.5, "X0")]), &h(1, &[(0.5, "I"), (-0.5, "Z0")])).unwrap()
}

#[test]
fn eval_hits_the_end_points_and_midpoint() {
    let p = toy();
    assert_eq!(p.degree(), 1);
    assert_eq!(eval_path(&p, 0.0).unwrap(), p.component(0));
    assert_eq!(eval_path(&p, 1.0).unwrap(), p.component(0).add(&p.component(1)));
    let mid = eval_path(&p, 0.5).unwrap();
    assert_eq!(mid, h(1, &[(0.5, "I"), (-0.25, "X0"), (-0.25, "Z0")]));
    assert!(matches!(eval_path(&p, 1.5), Err(Error::OutOfRange(_))));
    assert!(matches!(eval_path(&p, -1e-9), Err(Error::OutOfRange(_))));
    assert!(matches!(eval_path(&p, f64::NAN), Err(Error::OutOfRange(_))));
}

#[test]
fn toy_gap_minimum_is_one_over_root_two() {
    let scan = gap_scan(&toy(), &GapScanConfig::default()).unwrap();
    assert!((scan.min_gap - 0.5f64.sqrt()).abs() < 1e-9, "{}", scan.min_gap);
    assert!((scan.argmin - 0.5).abs() < 1e-9);
    for p in &scan.curve {
        let s = p.s;
        let exact = ((1.0 - s).powi(2) + s * s).sqrt();
        assert!((p.gap - exact).abs() < 1e-10);
    }
    assert!(scan.undersampled.is_empty());
}

#[test]
fn constant_path_has_a_flat_curve_and_stays_degree_zero() {
    let p = PolyPath::constant(h(2, &[(1.0, "Z0Z1"), (0.3, "X0")]));
    let scan = gap_scan_on(&p, &[0.0, 0.25, 0.5, 1.0], &GapScanConfig::default()).unwrap();
    assert!(scan.curve.windows(2).all(|w| (w[0].gap - w[1].gap).abs() < 1e-12));
    let jobs = [GadgetJob::Subdivide { term: "Z0Z1".parse().unwrap(), left: vec![0] }];
    let (out, ledger) = gadgetize_path(&p, &jobs, 100.0).unwrap();
    assert_eq!((ledger.degree_in, ledger.degree_out), (0, 0));
    assert_eq!(out.degree(), 0);
}

#[test]
fn degenerate_levels_are_flagged() {
    let p = PolyPath::constant(h(2, &[(1.0, "Z0")]));
    let scan = gap_scan_on(&p, &[0.0, 1.0], &GapScanConfig::default()).unwrap();
    assert!(scan.curve.iter().all(|g| g.degenerate && g.gap == 0.0));
}

fn linear_four_local() -> PolyPath<f64> {
    let start = h(4, &[(-1.0, "X0"), (-1.0, "X1"), (-1.0, "X2"), (-1.0, "X3")]);
    let end = h(4, &[(-1.0, "Z0Z1Z2Z3"), (0.2, "Z0")]);
    PolyPath::interpolate(&start, &end).unwrap()
}

#[test]
fn symbolic_round_matches_pointwise_round() {
    let p = linear_four_local();
    let jobs = [GadgetJob::Subdivide { term: "Z0Z1Z2Z3".parse().unwrap(), left: vec![0, 1] }];
    let (q, _) = gadgetize_path(&p, &jobs, 50.0).unwrap();
    for s in [0.0, 0.5, 1.0] {
        let at = eval_path(&p, s).unwrap();
        if at.coeff_of(&"Z0Z1Z2Z3".parse().unwrap()) == 0.0 {
            continue;
        }
        let direct = apply_round_with(&at, &jobs, 50.0, None, CoefficientSplit::Literal).unwrap();
        let diff = eval_path(&q, s).unwrap().max_coeff_diff(&direct.emitted());
        assert!(diff < 1e-9, "s = {s}: {diff}");
    }
}

#[test]
fn two_round_pipeline_at_most_doubles_degree() {
    let p = linear_four_local();
    let split = GadgetJob::Subdivide { term: "Z0Z1Z2Z3".parse().unwrap(), left: vec![0, 1] };
    let (p1, l1) = gadgetize_path(&p, &[split], 1e3).unwrap();
    assert_eq!((l1.degree_in, l1.degree_out), (1, 2));
    assert!(l1.degree_ok());
    // Both halves of the coupling are 3-local; lower them in one parallel round.
    let jobs = [
        GadgetJob::ThreeToTwo { term: "Z0Z1X4".parse().unwrap() },
        GadgetJob::ThreeToTwo { term: "Z2Z3X4".parse().unwrap() },
    ];
    let (p2, l2) = gadgetize_path(&p1, &jobs, 1e6).unwrap();
    assert!(l2.degree_ok(), "{} -> {}", l2.degree_in, l2.degree_out);
    assert!(l2.degree_out <= 4);
    assert_eq!(l2.mediators, vec![5, 6]);
    assert!(p2.components().iter().all(|h| h.locality() <= 2));
    assert!(l2.norms_out.iter().all(|x| x.is_finite()));
}

#[test]
fn three_to_two_round_matches_pointwise() {
    let start = h(3, &[(-1.0, "X0"), (-1.0, "X1"), (-1.0, "X2")]);
    let end = h(3, &[(0.7, "Z0Z1Z2")]);
    let p = PolyPath::interpolate(&start, &end).unwrap();
    let jobs = [GadgetJob::ThreeToTwo { term: "Z0Z1Z2".parse().unwrap() }];
    let (q, _) = gadgetize_path(&p, &jobs, 1e3).unwrap();
    for s in [0.5, 1.0] {
        let direct = apply_round_with(&eval_path(&p, s).unwrap(), &jobs, 1e3, None, CoefficientSplit::Literal).unwrap();
        let diff = eval_path(&q, s).unwrap().max_coeff_diff(&direct.emitted());
        assert!(diff < 1e-8, "s = {s}: {diff}");
    }
}

#[test]
fn gadgetized_toy_keeps_its_gap() {
    let start = h(2, &[(-0.5, "X0"), (-0.5, "X1")]);
    let end = h(2, &[(-1.0, "Z0Z1"), (-0.3, "Z0")]);
    let p = PolyPath::interpolate(&start, &end).unwrap();
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let cfg = GapScanConfig { refine_to: 1e-3, ..Default::default() };
    let before = gap_scan_on(&p, &grid, &cfg).unwrap();
    let jobs = [GadgetJob::Subdivide { term: "Z0Z1".parse().unwrap(), left: vec![0] }];
    let (q, _) = gadgetize_path(&p, &jobs, 1e4).unwrap();
    let after = gap_scan_on(&q, &grid, &cfg).unwrap();
    let ratio = after.min_gap / before.min_gap;
    assert!((0.5..=2.0).contains(&ratio), "{} vs {}", after.min_gap, before.min_gap);
}

#[test]
fn rejects_missing_terms_and_overlaps() {
    let p = linear_four_local();
    let missing = [GadgetJob::Subdivide { term: "X0X1".parse().unwrap(), left: vec![0] }];
    assert!(matches!(gadgetize_path(&p, &missing, 10.0), Err(Error::NotFactorable(_))));
    let t: PauliString = "Z0Z1Z2Z3".parse().unwrap();
    let twice = [
        GadgetJob::Subdivide { term: t.clone(), left: vec![0] },
        GadgetJob::Subdivide { term: t, left: vec![0, 1] },
    ];
    assert!(matches!(gadgetize_path(&p, &twice, 10.0), Err(Error::OverlappingJobs(_))));
    assert!(matches!(gadgetize_path(&p, &[], -1.0), Err(Error::InvalidParameter(_))));
}

#[test]
fn path_json_round_trips() {
    let p = linear_four_local();
    let text = serde_json::to_string(&p).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["num_qubits"], 4);
    assert_eq!(v["components"][1]["degree"], 1);
    let back: PolyPath<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
}

#[test]
fn csv_has_the_expected_columns() {
    let scan = gap_scan_on(&toy(), &[0.0, 1.0], &GapScanConfig { refine_to: 0.2, ..Default::default() }).unwrap();
    let mut buf = Vec::new();
    scan.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,lambda0,lambda1,gap"));
    assert_eq!(lines.count(), scan.curve.len());
}

#[test]
fn penalty_lifts_only_the_two_unused_patterns() {
    let pen = forbidden_penalty(3, [0, 1, 2], 2.0).unwrap();
    assert!(pen.is_diagonal());
    // Basis index bit q is qubit q; kets list qubits[0] first.
    let index = |b: [bool; 3]| b.iter().enumerate().map(|(q, &x)| (x as usize) << q).sum::<usize>();
    let m = pen.to_real_matrix_capped(3).unwrap();
    for (_, bits) in PARTICLE_ENCODING {
        assert_eq!(m[(index(bits), index(bits))], 0.0);
    }
    assert_eq!(m[(index([false, false, true]), index([false, false, true]))], 2.0);
    assert_eq!(m[(index([true, true, true]), index([true, true, true]))], 2.0);
    assert_eq!(dense_eigenvalues(&pen, 3).unwrap().iter().filter(|&&x| x > 1.0).count(), 2);
    assert_eq!(ParticleState::decode([false, true, true]), Some(ParticleState::First(true)));
    assert_eq!(ParticleState::Dead.bits(), [true, true, false]);
    assert!(forbidden_penalty::<f64>(3, [0, 0, 2], 1.0).is_err());
}

#[test]
fn works_in_single_precision() {
    let p = PolyPath::<f32>::interpolate(
        &Hamiltonian::from_terms(1, [(-0.5f32, "X0".parse().unwrap())]).unwrap(),
        &Hamiltonian::from_terms(1, [(-0.5f32, "Z0".parse().unwrap())]).unwrap(),
    )
    .unwrap();
    let scan = gap_scan(&p, &GapScanConfig::default()).unwrap();
    assert!((scan.min_gap - 0.5f32.sqrt()).abs() < 1e-5);
}
