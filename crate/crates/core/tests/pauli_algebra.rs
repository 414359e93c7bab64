use hamlower_core::pauli::{self, square_half_difference, Axis, NormMode, PauliString};
use hamlower_core::Hamiltonian;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn all_strings(n: usize) -> Vec<PauliString> {
    (0..4usize.pow(n as u32))
        .map(|code| {
            let mut s = PauliString::identity();
            for q in 0..n {
                let a = match code / 4usize.pow(q as u32) % 4 {
                    0 => None,
                    1 => Some(Axis::X),
                    2 => Some(Axis::Y),
                    _ => Some(Axis::Z),
                };
                s.set(q, a);
            }
            s
        })
        .collect()
}

fn mat(n: usize, s: &PauliString) -> DMatrix<Complex64> {
    Hamiltonian::from_terms(n, [(1.0, s.clone())]).unwrap().to_matrix().unwrap()
}

#[test]
fn products_match_matrices_exactly() {
    for n in 1..=3 {
        let strings = all_strings(n);
        let mats: Vec<_> = strings.iter().map(|s| mat(n, s)).collect();
        for (i, p) in strings.iter().enumerate() {
            for (j, q) in strings.iter().enumerate() {
                let (ph, r) = p.multiply(q);
                let (a, b) = ph.value();
                let want = &mats[i] * &mats[j];
                let got = mat(n, &r) * Complex64::new(a as f64, b as f64);
                assert_eq!(want, got, "{p} * {q}");
            }
        }
    }
}

#[test]
fn multiply_examples() {
    let x0 = PauliString::single(0, Axis::X);
    let z0 = PauliString::single(0, Axis::Z);
    let z1 = PauliString::single(1, Axis::Z);
    let (ph, s) = x0.multiply(&z0);
    assert_eq!(ph.value(), (0, -1));
    assert_eq!(s, PauliString::single(0, Axis::Y));
    let (ph, s) = z0.multiply(&z0);
    assert_eq!(ph.value(), (1, 0));
    assert!(s.is_identity());
    let (ph, s) = x0.multiply(&z1);
    assert_eq!(ph.value(), (1, 0));
    assert_eq!(s, PauliString::from_pairs([(0, Axis::X), (1, Axis::Z)]).unwrap());
}

#[test]
fn canonicalize_examples() {
    let zz = PauliString::from_pairs([(0, Axis::Z), (1, Axis::Z)]).unwrap();
    let h = Hamiltonian::from_terms(2, [(0.5, zz.clone()), (0.5, zz.clone())]).unwrap();
    assert_eq!(h.terms().len(), 1);
    assert_eq!(h.coeff_of(&zz), 1.0);
    let tiny = Hamiltonian::from_terms(1, [(1e-15, PauliString::single(0, Axis::X))]).unwrap();
    assert!(tiny.is_empty());
    let z0 = PauliString::single(0, Axis::Z);
    assert!(Hamiltonian::from_terms(1, [(1.0, z0.clone()), (-1.0, z0)]).unwrap().is_empty());
    // A larger explicit threshold drops more.
    let h2 = Hamiltonian::from_terms(2, [(1e-6, PauliString::single(1, Axis::X))]).unwrap();
    assert_eq!(h2.len(), 1);
    assert!(h2.canonicalize(1e-5).is_empty());
}

#[test]
fn square_half_difference_examples() {
    let a = Hamiltonian::term(2, 1.0, &[(0, Axis::Z)]).unwrap();
    let b = Hamiltonian::term(2, 1.0, &[(1, Axis::Z)]).unwrap();
    let r = square_half_difference(&a, &b);
    assert_eq!(r.len(), 2);
    assert_eq!(r.identity_coeff(), 1.0);
    assert_eq!(r.coeff_of(&PauliString::from_pairs([(0, Axis::Z), (1, Axis::Z)]).unwrap()), -1.0);

    let x = Hamiltonian::term(1, 1.0, &[(0, Axis::X)]).unwrap();
    assert!(square_half_difference(&x, &x).is_empty());

    let y = Hamiltonian::term(1, 1.0, &[(0, Axis::Y)]).unwrap();
    let r = square_half_difference(&x, &y);
    assert_eq!(r.len(), 1);
    assert_eq!(r.identity_coeff(), 1.0);
}

#[test]
fn norm_examples() {
    let zz = Hamiltonian::term(2, 1.0, &[(0, Axis::Z), (1, Axis::Z)]).unwrap();
    assert!((zz.norm(NormMode::Exact).unwrap() - 1.0).abs() < 1e-12);
    let xz = Hamiltonian::term(1, 1.0, &[(0, Axis::X)])
        .unwrap()
        .add(&Hamiltonian::term(1, 1.0, &[(0, Axis::Z)]).unwrap());
    assert_eq!(xz.norm(NormMode::UpperBound).unwrap(), 2.0);
    assert!((xz.norm(NormMode::Exact).unwrap() - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn works_in_single_precision() {
    let a = pauli::Hamiltonian::<f32>::term(2, 1.0, &[(0, Axis::Z)]).unwrap();
    let b = pauli::Hamiltonian::<f32>::term(2, 1.0, &[(1, Axis::Z)]).unwrap();
    let r = square_half_difference(&a, &b);
    assert_eq!(r.identity_coeff(), 1.0f32);
    let e = r.norm(NormMode::Exact).unwrap();
    assert!((e - 2.0).abs() < 1e-5);
}

fn arb_hamiltonian(n: usize, max_terms: usize) -> impl Strategy<Value = Hamiltonian> {
    prop::collection::vec((-2.0f64..2.0, prop::collection::vec(0u8..4, n)), 0..max_terms).prop_map(
        move |terms| {
            Hamiltonian::from_terms(
                n,
                terms.into_iter().map(|(c, codes)| {
                    let mut s = PauliString::identity();
                    for (q, code) in codes.into_iter().enumerate() {
                        s.set(q, [None, Some(Axis::X), Some(Axis::Y), Some(Axis::Z)][code as usize]);
                    }
                    (c, s)
                }),
            )
            .unwrap()
        },
    )
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_matches_dense(h in arb_hamiltonian(3, 12), re in prop::collection::vec(-1.0f64..1.0, 8), im in prop::collection::vec(-1.0f64..1.0, 8)) {
        let v: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let got = h.apply(&v).unwrap();
        let want = h.to_matrix().unwrap() * nalgebra::DVector::from_vec(v.clone());
        let scale = want.norm().max(1.0);
        for (g, w) in got.iter().zip(want.iter()) {
            prop_assert!((g - w).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn square_half_difference_matches_dense(a in arb_hamiltonian(4, 6), b in arb_hamiltonian(4, 6)) {
        let r = square_half_difference(&a, &b).to_matrix().unwrap();
        let d = b.to_matrix().unwrap() - a.to_matrix().unwrap();
        let want = &d * &d * Complex64::new(0.5, 0.0);
        prop_assert!(max_abs(&(r - want)) <= 1e-12 * (1.0 + max_abs(&d).powi(2)) * 16.0);
    }

    #[test]
    fn canonicalize_is_idempotent(h in arb_hamiltonian(3, 10), thr in 0.0f64..0.5) {
        let once = h.canonicalize(thr);
        prop_assert_eq!(once.canonicalize(thr), once.clone());
        let diff = max_abs(&(once.to_matrix().unwrap() - h.to_matrix().unwrap()));
        prop_assert!(diff <= thr * h.len() as f64 + 1e-12);
    }

    #[test]
    fn upper_bound_dominates_exact(h in arb_hamiltonian(4, 10)) {
        let ub = h.norm(NormMode::UpperBound).unwrap();
        let ex = h.norm(NormMode::Exact).unwrap();
        prop_assert!(ub + 1e-12 >= ex);
    }

    #[test]
    fn json_round_trip(h in arb_hamiltonian(3, 10)) {
        let text = serde_json::to_string(&h).unwrap();
        let back = Hamiltonian::from_json_str(&text).unwrap();
        prop_assert_eq!(back, h);
    }
}

#[test]
fn strings_parse_from_their_display_form() {
    let s: PauliString = "X0 Z3".parse().unwrap();
    assert_eq!(s, PauliString::from_pairs([(0, Axis::X), (3, Axis::Z)]).unwrap());
    assert_eq!(s.to_string().parse::<PauliString>().unwrap(), s);
    assert_eq!("Z0Z12".parse::<PauliString>().unwrap().support(), vec![0, 12]);
    assert!("I".parse::<PauliString>().unwrap().is_identity());
    assert!("Q1".parse::<PauliString>().is_err());
    assert!("X".parse::<PauliString>().is_err());
    assert!("X0X0".parse::<PauliString>().is_err());
}
