mod common;

use jetfol::algebra::{GaussianRational, MultiPoly};
use jetfol::atlas::SplittingData;
use jetfol::exec::Exec;
use jetfol::jet::{classify_field, jet_bracket, IdealSpec, JetClass};
use jetfol::oracle::{contour_residue_numeric, contour_residue_numeric_with, ContourSpec};
use jetfol::residue::{
    bott_difference_form_2d, chart_residues, connection_matrix_2d, flatness_check, kls_residue, kls_residue_batch,
    transversal_residue, universal_connection_apply, FieldMode, MeromorphicForm1D, SurfaceFieldInput,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{deep, expected_residue, in_ideal, oracle_friendly_input, poly, residue_corpus, surface_input};

fn x_is_zero(p: &MultiPoly) -> MultiPoly {
    p.vanish_at(&[0])
}

fn close(z: num_complex::Complex64, want: &GaussianRational, tol: f64) -> bool {
    let w = want.to_complex64();
    (z.re - w.re).abs() <= tol && (z.im - w.im).abs() <= tol
}

#[test]
fn corpus_forms_match_closed_formulas() {
    for case in residue_corpus() {
        let input = case.input();
        let (a, b) = (input.a(), input.b());
        let ax = x_is_zero(&a.partial_derivative("x").unwrap());
        let by = x_is_zero(&b.partial_derivative("y").unwrap());
        let b0 = x_is_zero(b);
        let conn = MeromorphicForm1D::new(-&ax, b0.clone()).unwrap();
        let bott = MeromorphicForm1D::new(&ax + &by, b0).unwrap();
        assert!(connection_matrix_2d(&input).unwrap().same_form(&conn), "{}", case.name);
        assert!(bott_difference_form_2d(&input).unwrap().same_form(&bott), "{}", case.name);
        let r = kls_residue(&input).unwrap();
        assert_eq!(r, case.expected(), "{}", case.name);
        assert_eq!(r, expected_residue(a, b), "{}", case.name);
    }
}

#[test]
fn corpus_agrees_with_oracle() {
    for case in residue_corpus() {
        let z = contour_residue_numeric(&case.input(), ContourSpec::default()).unwrap();
        assert!(close(z, &case.expected(), 1e-8), "{}: {}", case.name, z);
        assert!(z.im.abs() <= 1e-9, "{}", case.name);
    }
}

#[test]
fn batch_modes_agree() {
    let inputs: Vec<SurfaceFieldInput> = residue_corpus().iter().map(|c| c.input()).collect();
    let seq: Vec<_> = kls_residue_batch(&inputs, Exec::Sequential).into_iter().map(Result::unwrap).collect();
    let par: Vec<_> = kls_residue_batch(&inputs, Exec::Parallel).into_iter().map(Result::unwrap).collect();
    assert_eq!(seq, par);
    let spec = ContourSpec::default();
    for i in &inputs {
        let a = contour_residue_numeric_with(i, spec, Exec::Sequential).unwrap();
        let b = contour_residue_numeric_with(i, spec, Exec::Parallel).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn euler_field_on_two_charts() {
    let v = SurfaceFieldInput::parse("0", "y", FieldMode::Tangential).unwrap();
    for d in 0..=3u32 {
        let r = chart_residues(&v, d).unwrap();
        assert_eq!(r.first, GaussianRational::from_int(1));
        assert_eq!(r.second, GaussianRational::from_int(d as i64 + 1));
        assert_eq!(r.total(), GaussianRational::from_int(d as i64 + 2));
    }
}

#[test]
fn mode_is_enforced() {
    let t = SurfaceFieldInput::parse("1 + x", "y", FieldMode::Transversal).unwrap();
    assert!(kls_residue(&t).is_err());
    assert!(SurfaceFieldInput::parse("1 + x", "y", FieldMode::Tangential).is_err());
    let z = SurfaceFieldInput::parse("x", "x*y", FieldMode::Tangential).unwrap();
    assert!(kls_residue(&z).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn residue_matches_dense_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = surface_input(&mut rng, FieldMode::Tangential);
        prop_assert_eq!(kls_residue(&input).unwrap(), expected_residue(input.a(), input.b()));
    }

    #[test]
    fn residue_matches_contour(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = oracle_friendly_input(&mut rng);
        let exact = kls_residue(&input).unwrap();
        let z = contour_residue_numeric(&input, ContourSpec::default()).unwrap();
        prop_assert!(close(z, &exact, 1e-8), "{} vs {}", z, exact);
        prop_assert!(z.im.abs() <= 1e-9);
        let z2 = contour_residue_numeric(&input, ContourSpec::new(0.5, 1024).unwrap()).unwrap();
        prop_assert!((z - z2).norm() <= 1e-9);
    }

    #[test]
    fn transversal_matches_closed_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = surface_input(&mut rng, FieldMode::Transversal);
        let data = SplittingData::local(&SurfaceFieldInput::ideal());
        let r = transversal_residue(&input, &data, "local").unwrap();
        prop_assert_eq!(&r, &expected_residue(input.a(), input.b()));
        let x = MultiPoly::var(input.a().vars(), "x").unwrap();
        let bumped = input.a() + &(&x.pow(2) * &poly(&mut rng, input.a().vars(), 3, 3));
        let other = SurfaceFieldInput::new(bumped, input.b().clone(), FieldMode::Transversal).unwrap();
        prop_assert_eq!(transversal_residue(&other, &data, "local").unwrap(), r);
    }

    #[test]
    fn curvature_vanishes_in_the_plane(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = surface_input(&mut rng, FieldMode::Tangential).jet().unwrap();
        let v = surface_input(&mut rng, FieldMode::Tangential).jet().unwrap();
        let k = flatness_check(&u, &v, &["y".to_string()]).unwrap();
        prop_assert!(k.iter().flatten().all(JetClass::is_zero));
    }

    #[test]
    fn curvature_vanishes_with_transverse_directions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let id = IdealSpec::new(&["x", "w"], &["y", "z"], 1).unwrap();
        let fol = vec!["y".to_string()];
        let mut field = || {
            let reps = vec![
                in_ideal(&mut rng, &id, 2, 3),
                in_ideal(&mut rng, &id, 2, 3),
                poly(&mut rng, id.vars(), 3, 4),
                in_ideal(&mut rng, &id, 2, 3),
            ];
            classify_field(&reps, &id).unwrap()
        };
        let u = field();
        let v = field();
        prop_assert!(jet_bracket(&u, &v).unwrap().status().is_logarithmic());
        let k = flatness_check(&u, &v, &fol).unwrap();
        prop_assert!(k.iter().flatten().all(JetClass::is_zero));
    }

    #[test]
    fn connection_ignores_second_order_terms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let id = IdealSpec::new(&["x"], &["y", "z"], 1).unwrap();
        let reps = vec![
            in_ideal(&mut rng, &id, 3, 3),
            poly(&mut rng, id.vars(), 3, 3),
            in_ideal(&mut rng, &id, 3, 3),
        ];
        let v = classify_field(&reps, &id).unwrap();
        let fol = vec!["y".to_string()];
        for t in ["x", "z"] {
            let got = universal_connection_apply(&v, t, &fol).unwrap();
            for (h, r) in [("x", &reps[0]), ("z", &reps[2])] {
                let raw = x_is_zero(&(r + &deep(&mut rng, &id, 2, 2)).partial_derivative(t).unwrap());
                prop_assert_eq!(got[h].rep(), &-&raw);
            }
        }
    }
}
