mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use z2band::invariants::sewing_matrix;
use z2band::linalg::{max_abs_diff, CMatrix};
use z2band::model::{
    load_model_spec, parse_model_spec, validate_model, write_model_spec, BandSelection, Builtin, BuiltinError,
    ModelError, PhaseFunction, PhaseFunctionModel, TimeReversalOp,
};

fn models_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn mat2(a: f64, b: f64, c: f64, d: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cz(a, 0.0), cz(b, 0.0), cz(c, 0.0), cz(d, 0.0)])
}

#[test]
fn builtins_validate() {
    let cases = [
        Builtin::Phase { k: 1 }.build(1).unwrap(),
        Builtin::DVec { m: 1.0 }.build(2).unwrap(),
        Builtin::DVec { m: 3.0 }.build(2).unwrap(),
        Builtin::Flat.build(1).unwrap(),
        Builtin::Flat.build(3).unwrap(),
    ];
    for model in &cases {
        let density = if model.dim_k() == 3 { 12 } else { 32 };
        let report = validate_model(model, density);
        assert!(report.passed, "{}: {:?}", model.name(), report.failures);
    }
}

#[test]
fn builtin_registry() {
    assert_eq!(Builtin::parse("phase:k=-3").unwrap(), Builtin::Phase { k: -3 });
    assert_eq!(Builtin::parse("dvec:m=1.5").unwrap(), Builtin::DVec { m: 1.5 });
    assert_eq!(Builtin::parse("flat").unwrap(), Builtin::Flat);
    assert!(matches!(Builtin::parse("phase:k=1.5"), Err(BuiltinError::BadParameter(..))));
    assert!(matches!(Builtin::parse("haldane"), Err(BuiltinError::Unknown(_))));
    assert!(matches!(Builtin::DVec { m: 1.0 }.build(3), Err(BuiltinError::Dimension { .. })));
}

#[test]
fn phase_model_sewing_matrices() {
    let m1 = Builtin::Phase { k: 1 }.build(1).unwrap();
    assert!(max_abs_diff(&sewing_matrix(&m1, &[0.0]).unwrap(), &mat2(0.0, -1.0, 1.0, 0.0)) <= 1e-9);
    assert!(max_abs_diff(&sewing_matrix(&m1, &[PI]).unwrap(), &mat2(0.0, 1.0, -1.0, 0.0)) <= 1e-9);
    let m2 = Builtin::Phase { k: 2 }.build(1).unwrap();
    assert!(max_abs_diff(&sewing_matrix(&m2, &[0.0]).unwrap(), &mat2(0.0, -1.0, 1.0, 0.0)) <= 1e-9);
    assert!(max_abs_diff(&sewing_matrix(&m2, &[PI]).unwrap(), &mat2(0.0, -1.0, 1.0, 0.0)) <= 1e-9);
}

#[test]
fn phase_model_sewing_entries_follow_beta() {
    for k in -3..=3 {
        let model = Builtin::Phase { k }.build(1).unwrap();
        for x in [-2.5, -1.0, 0.3, 1.9, 3.0] {
            let w = sewing_matrix(&model, &[x]).unwrap();
            let w12 = -cz(0.0, k as f64 * x).exp();
            let w21 = cz(0.0, -k as f64 * x).exp();
            assert!((w[(0, 1)] - w12).norm() < 1e-12 && (w[(1, 0)] - w21).norm() < 1e-12, "k = {k}, x = {x}");
            assert!(w[(0, 0)].norm() < 1e-12 && w[(1, 1)].norm() < 1e-12);
        }
    }
}

#[test]
fn refined_constraint() {
    assert!(PhaseFunctionModel::new(PhaseFunction::Polynomial(vec![0.2, 3.0])).is_ok());
    assert!(matches!(
        PhaseFunctionModel::new(PhaseFunction::Polynomial(vec![0.0, 0.5])),
        Err(ModelError::InvalidPhaseFunction { .. })
    ));
    let table = PhaseFunction::Tabulated(vec![(0.0, 0.0), (1.0, 2.0), (PI, 2.0 * PI)]);
    assert_eq!(PhaseFunctionModel::new(table).unwrap().winding(), 2);
}

#[test]
fn kramers_degeneracy_at_trims() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let model = perturb(&Builtin::DVec { m: 1.0 }.build(2).unwrap(), &mut rng, 0.4);
    for k in [[0.0, 0.0], [0.0, PI], [PI, 0.0], [PI, PI]] {
        let (e, _) = eigh(&model.hamiltonian(&k).unwrap());
        assert!((e[1] - e[0]).abs() < 1e-10 && (e[3] - e[2]).abs() < 1e-10);
        let frame = model.occupied_frame(&k).unwrap().states;
        let w = sewing_matrix(&model, &k).unwrap();
        assert!(max_abs_diff(&w, &(-w.transpose())) < 1e-10);
        assert!(max_abs_diff(&(frame.adjoint() * &frame), &CMatrix::identity(2, 2)) < 1e-12);
    }
}

#[test]
fn frames_are_deterministic() {
    let model = Builtin::DVec { m: 1.3 }.build(2).unwrap();
    for k in uniform_points() {
        assert_eq!(model.occupied_frame(&k).unwrap(), model.occupied_frame(&k).unwrap());
    }
}

fn uniform_points() -> Vec<Vec<f64>> {
    z2band::model::uniform_grid(2, 8)
}

#[test]
fn lower_half_selection_needs_a_sector() {
    let flat = Builtin::Flat.build(2).unwrap();
    assert!(matches!(flat.frame(&[0.1, 0.2], BandSelection::LowerHalf), Err(ModelError::NoHalfSector)));
    let dvec = Builtin::DVec { m: 1.0 }.build(2).unwrap();
    assert_eq!(dvec.frame(&[0.1, 0.2], BandSelection::LowerHalf).unwrap().ncols(), 1);
}

#[test]
fn broken_fixture_names_displacement() {
    match load_model_spec(models_dir().join("broken.tb")) {
        Err(ModelError::HermiticityViolation { displacement }) => assert_eq!(displacement, vec![1]),
        other => panic!("expected a hermiticity violation, got {other:?}"),
    }
}

#[test]
fn gapless_fixture_fails_validation() {
    let model = load_model_spec(models_dir().join("gapless.tb")).unwrap();
    let report = validate_model(&model, 32);
    assert!(!report.passed);
    // bands ±cos k touch where cos k = 0
    let oracle = (0..32).map(|i| 2.0 * (2.0 * PI * i as f64 / 32.0).cos().abs()).fold(f64::INFINITY, f64::min);
    assert!((report.min_gap.unwrap() - oracle).abs() < 1e-12);
    assert!(report.failures.iter().any(|f| f.contains("min gap")));
    assert!(matches!(model.occupied_frame(&[PI / 2.0]), Err(ModelError::GapClosed { .. })));
}

#[test]
fn fixtures_round_trip() {
    for name in ["dvec_m1.tb", "dirac3d_strong.tb", "dirac3d_weak.tb"] {
        let model = load_model_spec(models_dir().join(name)).unwrap();
        let again = parse_model_spec(&write_model_spec(&model), name).unwrap();
        assert_eq!(again.hoppings(), model.hoppings());
        assert!(validate_model(&model, 8).passed, "{name}");
    }
    let file = load_model_spec(models_dir().join("dvec_m1.tb")).unwrap();
    let builtin = Builtin::DVec { m: 1.0 }.build(2).unwrap();
    assert_eq!(file.hoppings(), builtin.hoppings());
}

#[test]
fn theta_must_square_to_minus_one() {
    assert!(matches!(TimeReversalOp::new(CMatrix::identity(2, 2)), Err(ModelError::ThetaInvalid(_))));
    assert!(matches!(TimeReversalOp::new(mat2(0.0, 2.0, -2.0, 0.0)), Err(ModelError::ThetaInvalid(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_models_are_time_reversal_invariant(seed in any::<u64>(), kx in -PI..PI, ky in -PI..PI) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = perturb(&Builtin::DVec { m: 3.0 }.build(2).unwrap(), &mut rng, 0.5);
        let h = model.hamiltonian(&[kx, ky]).unwrap();
        let hm = model.hamiltonian(&[-kx, -ky]).unwrap();
        prop_assert!(max_abs_diff(&model.theta().conjugate(&h), &hm) < 1e-12);
        prop_assert!(max_abs_diff(&h, &h.adjoint()) < 1e-12);
    }
}
