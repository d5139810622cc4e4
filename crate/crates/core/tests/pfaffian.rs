mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use z2band::linalg::CMatrix;
use z2band::pfaffian::{pfaffian, track_sqrt_det, PfaffianError, SkewMatrix};

fn pf(m: &CMatrix) -> Complex64 {
    pfaffian(&SkewMatrix::new(m.clone()).unwrap())
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn square_is_determinant(seed in any::<u64>(), half in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_skew(&mut rng, 2 * half);
        let p = pf(&m);
        prop_assert!(rel(p * p, m.determinant()) <= 1e-9);
    }

    #[test]
    fn congruence(seed in any::<u64>(), half in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * half;
        let m = random_skew(&mut rng, n);
        let b = random_matrix(&mut rng, n, 1.0);
        let lhs = pf(&(&b * &m * b.transpose()));
        let rhs = b.determinant() * pf(&m);
        prop_assert!(rel(lhs, rhs) <= 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn agrees_with_matchings(seed in any::<u64>(), half in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_skew(&mut rng, 2 * half);
        prop_assert!(rel(pf(&m), pf_matching(&m)) <= 1e-9);
    }

    #[test]
    fn real_matrices_have_real_pfaffians(seed in any::<u64>(), half in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_skew(&mut rng, 2 * half).map(|z| Complex64::new(z.re, 0.0));
        let p = pf(&m);
        let oracle = pf_matching(&m);
        prop_assert!(p.im.abs() <= 1e-12 * (1.0 + p.norm()));
        prop_assert_eq!(p.re > 0.0, oracle.re > 0.0);
    }
}

#[test]
fn block_diagonal_products() {
    let mut m = CMatrix::zeros(6, 6);
    for (b, a) in [(0, 2.0), (2, -0.5), (4, 3.0)] {
        m[(b, b + 1)] = cz(a, 0.0);
        m[(b + 1, b)] = cz(-a, 0.0);
    }
    assert!((pf(&m) - cz(-3.0, 0.0)).norm() < 1e-14);
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(SkewMatrix::new(CMatrix::zeros(3, 3)), Err(PfaffianError::OddDimension(3))));
    assert!(matches!(SkewMatrix::new(CMatrix::zeros(2, 4)), Err(PfaffianError::NotSquare(2, 4))));
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = cz(1.0, 0.0);
    m[(1, 0)] = cz(1.0, 0.0);
    assert!(matches!(SkewMatrix::new(m), Err(PfaffianError::NotSkewSymmetric { .. })));
}

#[test]
fn branch_follows_unit_circle() {
    let n = 200;
    let dets: Vec<Complex64> = (0..=n).map(|j| Complex64::from_polar(2.0, 4.0 * std::f64::consts::PI * j as f64 / n as f64)).collect();
    let trace = track_sqrt_det(&dets, cz(2f64.sqrt(), 0.0), true).unwrap();
    assert!(trace.winding_ok);
    for (j, s) in trace.samples.iter().enumerate() {
        let expected = Complex64::from_polar(2f64.sqrt(), 2.0 * std::f64::consts::PI * j as f64 / n as f64);
        assert!((s.sqrt_det - expected).norm() < 1e-12);
    }
    assert!((trace.last_sqrt() - cz(2f64.sqrt(), 0.0)).norm() < 1e-12);
}

#[test]
fn branch_refuses_half_turn_jumps() {
    let dets = [cz(1.0, 0.0), cz(-1.0, 0.0)];
    assert!(matches!(track_sqrt_det(&dets, cz(1.0, 0.0), true), Err(PfaffianError::BranchAmbiguous { index: 0, .. })));
    assert!(!track_sqrt_det(&dets, cz(1.0, 0.0), false).unwrap().winding_ok);
    assert!(matches!(track_sqrt_det(&dets, cz(0.0, 1.0), true), Err(PfaffianError::InvalidInitialBranch { .. })));
    assert!(matches!(track_sqrt_det(&[], cz(1.0, 0.0), true), Err(PfaffianError::EmptyPath)));
}
