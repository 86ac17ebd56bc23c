mod common;

use lar_core::linalg::*;
use lar_core::rng::{Family, LarRng};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn split_property_over_seeds() {
    for seed in 0..100 {
        let v = LarRng::new(seed).matrix(5, 5) * 3.0;
        let (s, f) = sym_skew_split(&v).unwrap();
        assert_eq!((&s - s.transpose()).norm(), 0.0);
        assert_eq!((&f + f.transpose()).norm(), 0.0);
        assert!((&s + &f - &v).norm() <= 1e-15 * v.norm());
    }
}

#[test]
fn expm_matches_ode_oracle() {
    for seed in 0..10 {
        let a = LarRng::new(seed).matrix(4, 4);
        let e = expm(&a, 1.0).unwrap();
        let o = common::expm_oracle(&a, 1.0);
        assert!(common::rel(&e, &o) < 1e-9, "seed {seed}: {}", common::rel(&e, &o));
    }
}

#[test]
fn expm_semigroup() {
    let mut r = LarRng::new(2024);
    for _ in 0..50 {
        let n = 2 + (r.range(0.0, 4.999) as usize);
        let a = r.matrix(n, n);
        let s = r.range(-2.0, 2.0);
        let t = r.range(-2.0, 2.0);
        let lhs = expm(&a, s).unwrap() * expm(&a, t).unwrap();
        let rhs = expm(&a, s + t).unwrap();
        assert!((lhs - &rhs).norm() <= 1e-10 * rhs.norm());
    }
}

#[test]
fn sym_eig_reconstruction() {
    for seed in 0..30 {
        let s = LarRng::new(seed).family(Family::Symmetric, 6, 4.0);
        let e = sym_eig(&s).unwrap();
        let q = &e.vectors;
        assert!((q.transpose() * q - RMat::identity(6, 6)).norm() <= 1e-12);
        let rec = q * RMat::from_diagonal(&e.values) * q.transpose();
        assert!((rec - &s).norm() <= 1e-11 * s.norm());
        assert!(e.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn general_eig_trace_det() {
    let mut complex_seen = 0;
    for seed in 0..40 {
        let v = LarRng::new(seed).matrix(5, 5);
        let e = general_eig(&v).unwrap();
        let sum: Complex64 = e.eigenvalues.iter().sum();
        let prod: Complex64 = e.eigenvalues.iter().product();
        let tr = v.trace();
        let det = v.determinant();
        assert!((sum - tr).norm() <= 1e-8 * tr.abs().max(1.0), "seed {seed}");
        assert!((prod - det).norm() <= 1e-8 * det.abs().max(1e-3), "seed {seed}");
        assert!(e.residual_norm < 1e-12, "seed {seed}: residual {}", e.residual_norm);
        if e.eigenvalues.iter().any(|l| l.im.abs() > 1e-6) {
            complex_seen += 1;
        }
        let sorted = e.eigenvalues.as_slice().windows(2).all(|w| w[0].re <= w[1].re);
        assert!(sorted);
    }
    assert!(complex_seen > 10);
}

#[test]
fn general_eig_agrees_with_sym_eig() {
    for seed in 0..20 {
        let s = LarRng::new(seed).family(Family::Symmetric, 6, 2.0);
        let g = general_eig(&s).unwrap();
        let h = sym_eig(&s).unwrap();
        for k in 0..6 {
            assert!((g.eigenvalues[k].re - h.values[k]).abs() <= 1e-9);
            assert!(g.eigenvalues[k].im.abs() <= 1e-9);
        }
    }
}

#[test]
fn linear_solve_residual() {
    let mut r = LarRng::new(99);
    for _ in 0..20 {
        let a = CMat::from_fn(6, 6, |i, j| {
            Complex64::new(r.uniform() + if i == j { 4.0 } else { 0.0 }, r.uniform())
        });
        let b = CVec::from_fn(6, |_, _| Complex64::new(r.uniform(), r.uniform()));
        let x = linear_solve(&a, &b).unwrap();
        let res = (&a * &x - &b).norm();
        assert!(res <= 1e-10 * (a.norm() * x.norm() + b.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_inverse_pair(seed in any::<u64>(), t in -3.0f64..3.0) {
        let a = LarRng::new(seed).matrix(4, 4);
        let p = expm(&a, t).unwrap() * expm(&a, -t).unwrap();
        prop_assert!((p - RMat::identity(4, 4)).norm() < 1e-10 * (1.0 + (4.0 * t.abs()).exp()));
    }

    #[test]
    fn split_reassembles(seed in any::<u64>(), n in 1usize..8) {
        let v = LarRng::new(seed).matrix(n, n);
        let (s, f) = sym_skew_split(&v).unwrap();
        prop_assert!((&s + &f - &v).norm() <= 1e-15 * v.norm().max(1.0));
    }
}
