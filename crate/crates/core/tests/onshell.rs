mod common;

use lar_core::grid::linspace;
use lar_core::linalg::{RMat, RVec};
use lar_core::onshell::*;
use lar_core::rng::{Family, LarRng};
use lar_core::simplex::{lift, readout};
use lar_core::Execution;
use proptest::prelude::*;

fn op(v: RMat) -> PreferenceOperator {
    PreferenceOperator::new(v).unwrap()
}

#[test]
fn flow_matches_ode_oracle() {
    for seed in 0..10 {
        let mut r = LarRng::new(seed);
        let p = op(r.matrix(4, 4));
        let x0 = r.vector(4);
        let times = linspace(0.0, 2.0, 5);
        let tr = onshell_flow(&p, &x0, &times).unwrap();
        for (t, x) in tr.iter() {
            let o = common::dopri(|z| p.v() * z, &x0, t, 1e-13, 1e-15);
            let err = (x - &o).amax() / o.amax();
            assert!(err < 1e-9, "seed {seed} t {t}: {err}");
        }
    }
}

#[test]
fn lar_field_dual_formulas() {
    let mut r = LarRng::new(3);
    for _ in 0..200 {
        let p = op(r.matrix(5, 5));
        let rho = r.vector(5).normalize();
        let x = lar_field(&rho, &p).unwrap();
        assert!(rho.dot(&x).abs() <= 1e-13);
        let m = rho.dot(&(p.s() * &rho));
        let polar = p.f() * &rho + p.s() * &rho - &rho * m;
        assert!((x - polar).amax() <= 1e-13);
    }
}

#[test]
fn polar_reconstruction() {
    let mut r = LarRng::new(4);
    for _ in 0..200 {
        let p = op(r.matrix(4, 4) * 2.0);
        let x = r.vector(4) * 3.0;
        let pr = polar_rates(&x, &p).unwrap();
        let rn = x.norm();
        let rho = &x / rn;
        assert!(rho.dot(&pr.direction).abs() <= 1e-12);
        let rec = &rho * pr.radial + &pr.direction * rn;
        assert!((rec - p.v() * &x).amax() <= 1e-11);
    }
}

#[test]
fn clock_monotone_and_matches_quadrature() {
    for seed in 0..20 {
        let mut r = LarRng::new(seed);
        let p = op(r.matrix(4, 4));
        let x0 = r.vector(4);
        let times = linspace(0.0, 2.0, 401);
        let tr = onshell_flow(&p, &x0, &times).unwrap();
        let c = entropic_clock(&tr, &p).unwrap();
        assert!(c.sigma_plus.windows(2).all(|w| w[1] - w[0] >= -1e-10));
        assert!(c.production.iter().all(|&x| x >= 0.0));
        let integral = lar_core::lifted::cumulative_simpson(&times, &c.production);
        let gain = c.sigma_plus[400] - c.sigma_plus[0];
        assert!((gain - integral[400]).abs() < 1e-7, "seed {seed}: {gain} vs {}", integral[400]);
    }
}

#[test]
fn clock_constant_cases() {
    let times = linspace(0.0, 3.0, 31);
    let p = op(RMat::identity(3, 3) * 1.7);
    let c = entropic_clock(&onshell_flow(&p, &RVec::from_vec(vec![1.0, -2.0, 0.5]), &times).unwrap(), &p).unwrap();
    assert!(c.sigma_plus.iter().all(|s| (s - c.sigma_plus[0]).abs() <= 1e-12));

    let p = op(RMat::from_diagonal(&RVec::from_vec(vec![-1.0, 0.5, 2.0])));
    let c = entropic_clock(&onshell_flow(&p, &RVec::from_vec(vec![2.0, 0.0, 0.0]), &times).unwrap(), &p).unwrap();
    assert!(c.sigma_plus.iter().all(|s| (s - c.sigma_plus[0]).abs() <= 1e-12));
}

#[test]
fn free_energy_sweep() {
    let mut r = LarRng::new(77);
    for k in 0..1000 {
        let mut x = r.vector(6) * 10f64.powf(r.range(-3.0, 3.0));
        if k % 5 == 0 {
            x[k % 6] = 0.0;
        }
        let f = free_energy_check(&x).unwrap();
        assert!(f.defect <= 1e-12, "{k}: {}", f.defect);
    }
}

#[test]
fn logit_matches_flow() {
    let mut r = LarRng::new(12);
    for _ in 0..50 {
        let q0 = r.lottery(4);
        let theta = r.vector(4);
        let t = r.range(0.0, 5.0);
        let tr = onshell_flow(&op(RMat::from_diagonal(&theta)), &lift(&q0).unwrap(), &[0.0, t]).unwrap();
        let q = tr.lottery(1).unwrap();
        let c = logit_posterior(&q0, &theta, t).unwrap();
        assert!((q - c).amax() <= 1e-12);
    }
}

#[test]
fn replicator_residual_of_diagonal_flow() {
    let theta = RVec::from_vec(vec![0.4, -0.3, 1.0]);
    let p = op(RMat::from_diagonal(&theta));
    let q0 = RVec::from_vec(vec![0.5, 0.3, 0.2]);
    let h = 1e-4;
    for &t in &[0.3, 1.0, 2.0] {
        let tr = onshell_flow(&p, &lift(&q0).unwrap(), &[0.0, t - h, t, t + h]).unwrap();
        let (qm, q, qp) = (tr.lottery(1).unwrap(), tr.lottery(2).unwrap(), tr.lottery(3).unwrap());
        let fd = (qp - qm) / (2.0 * h);
        let bar = theta.dot(&q);
        let rep = RVec::from_fn(3, |i, _| 2.0 * q[i] * (theta[i] - bar));
        assert!((fd - rep).amax() < 1e-8);
    }
}

#[test]
fn skew_generator_preserves_norm() {
    let mut r = LarRng::new(5);
    let p = op(r.family(Family::Skew, 5, 2.0));
    let x0 = r.vector(5);
    let tr = onshell_flow(&p, &x0, &linspace(0.0, 10.0, 51)).unwrap();
    for x in &tr.states {
        assert!((x.norm() - x0.norm()).abs() <= 1e-10);
    }
}

#[test]
fn semigroup_and_gauge() {
    let mut r = LarRng::new(8);
    for _ in 0..20 {
        let p = op(r.matrix(4, 4));
        let x0 = r.vector(4);
        let (t1, t2) = (r.range(0.1, 1.0), r.range(1.0, 2.0));
        let a = onshell_flow(&p, &x0, &[0.0, t1]).unwrap();
        let b = onshell_flow(&p, &a.states[1], &[t1, t2]).unwrap();
        let c = onshell_flow(&p, &x0, &[0.0, t2]).unwrap();
        assert!((&b.states[1] - &c.states[1]).amax() <= 1e-11 * c.states[1].amax().max(1.0));

        let shifted = p.shifted(r.range(-3.0, 3.0)).unwrap();
        let times = linspace(0.0, 2.0, 11);
        let u = onshell_flow(&p, &x0, &times).unwrap();
        let v = onshell_flow(&shifted, &x0, &times).unwrap();
        for k in 0..times.len() {
            assert!((u.lottery(k).unwrap() - v.lottery(k).unwrap()).amax() <= 1e-12);
        }
    }
}

#[test]
fn execution_modes_agree_bitwise() {
    let mut r = LarRng::new(1);
    let p = op(r.matrix(6, 6));
    let x0 = r.vector(6);
    let times = linspace(0.0, 3.0, 257);
    let a = onshell_flow_exec(&p, &x0, &times, Execution::Sequential).unwrap();
    let b = onshell_flow_exec(&p, &x0, &times, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn peu_limit_matches_long_flow_when_gap_is_large() {
    // Convergence is e^{-gap·T}; a gap of 1 leaves ~e^{-50} at T = 50.
    let mut r = LarRng::new(31);
    let mut checked = 0;
    while checked < 10 {
        let s = r.family(Family::Symmetric, 4, 2.0);
        let x0 = r.vector(4);
        let Ok(lim) = peu_limit(&s, &x0) else { continue };
        if lim.gap < 1.0 {
            continue;
        }
        let tr = onshell_flow(&op(s), &x0, &[0.0, 50.0]).unwrap();
        assert!((tr.lottery(1).unwrap() - &lim.q_star).amax() <= 1e-8);
        checked += 1;
    }
}

#[test]
fn peu_eut_corner() {
    let s = RMat::from_diagonal(&RVec::from_vec(vec![0.2, 1.4, 0.9]));
    let x0 = RVec::from_vec(vec![1.0, 0.5, -2.0]);
    let lim = peu_limit(&s, &x0).unwrap();
    let tr = onshell_flow(&op(s), &x0, &[0.0, 50.0]).unwrap();
    assert!((tr.lottery(1).unwrap() - &lim.q_star).amax() <= 1e-8);
    assert_eq!(lim.q_star, RVec::from_vec(vec![0.0, 1.0, 0.0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clock_never_decreases(seed in any::<u64>()) {
        let mut r = LarRng::new(seed);
        let p = op(r.matrix(3, 3) * 2.0);
        let x0 = r.vector(3);
        prop_assume!(x0.norm() > 1e-3);
        let tr = onshell_flow(&p, &x0, &linspace(0.0, 3.0, 61)).unwrap();
        let c = entropic_clock(&tr, &p).unwrap();
        prop_assert!(c.sigma_plus.windows(2).all(|w| w[1] - w[0] >= -1e-10));
    }

    #[test]
    fn readout_gauge_invariant(seed in any::<u64>(), c in -5.0f64..5.0) {
        let mut r = LarRng::new(seed);
        let p = op(r.matrix(3, 3));
        let x0 = r.vector(3);
        prop_assume!(x0.norm() > 1e-3);
        let a = onshell_flow(&p, &x0, &[0.0, 1.5]).unwrap();
        let b = onshell_flow(&p.shifted(c).unwrap(), &x0, &[0.0, 1.5]).unwrap();
        prop_assert!((readout(&a.states[1]).unwrap() - readout(&b.states[1]).unwrap()).amax() <= 1e-12);
    }
}
