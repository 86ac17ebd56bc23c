mod common;

use lar_core::grid::linspace;
use lar_core::lifted::*;
use lar_core::linalg::{RMat, RVec};
use lar_core::onshell::{onshell_flow, PreferenceOperator};
use lar_core::rng::{Family, LarRng};
use proptest::prelude::*;

fn op(v: RMat) -> PreferenceOperator {
    PreferenceOperator::new(v).unwrap()
}

fn random_state(r: &mut LarRng, n: usize) -> PhaseState {
    PhaseState::new(r.vector(n), r.vector(n)).unwrap()
}

#[test]
fn flow_matches_ode_oracle() {
    for seed in 0..10 {
        let mut r = LarRng::new(seed);
        let p = op(r.matrix(3, 3));
        let z0 = random_state(&mut r, 3);
        let tr = lifted_flow(&p, &z0, &[0.0, 0.7, 1.5]).unwrap();
        for (t, z) in tr.iter() {
            let f = |x: &RVec| {
                let s = PhaseState::from_stacked(x);
                let rd = p.v() * &s.rho + &s.y;
                let yd = -(p.v().transpose() * &s.y);
                PhaseState { rho: rd, y: yd }.stacked()
            };
            let o = common::dopri(f, &z0.stacked(), t, 1e-13, 1e-15);
            let err = (z.stacked() - &o).amax() / o.amax();
            assert!(err < 1e-9, "seed {seed}: {err}");
        }
    }
}

#[test]
fn symplectic_defects() {
    let mut r = LarRng::new(100);
    for _ in 0..50 {
        let n = 2 + (r.range(0.0, 4.999) as usize);
        let p = op(r.matrix(n, n));
        assert!(hamiltonian_property_defect(&lifted_generator(&p)) <= 1e-14);
        assert_eq!(symplectic_defect(&p, 0.0).unwrap(), 0.0);
        for t in [0.5, 1.0, 2.0] {
            let d = symplectic_defect(&p, t).unwrap();
            assert!(d <= 1e-10, "{d}");
        }
    }
    for seed in 0..10 {
        let p = op(LarRng::new(seed).family(Family::Skew, 4, 1.0));
        assert!(symplectic_defect(&p, 10.0).unwrap() <= 1e-9);
    }
}

#[test]
fn zero_residual_leaf_is_invariant() {
    let mut r = LarRng::new(7);
    for _ in 0..20 {
        let p = op(r.matrix(5, 5));
        let x0 = r.vector(5);
        let times = linspace(0.0, 2.0, 41);
        let tr = lifted_flow(&p, &PhaseState::on_shell(x0.clone()), &times).unwrap();
        let on = onshell_flow(&p, &x0, &times).unwrap();
        for (z, x) in tr.states.iter().zip(&on.states) {
            assert!(z.y.amax() <= 1e-13);
            assert!((&z.rho - x).amax() <= 1e-11 * x.amax().max(1.0));
        }
    }
}

#[test]
fn balance_law_and_accumulation() {
    let mut r = LarRng::new(55);
    for _ in 0..50 {
        let p = op(r.matrix(4, 4) * 0.5);
        let z0 = random_state(&mut r, 4);
        let times = linspace(0.0, 2.0, 400);
        let tr = lifted_flow(&p, &z0, &times).unwrap();
        let idx = neutral_index(&tr).unwrap();
        assert!(idx.balance_defect <= 1e-7, "{}", idx.balance_defect);
        assert!(idx.lambda.windows(2).all(|w| w[1] - w[0] >= -1e-10));
        assert!(idx.quadrature_error < 1e-7);
        let acc = action_accumulation(&tr, times[0], times[399]).unwrap();
        assert!((acc.value - acc.from_lambda).abs() <= 1e-7);
        let h0 = hamiltonian(&tr.states[0], &p);
        for z in &tr.states {
            assert!((hamiltonian(z, &p) - h0).abs() <= 1e-9 * h0.abs().max(1.0));
        }
        assert!(block_consistency_defect(&p, &tr).unwrap() <= 1e-11);
    }
}

#[test]
fn positive_index_stays_positive() {
    let mut r = LarRng::new(66);
    for _ in 0..30 {
        let p = op(r.matrix(3, 3));
        let z0 = random_state(&mut r, 3);
        let tr = lifted_flow(&p, &z0, &linspace(0.0, 3.0, 61)).unwrap();
        let l: Vec<f64> = tr.states.iter().map(PhaseState::neutral).collect();
        if let Some(k) = l.iter().position(|&x| x > 0.0) {
            assert!(l[k..].iter().all(|&x| x > 0.0));
        }
    }
}

#[test]
fn crossing_time_matches_grid_root() {
    let mut r = LarRng::new(90);
    let mut found = 0;
    for _ in 0..40 {
        let p = op(r.matrix(3, 3) * 0.5);
        let rho = r.vector(3);
        let y = -&rho * 0.3 + r.vector(3) * 0.1;
        let z0 = PhaseState::new(rho, y).unwrap();
        if z0.neutral() >= 0.0 {
            continue;
        }
        if let Some(t) = cone_crossing_time(&p, &z0, 20.0).unwrap() {
            let tr = lifted_flow(&p, &z0, &[0.0, (t - 1e-9).max(1e-12), t + 1e-9]).unwrap();
            assert!(tr.states[1].neutral() <= 1e-12);
            assert!(tr.states[2].neutral() >= -1e-12);
            found += 1;
        }
    }
    assert!(found > 5);
}

#[test]
fn sigma_rate_matches_finite_difference() {
    let mut r = LarRng::new(17);
    for _ in 0..20 {
        let p = op(r.matrix(4, 4));
        let z0 = random_state(&mut r, 4);
        let h = 1e-4;
        let t = 0.8;
        let tr = lifted_flow(&p, &z0, &[0.0, t - h, t, t + h]).unwrap();
        let fd = (tr.states[3].rho.norm().ln() - tr.states[1].rho.norm().ln()) / (2.0 * h);
        let rate = offshell_sigma_rate(&tr.states[2], &p).unwrap();
        assert!((fd - rate).abs() < 1e-6);
        let lam = tr.states[2].neutral();
        let s = &tr.states[2].rho;
        let alt = s.dot(&(p.s() * s)) / s.norm_squared() + lam / (2.0 * s.norm_squared());
        assert!((alt - rate).abs() < 1e-14);
    }
}

#[test]
fn stationary_lambda_iff_zero_residual() {
    let mut r = LarRng::new(3);
    let p = op(r.matrix(3, 3));
    let tr = lifted_flow(&p, &PhaseState::on_shell(r.vector(3)), &linspace(0.0, 1.0, 11)).unwrap();
    let idx = neutral_index(&tr).unwrap();
    assert!(idx.lambda.iter().all(|l| (l - idx.lambda[0]).abs() <= 1e-10));

    // Converse on a subinterval: constant Λ forces tiny ‖y‖.
    let z0 = random_state(&mut r, 3);
    let tr = lifted_flow(&p, &z0, &linspace(0.0, 1.0, 11)).unwrap();
    let idx = neutral_index(&tr).unwrap();
    for k in 1..idx.lambda.len() {
        if (idx.lambda[k] - idx.lambda[k - 1]).abs() <= 1e-12 {
            assert!(tr.states[k].y.norm() <= 1e-5);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lambda_monotone(seed in any::<u64>()) {
        let mut r = LarRng::new(seed);
        let p = op(r.matrix(3, 3) * 1.5);
        let z0 = random_state(&mut r, 3);
        let tr = lifted_flow(&p, &z0, &linspace(0.0, 2.0, 41)).unwrap();
        let l: Vec<f64> = tr.states.iter().map(PhaseState::neutral).collect();
        prop_assert!(l.windows(2).all(|w| w[1] - w[0] >= -1e-10));
    }

    #[test]
    fn witt_split_reassembles(seed in any::<u64>()) {
        let p = op(LarRng::new(seed).matrix(4, 4));
        let w = witt_shear_split(&p);
        prop_assert_eq!(&w.a_pu + &w.a_sh, lifted_generator(&p));
        prop_assert_eq!(w.nilpotency_defect(), 0.0);
        prop_assert_eq!(w.commutator_defect(), 0.0);
    }
}
