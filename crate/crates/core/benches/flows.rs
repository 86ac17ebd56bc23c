use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lar_core::clar::clar_flow_exec;
use lar_core::grid::linspace;
use lar_core::lifted::{lifted_flow_exec, PhaseState};
use lar_core::linalg::CVec;
use lar_core::onshell::onshell_flow_exec;
use lar_core::rng::LarRng;
use lar_core::{Execution, PreferenceOperator};
use num_complex::Complex64;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn onshell(c: &mut Criterion) {
    let mut g = c.benchmark_group("onshell_flow");
    for n in [4, 16] {
        let mut r = LarRng::new(1);
        let op = PreferenceOperator::new(r.matrix(n, n)).unwrap();
        let rho = r.vector(n);
        let times = linspace(0.0, 5.0, 1000);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| onshell_flow_exec(&op, black_box(&rho), &times, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn lifted(c: &mut Criterion) {
    let mut g = c.benchmark_group("lifted_flow");
    let n = 8;
    let mut r = LarRng::new(2);
    let op = PreferenceOperator::new(r.matrix(n, n)).unwrap();
    let z0 = PhaseState::new(r.vector(n), r.vector(n)).unwrap();
    let times = linspace(0.0, 2.0, 400);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| lifted_flow_exec(&op, black_box(&z0), &times, exec).unwrap()));
    }
    g.finish();
}

fn clar(c: &mut Criterion) {
    let mut g = c.benchmark_group("clar_flow");
    let n = 8;
    let mut r = LarRng::new(3);
    let op = PreferenceOperator::new(r.matrix(n, n)).unwrap();
    let psi0 = CVec::from_iterator(n, r.vector(n).iter().map(|&x| Complex64::new(x, 0.0)));
    let times = linspace(0.0, 5.0, 400);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| clar_flow_exec(&op, black_box(&psi0), &times, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, onshell, lifted, clar);
criterion_main!(benches);
