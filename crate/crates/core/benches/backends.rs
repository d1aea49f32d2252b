//! Sequential vs. parallel backends on the two data-parallel hot spots:
//! stiffness assembly and the per-eigenmode time solves of the space-time problem.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracspec::ode::{assemble_stiffness, AssemblyOptions, DEFAULT_QUAD_GUARD};
use fracspec::pde::{assemble_spacetime, solve_system_eigen, SpaceTimeProblem, SpatialBasis};
use fracspec::{Backend, FracOrder, TimeBasis, TransformSpec};
use std::hint::black_box;

fn stiffness(c: &mut Criterion) {
    let mut group = c.benchmark_group("stiffness");
    let spec = TransformSpec::new(5, 2.0).unwrap();
    let delta = FracOrder::new(0.5).unwrap();
    for n in [16usize, 32, 64] {
        let basis = TimeBasis::new(0.0, n, spec.right()).unwrap();
        for &backend in Backend::available() {
            group.bench_with_input(BenchmarkId::new(backend.name(), n), &n, |b, &n| {
                b.iter(|| assemble_stiffness(black_box(&basis), delta, &spec, n + DEFAULT_QUAD_GUARD, backend).unwrap())
            });
        }
    }
    group.finish();
}

fn spacetime_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("spacetime_solve");
    let spec = TransformSpec::new(5, 2.0).unwrap();
    let delta = FracOrder::new(0.5).unwrap();
    let problem = SpaceTimeProblem::manufactured_sine_power(delta, spec, 2, 0.6).unwrap();
    for size in [12usize, 20, 28] {
        let tb = TimeBasis::new(0.0, size, spec.right()).unwrap();
        let sb = SpatialBasis::new(size, 2).unwrap();
        let system = assemble_spacetime(&problem, &tb, &sb, &AssemblyOptions::default()).unwrap();
        for &backend in Backend::available() {
            let opts = AssemblyOptions { backend, ..AssemblyOptions::default() };
            group.bench_with_input(BenchmarkId::new(backend.name(), size), &size, |b, _| {
                b.iter(|| solve_system_eigen(black_box(&system), &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = stiffness, spacetime_solve
}
criterion_main!(benches);
