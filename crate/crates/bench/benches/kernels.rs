use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hqmc_bench::{channel, conjugate_pair, matrices, reach_case};
use hqmc_core::equivalence::{blm_equivalent, Mode};
use hqmc_core::linalg::kron;
use hqmc_core::model_check::{reach_measure, ReachOptions, Solver};

fn equivalence(c: &mut Criterion) {
    let mut g = c.benchmark_group("blm_equivalent");
    g.sample_size(20);
    for n in [5, 10, 25] {
        let (a, b) = conjugate_pair(n, 1);
        g.bench_with_input(
            BenchmarkId::from_parameter(2 * n),
            &(a, b),
            |bench, (a, b)| {
                bench.iter(|| {
                    blm_equivalent(black_box(a), black_box(b), 1e-9, Mode::IncludeEpsilon).unwrap()
                })
            },
        );
    }
    g.finish();
}

fn reachability(c: &mut Criterion) {
    let mut g = c.benchmark_group("reach_measure");
    g.sample_size(20);
    for (states, dim) in [(4, 2), (8, 2), (6, 3)] {
        let (m, target) = reach_case(states, dim, 2);
        for (label, solver) in [("auto", Solver::Auto), ("kleene", Solver::Kleene)] {
            let opts = ReachOptions {
                solver,
                ..ReachOptions::default()
            };
            g.bench_function(format!("{label}/{states}x{dim}"), |bench| {
                bench.iter(|| reach_measure(black_box(&m), &target, opts).unwrap())
            });
        }
    }
    g.finish();
}

fn superoperators(c: &mut Criterion) {
    let mut g = c.benchmark_group("superop");
    for d in [2, 4, 8] {
        let e = channel(d, 3, 3);
        g.bench_with_input(BenchmarkId::new("matrix", d), &e, |bench, e| {
            bench.iter(|| black_box(e).superop_matrix())
        });
        let (a, b) = matrices(d, 4);
        g.bench_with_input(BenchmarkId::new("kron", d), &(a, b), |bench, (a, b)| {
            bench.iter(|| kron(black_box(a), black_box(b)))
        });
    }
    g.finish();
}

criterion_group!(benches, equivalence, reachability, superoperators);
criterion_main!(benches);
