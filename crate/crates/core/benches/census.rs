use std::sync::Arc;

use apgen_core::arith::primes_up_to;
use apgen_core::gl2lab::run_grid;
use apgen_core::modsym::ModSymSpace;
use apgen_core::orbits::decompose;
use apgen_core::par::Execution;
use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

/// Charpolys of `T_p` for all `p < 3000` on a fresh degree-3 orbit at level 389,
/// so the per-orbit charpoly cache starts empty each iteration.
fn charpolys(c: &mut Criterion) {
    let space = Arc::new(ModSymSpace::build(389, 2).unwrap());
    let primes = primes_up_to(3000);
    let mut group = c.benchmark_group("charpolys_389_d3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter_batched(
                || decompose(&space).unwrap().into_iter().find(|o| o.degree() == 3).unwrap(),
                |orbit| orbit.charpolys(&primes, exec).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn gl2_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("gl2_grid_9");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| b.iter(|| run_grid(9, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, charpolys, gl2_grid);
criterion_main!(benches);
