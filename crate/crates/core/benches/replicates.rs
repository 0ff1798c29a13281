//! Replicate throughput, sequential against rayon.
//!
//! Each replicate draws 200 + 200 samples from a fixed three-level state and
//! solves for the estimate. Without the `parallel` feature both arms run
//! sequentially, which makes the fallback's overhead visible.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rootpsi::basis::{BasisDescriptor, BasisSet, StateVector};
use rootpsi::exec::{map_indexed, Execution};
use rootpsi::mle::{solve_mle, SolverConfig};
use rootpsi::sampler::sample_complementary;

fn replicate(basis: &BasisSet, truth: &StateVector, seed: u64) -> f64 {
    let data = sample_complementary(basis, truth, 200, 200, seed).unwrap();
    let est = solve_mle(&data, basis, &SolverConfig::default()).unwrap();
    est.state.fidelity(truth)
}

fn bench_replicates(c: &mut Criterion) {
    let basis = BasisDescriptor::oscillator(3).build().unwrap();
    let truth = StateVector::from_real(&[0.6, 0.48, 0.64]).unwrap();
    let mut group = c.benchmark_group("replicates");
    group.sample_size(10);
    for count in [8usize, 32] {
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, count), &count, |b, &n| {
                b.iter(|| map_indexed(n, exec, |r| replicate(&basis, &truth, r as u64)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_replicates);
criterion_main!(benches);
