//! Sequential against rayon execution on the two heaviest data-parallel loops.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use statesynth::distill::{distill, DistillationConfig};
use statesynth::ensembles::{haar_state, RngStream};
use statesynth::exec::Execution;
use statesynth::one_query::{one_query_register_implicit, prepare_registers, OneQueryConfig, UnitarySampling};
use statesynth::qcore::DensityMatrix;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn register_preparation(c: &mut Criterion) {
    let mut group = c.benchmark_group("one_query_prepare_registers");
    let target = haar_state(16, &mut RngStream::new(1, 0)).unwrap();
    for (name, exec) in MODES {
        let mut cfg = OneQueryConfig::new(4, 64);
        cfg.n_expanded = 8;
        cfg.sampling = UnitarySampling::HaarImplicit;
        cfg.distill = cfg.distill.execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| prepare_registers(&target, cfg, &RngStream::new(2, 0)).unwrap())
        });
    }
    group.finish();
}

fn dense_distillation(c: &mut Criterion) {
    let mut group = c.benchmark_group("distill_dense_registers");
    let target = haar_state(64, &mut RngStream::new(3, 0)).unwrap();
    let tau_p = target.pad_zeros(0);
    let inputs: Vec<DensityMatrix> =
        (0..32).map(|j| one_query_register_implicit(&tau_p, &mut RngStream::new(4, j)).unwrap().density()).collect();
    for (name, exec) in MODES {
        let cfg = DistillationConfig::with_rounds(4).execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| distill(inputs.clone(), &target, cfg, &mut RngStream::new(5, 0)).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = register_preparation, dense_distillation
}
criterion_main!(benches);
