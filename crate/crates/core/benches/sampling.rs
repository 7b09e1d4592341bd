use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use toa_core::distributions::{DistributionKind, Sampler, TimeGrid};
use toa_core::packet::{DetectorSpec, ObservationWindow, WavePacketSpec};
use toa_core::Execution;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if Execution::Parallel.is_parallel() {
        m.push(("parallel", Execution::Parallel));
    }
    m
}

fn scenario() -> (WavePacketSpec, DetectorSpec, ObservationWindow, TimeGrid) {
    (
        WavePacketSpec::new(-10.0, 7.0, 1.0).unwrap(),
        DetectorSpec::point(0.0).unwrap(),
        ObservationWindow::new(5.0, 50.0).unwrap(),
        TimeGrid::new(5.0, 2000).unwrap(),
    )
}

fn kijowski(c: &mut Criterion) {
    let (packet, det, _, grid) = scenario();
    let mut group = c.benchmark_group("kijowski");
    group.sample_size(10);
    for (name, exec) in modes() {
        let sampler = Sampler::with_execution(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sampler.sample_kijowski(&packet, &det, &grid).unwrap())
        });
    }
    group.finish();
}

fn all_kinds(c: &mut Criterion) {
    let (packet, det, window, grid) = scenario();
    let mut group = c.benchmark_group("all_distributions");
    group.sample_size(10);
    for (name, exec) in modes() {
        let sampler = Sampler::with_execution(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                DistributionKind::ALL
                    .iter()
                    .map(|&k| sampler.sample(k, &packet, &det, &window, &grid).unwrap())
                    .collect::<Vec<_>>()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, kijowski, all_kinds);
criterion_main!(benches);
