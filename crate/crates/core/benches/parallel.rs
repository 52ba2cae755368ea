use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use musielak::combinat::{exact_average_with, mc_average_with, ExactConfig};
use musielak::generation::{verify_sandwich, Side, Variant};
use musielak::instance::{random_normalized_matrix, random_vector, seeded_rng};
use musielak::par::{map_indexed, Execution};
use musielak::combinat::AverageRequest;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_average");
    group.sample_size(10);
    for n in [8, 9] {
        let mut rng = seeded_rng(n as u64);
        let y = random_normalized_matrix(&mut rng, n, n).unwrap();
        let x = random_vector(&mut rng, n);
        for (name, execution) in MODES {
            let cfg = ExactConfig {
                execution,
                ..ExactConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| exact_average_with(&x, &y, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_average");
    group.sample_size(10);
    let n = 20;
    let mut rng = seeded_rng(1);
    let y = random_normalized_matrix(&mut rng, n, n).unwrap();
    let x = random_vector(&mut rng, n);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::new(name, "1e5 trials"), |b| {
            b.iter(|| mc_average_with(&x, &y, 100_000, 7, execution).unwrap())
        });
    }
    group.finish();
}

fn campaign(c: &mut Criterion) {
    let mut group = c.benchmark_group("sandwich_campaign");
    group.sample_size(10);
    let n = 6;
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::new(name, "100 instances"), |b| {
            b.iter(|| {
                map_indexed(execution, 100, |k| {
                    let mut rng = seeded_rng(k as u64);
                    let y = random_normalized_matrix(&mut rng, n, n).unwrap();
                    let x = random_vector(&mut rng, n);
                    verify_sandwich(&x, &y, Variant::RowsumNormalized, Side::Primal, AverageRequest::Exact)
                        .unwrap()
                        .pass
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, exact, monte_carlo, campaign);
criterion_main!(benches);
