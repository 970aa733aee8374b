use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ctrlset::explicit::{exact_identifying, SolutionList};
use ctrlset::matroid::{enumerate_bases, BuiltinMatroid};
use ctrlset::polymatroid::{polymatroid_components, Coverage};
use ctrlset::rational::int;
use ctrlset::WeightedGroundSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        (
            "sequential",
            rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap(),
        ),
        ("parallel", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn explicit_exact(c: &mut Criterion) {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let dim = 16;
    let rows: Vec<Vec<bool>> = (0..24).map(|_| (0..dim).map(|_| r.gen_bool(0.5)).collect()).collect();
    let x = SolutionList::new(dim, rows).unwrap();
    let w = WeightedGroundSet::new((0..dim).map(|_| int(r.gen_range(1..10))).collect()).unwrap();
    let mut group = c.benchmark_group("explicit_exact_dim16");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| exact_identifying(&x, &w, 1 << 16).unwrap()))
        });
    }
    group.finish();
}

fn matroid_bases(c: &mut Criterion) {
    let m = BuiltinMatroid::uniform(8, 18).unwrap();
    let mut group = c.benchmark_group("uniform_8_18_bases");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| enumerate_bases(&m, 20).unwrap().len()))
        });
    }
    group.finish();
}

fn coverage_components(c: &mut Criterion) {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let covers: Vec<Vec<usize>> = (0..12).map(|_| (0..20).filter(|_| r.gen_bool(0.2)).collect()).collect();
    let f = Coverage::new(covers, vec![int(1); 20]).unwrap();
    let mut group = c.benchmark_group("coverage_components_n12");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| polymatroid_components(&f, 20).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, explicit_exact, matroid_bases, coverage_components);
criterion_main!(benches);
