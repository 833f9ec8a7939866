use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nbibp::generative::nbibp_simulate;
use nbibp::numerics::{digamma, RngStream};
use nbibp::structures::{log_pmf_array, log_pmf_struct, CombStruct, Hyperparams};

fn special(c: &mut Criterion) {
    c.bench_function("digamma", |b| b.iter(|| digamma(black_box(3.7)).unwrap()));
}

fn pmfs(c: &mut Criterion) {
    let hp = Hyperparams::new(1.0, 1.0, 3.0).unwrap();
    let mut group = c.benchmark_group("log_pmf");
    for &n in &[10usize, 100, 1000] {
        let w = nbibp_simulate(n, &hp, &mut RngStream::new(n as u64, 0)).unwrap();
        let m = CombStruct::from_array(&w);
        group.bench_with_input(BenchmarkId::new("array", n), &w, |b, w| {
            b.iter(|| log_pmf_array(w, &hp).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("struct", n), &m, |b, m| {
            b.iter(|| log_pmf_struct(m, &hp).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, special, pmfs);
criterion_main!(benches);
