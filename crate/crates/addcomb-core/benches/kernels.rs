use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use addcomb::generators;
use addcomb::rat;
use addcomb::stats::profile::{naive_fiber_counts, naive_fiber_counts_seq};
use addcomb::stats::wht::{wht_in_place, wht_in_place_seq, xor_autocorrelation, xor_autocorrelation_seq};

fn bench_wht(c: &mut Criterion) {
    let mut group = c.benchmark_group("wht");
    for n in [14u32, 18, 20] {
        let len = 1usize << n;
        let data: Vec<i64> = (0..len).map(|i| (i as i64).wrapping_mul(2654435761) % 1024).collect();
        group.bench_with_input(BenchmarkId::new("seq", n), &data, |b, data| {
            b.iter(|| {
                let mut d = data.clone();
                wht_in_place_seq(black_box(&mut d));
                d[0]
            })
        });
        group.bench_with_input(BenchmarkId::new("dispatched", n), &data, |b, data| {
            b.iter(|| {
                let mut d = data.clone();
                wht_in_place(black_box(&mut d));
                d[0]
            })
        });
    }
    group.finish();
}

fn bench_profile_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("profile");
    group.sample_size(20);
    for (n, m) in [(10u32, 256u64), (12, 1024), (14, 2048)] {
        let a = generators::random_set(n, m, 42).unwrap();
        group.bench_with_input(BenchmarkId::new("naive-seq", n), &a, |b, a| {
            b.iter(|| naive_fiber_counts_seq(black_box(a)).len())
        });
        group.bench_with_input(BenchmarkId::new("naive", n), &a, |b, a| {
            b.iter(|| naive_fiber_counts(black_box(a)).len())
        });
        group.bench_with_input(BenchmarkId::new("wht-seq", n), &a, |b, a| {
            b.iter(|| xor_autocorrelation_seq(black_box(a)).unwrap().len())
        });
        group.bench_with_input(BenchmarkId::new("wht", n), &a, |b, a| {
            b.iter(|| xor_autocorrelation(black_box(a)).unwrap().len())
        });
    }
    group.finish();
}

fn bench_pair_energy(c: &mut Criterion) {
    let mut group = c.benchmark_group("pair-energy");
    group.sample_size(20);
    for d in [8u32, 10] {
        let a = generators::dense_subspace_sample(12, d, &rat::ratio_u(3, 4), 7).unwrap();
        let double = a.sumset(&a).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &(a, double), |b, (a, double)| {
            b.iter(|| addcomb::extract::pair_energy(black_box(a), black_box(double)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_wht, bench_profile_kernels, bench_pair_energy);
criterion_main!(benches);
