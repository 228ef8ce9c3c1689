use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lpq::fss::flat_vector;
use lpq::hadamard::{hadamard_matrix, u_block};
use lpq::pqnorm::pq_norm_lower;
use lpq::splitting::{split_block_diagonal, truncate_to_banded};
use lpq::{DenseMatrix, Exponent};

fn exp(num: i64, den: i64) -> Exponent {
    Exponent::new(num, den).unwrap()
}

fn hadamard_construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("hadamard_matrix");
    for n in [4u32, 7, 10] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| hadamard_matrix(black_box(n)).unwrap()));
    }
    g.finish();
}

fn norm_lower(c: &mut Criterion) {
    let mut g = c.benchmark_group("pq_norm_lower");
    g.sample_size(10);
    let (p, q) = (exp(4, 3), exp(4, 1));
    for n in [2u32, 4, 6] {
        let u = u_block(n, p, q).unwrap();
        g.bench_with_input(BenchmarkId::new("u_block", n), &u, |b, u| b.iter(|| pq_norm_lower(black_box(u), p, q, 8, 0xD1A6)));
    }
    g.finish();
}

fn flat(c: &mut Criterion) {
    let mut g = c.benchmark_group("flat_vector");
    for (m, k) in [(32usize, 4usize), (128, 16)] {
        let basis: Vec<Vec<f64>> =
            (0..k).map(|j| (0..m).map(|i| ((i * 7 + j * 13) % 11) as f64 - 5.0 + if i == j { 3.0 } else { 0.0 }).collect()).collect();
        g.bench_with_input(BenchmarkId::new("m_k", format!("{m}x{k}")), &basis, |b, basis| {
            b.iter(|| flat_vector(black_box(basis)).unwrap())
        });
    }
    g.finish();
}

fn split(c: &mut Criterion) {
    let mut g = c.benchmark_group("banded_split");
    let (p, q) = (exp(4, 3), exp(4, 1));
    for m in [32usize, 128] {
        let r = DenseMatrix::from_fn(m, m, |i, j| 1.0 / (1.0 + (i as f64 - j as f64).powi(2)));
        g.bench_with_input(BenchmarkId::from_parameter(m), &r, |b, r| {
            b.iter(|| {
                let t = truncate_to_banded(black_box(r), 0.25, p, q).unwrap();
                split_block_diagonal(&t.s, &t.support).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, hadamard_construction, norm_lower, flat, split);
criterion_main!(benches);
