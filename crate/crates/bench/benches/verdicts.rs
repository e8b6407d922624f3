use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wardlab::catalogue::{self, Params};
use wardlab::classify::{classify, stat_upward_hqc_verdict};
use wardlab::continuity::{implication_lattice_report, uniform_continuity_witness_search, Corpus, FunctionUnderTest};
use wardlab::density::density_limit_verdict;
use wardlab::methods::{fibonacci_scheme_covering, lacunary_statistical_verdict};
use wardlab::{AnalysisConfig, IndexPredicate, RealSet, SequenceClass};
use wardlab_bench::random_walk;

fn density(c: &mut Criterion) {
    let mut g = c.benchmark_group("density");
    for n in [10_000u64, 100_000, 1_000_000] {
        let cfg = AnalysisConfig::with_horizon(n);
        let squares = IndexPredicate::new("squares", |k| {
            let r = (k as f64).sqrt() as u64;
            r * r == k || (r + 1) * (r + 1) == k
        });
        g.bench_with_input(BenchmarkId::new("squares", n), &cfg, |b, cfg| {
            b.iter(|| density_limit_verdict(black_box(&squares), cfg))
        });
    }
    g.finish();
}

fn classification(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    let cfg = AnalysisConfig::default();
    for name in ["sqrt", "harmonic-partial", "cos-6-log"] {
        let seq = catalogue::get(name, &Params::new()).unwrap();
        g.bench_function(BenchmarkId::new("all-classes", name), |b| {
            b.iter(|| classify(black_box(&seq), &SequenceClass::ALL, &cfg).unwrap())
        });
    }
    let walk = random_walk(1, 100_001);
    g.bench_function("stat-upward/walk", |b| b.iter(|| stat_upward_hqc_verdict(black_box(&walk), &cfg).unwrap()));
    g.finish();
}

fn lacunary(c: &mut Criterion) {
    let cfg = AnalysisConfig::default();
    let scheme = fibonacci_scheme_covering(cfg.horizon).unwrap();
    let seq = catalogue::get("reciprocal", &Params::new()).unwrap();
    c.bench_function("stheta/reciprocal", |b| {
        b.iter(|| lacunary_statistical_verdict(black_box(&seq), &scheme, 0.0, &cfg).unwrap())
    });
}

fn continuity(c: &mut Criterion) {
    let mut g = c.benchmark_group("continuity");
    g.sample_size(10);
    let cfg = AnalysisConfig::with_horizon(20_000);
    let corpus = Corpus::new(catalogue::default_corpus(catalogue::DEFAULT_CORPUS_SEED), &cfg).unwrap();
    for src in ["x^2", "step(0)"] {
        let f = FunctionUnderTest::from_expr(src, RealSet::reals()).unwrap();
        g.bench_function(BenchmarkId::new("lattice", src), |b| {
            b.iter(|| implication_lattice_report(black_box(&f), &corpus).unwrap())
        });
    }
    let square = FunctionUnderTest::from_expr("x^2", "[0,inf)".parse().unwrap()).unwrap();
    g.bench_function("uc-search/x^2/100", |b| {
        b.iter(|| uniform_continuity_witness_search(black_box(&square), 100, 1.0).unwrap())
    });
    g.finish();
}

criterion_group!(benches, density, classification, lacunary, continuity);
criterion_main!(benches);
