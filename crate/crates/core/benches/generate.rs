//! Sequential vs. data-parallel throughput of segmentation and sample generation.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fsp_core::ingest::{Article, Source};
use fsp_core::par::Workers;
use fsp_core::sampler::{generate, SamplerConfig};
use fsp_core::segment::segment_and_filter;

fn corpus(n: usize) -> Vec<Article> {
    (0..n)
        .map(|a| Article {
            article_id: format!("b{a}"),
            source: Source::ArticleCorpus,
            category: None,
            paragraphs: (0..5)
                .map(|p| {
                    format!(
                        "Dr. Vale opened chapter {a}.{p} in the archive. The ledger ran to {p} volumes, \
                         each bound in cloth. Nobody had read volume {a} since 1910! Was it lost? \
                         Mr. Hart said it was shelved near the U.S. maps."
                    )
                })
                .collect(),
        })
        .collect()
}

fn workers() -> [(&'static str, Workers); 2] {
    [("sequential", Workers::SEQUENTIAL), ("parallel", Workers(0))]
}

fn bench_segment(c: &mut Criterion) {
    let articles = corpus(4_000);
    let mut g = c.benchmark_group("segment_and_filter");
    g.throughput(Throughput::Elements(20_000));
    g.sample_size(10);
    for (name, w) in workers() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &w, |b, &w| b.iter(|| segment_and_filter(&articles, w)));
    }
    g.finish();
}

fn bench_generate(c: &mut Criterion) {
    let articles = corpus(4_000);
    let cfg = SamplerConfig { seed: 3, ..SamplerConfig::default() };
    let mut g = c.benchmark_group("generate");
    g.throughput(Throughput::Elements(20_000));
    g.sample_size(10);
    for (name, w) in workers() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &w, |b, &w| {
            b.iter(|| generate(&articles, &cfg, w).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_segment, bench_generate);
criterion_main!(benches);
