//! Sequential versus parallel execution of the batch stages.

use std::hint::black_box;
use std::path::Path;

use codemark::attacks::{rename_attack, transform_attack};
use codemark::corpus::ingest_directory;
use codemark::embedder::{embed_batch, BitSource};
use codemark::extractor::extract_batch;
use codemark::features::{grid_search_weights, DevPair};
use codemark::{Backend, CandidateCodebase, CodeSnippet, DecodingPolicy, Exec, SimilarityWeights};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn codebase() -> CandidateCodebase {
    ingest_directory(&Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/functions"), None).unwrap()
}

fn marked(cb: &CandidateCodebase) -> Vec<CodeSnippet> {
    embed_batch(&Backend::mock(), cb, &BitSource::Seeded(42), 4, Exec::Parallel)
        .unwrap()
        .iter()
        .filter_map(|i| i.watermarked().cloned())
        .collect()
}

fn embedding(c: &mut Criterion) {
    let cb = codebase();
    let backend = Backend::mock();
    let mut g = c.benchmark_group("embed_batch");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| embed_batch(&backend, black_box(&cb), &BitSource::Seeded(42), 4, exec).unwrap())
        });
    }
    g.finish();
}

fn extraction(c: &mut Criterion) {
    let cb = codebase();
    let backend = Backend::mock();
    let suspects: Vec<CodeSnippet> = marked(&cb)
        .iter()
        .map(|s| transform_attack(s, 3, 42).unwrap().snippet)
        .collect();
    let weights = SimilarityWeights::default();
    let policy = DecodingPolicy::default();
    let mut g = c.benchmark_group("extract_batch");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| extract_batch(&backend, black_box(&suspects), &cb, &weights, 4, &policy, exec))
        });
    }
    g.finish();
}

fn tuning(c: &mut Criterion) {
    let cb = codebase();
    let dev: Vec<DevPair> = cb
        .iter()
        .map(|s| DevPair {
            text: rename_attack(s, 0.5, 7).unwrap().snippet.text,
            language: s.language,
            original_id: s.id.clone(),
        })
        .collect();
    let mut g = c.benchmark_group("grid_search_weights");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| grid_search_weights(black_box(&dev), &cb, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, embedding, extraction, tuning);
criterion_main!(benches);
