//! Measurement-entropy benchmarks: cold (fresh state each iteration, so the
//! minimization actually runs) and cached (same state, exercising the lookup).

use std::hint::black_box;
use std::sync::atomic::{AtomicU64, Ordering};

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use gpt_core::{build_named_state, conditional_entropy, measurement_entropy, NamedState, StateTable};

static FRESH: AtomicU64 = AtomicU64::new(0);

/// A two-gbit isotropic box with a per-call noise level, defeating the cache.
fn fresh_isotropic() -> StateTable {
    let i = FRESH.fetch_add(1, Ordering::Relaxed);
    let e = 0.05 + 0.9 * ((i % 10_000_000) as f64 + 0.5) / 10_000_000.0;
    build_named_state(&NamedState::IsotropicBox(e)).unwrap()
}

fn bench_measurement_entropy(c: &mut Criterion) {
    let mut g = c.benchmark_group("measurement_entropy");
    g.bench_function("two_gbit_cold", |b| {
        b.iter_batched(
            fresh_isotropic,
            |s| black_box(measurement_entropy(&s).unwrap().bits),
            BatchSize::SmallInput,
        )
    });
    let pr = build_named_state(&NamedState::PrBox).unwrap();
    g.bench_function("two_gbit_cached", |b| {
        b.iter(|| black_box(measurement_entropy(black_box(&pr)).unwrap().bits))
    });
    let ssa = build_named_state(&NamedState::SsaExample).unwrap();
    g.bench_function("three_party_cached", |b| {
        b.iter(|| black_box(measurement_entropy(black_box(&ssa)).unwrap().bits))
    });
    g.finish();
}

fn bench_conditional_entropy(c: &mut Criterion) {
    let ssa = build_named_state(&NamedState::SsaExample).unwrap();
    c.bench_function("conditional_entropy/ssa_record", |b| {
        b.iter(|| black_box(conditional_entropy(black_box(&ssa), &[0], &[1, 2]).unwrap()))
    });
}

criterion_group!(benches, bench_measurement_entropy, bench_conditional_entropy);
criterion_main!(benches);
