//! Guessing-game benchmarks: the analytic threshold sweep and the full
//! transcript-and-trace pipeline (cold = fresh box each iteration).

use std::hint::black_box;
use std::sync::atomic::{AtomicU64, Ordering};

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use gpt_core::{
    build_named_state, ic_threshold_sweep, trace_theorem2_chain, transcript_from_box, NamedState,
    StateTable,
};

static FRESH: AtomicU64 = AtomicU64::new(0);

fn fresh_box() -> StateTable {
    let i = FRESH.fetch_add(1, Ordering::Relaxed);
    let e = 0.05 + 0.9 * ((i % 10_000_000) as f64 + 0.5) / 10_000_000.0;
    build_named_state(&NamedState::IsotropicBox(e)).unwrap()
}

fn bench_icgame(c: &mut Criterion) {
    c.bench_function("icgame/analytic_sweep_31x12", |b| {
        b.iter(|| black_box(ic_threshold_sweep(0.6, 0.9, 0.01, 12).unwrap().len()))
    });

    let mut g = c.benchmark_group("proof_chain");
    let pr = build_named_state(&NamedState::PrBox).unwrap();
    g.bench_function("trace_cached", |b| {
        b.iter(|| {
            let t = transcript_from_box(black_box(&pr)).unwrap();
            black_box(trace_theorem2_chain(&t, 2, 1).unwrap().i_bits)
        })
    });
    g.bench_function("trace_cold", |b| {
        b.iter_batched(
            fresh_box,
            |s| {
                let t = transcript_from_box(&s).unwrap();
                black_box(trace_theorem2_chain(&t, 2, 1).unwrap().i_bits)
            },
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, bench_icgame);
criterion_main!(benches);
