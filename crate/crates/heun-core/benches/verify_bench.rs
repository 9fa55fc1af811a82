//! Batch identity verification, sequential versus data-parallel.
//!
//! The unit of work is `verify_all` over the degree-at-most-2 catalog
//! records (all over Q), at order 8 with one sample tuple each: enough
//! exact-arithmetic work per record for the comparison to be meaningful,
//! small enough that the bench converges quickly.  On a single-core host
//! the two modes coincide; the parallel mode pays off once several
//! hardware threads are available because records verify independently.

use criterion::{criterion_group, criterion_main, Criterion};
use heun_core::catalog::builtin_catalog;
use heun_core::exec::ExecMode;
use heun_core::pullback::{FieldChoice, VerifyOptions};
use heun_core::sample::{DEFAULT_HEIGHT, DEFAULT_SEED};
use heun_core::verify::verify_all;

fn batch_verification(c: &mut Criterion) {
    let records: Vec<_> = builtin_catalog()
        .into_iter()
        .filter(|r| r.is_verifiable() && r.degree <= 2)
        .collect();
    assert!(records.len() >= 8, "enough records for a meaningful batch");
    let opts = VerifyOptions {
        order: 8,
        samples: 1,
        seed: DEFAULT_SEED,
        height: DEFAULT_HEIGHT,
        field: FieldChoice::Auto,
    };
    let mut group = c.benchmark_group("batch-verification");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let report = verify_all(&records, &opts, ExecMode::Sequential);
            assert!(report.all_passed());
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let report = verify_all(&records, &opts, ExecMode::Parallel);
            assert!(report.all_passed());
        })
    });
    group.finish();
}

criterion_group!(benches, batch_verification);
criterion_main!(benches);
