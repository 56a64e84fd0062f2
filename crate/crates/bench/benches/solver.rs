use std::hint::black_box;
use std::time::Duration;

use bsreach::{decide, SolverOptions};
use bsreach_bench::{fixtures, queue_round_trip, Fixture};
use criterion::{criterion_group, criterion_main, Criterion};

fn run(c: &mut Criterion, group: &str, items: &[Fixture], opts: &SolverOptions) {
    let mut g = c.benchmark_group(group);
    for f in items {
        g.bench_function(&f.name, |b| b.iter(|| decide(black_box(&f.system), f.k, opts).expect("solver runs")));
    }
    g.finish();
}

fn small(c: &mut Criterion) {
    let items = fixtures();
    run(c, "generic", &items, &SolverOptions { fast_path: false, ..SolverOptions::default() });
    run(c, "auto", &items, &SolverOptions::default());
}

// One run takes seconds; keep the sample count low.
fn gadget(c: &mut Criterion) {
    let mut g = c.benchmark_group("gadget");
    g.sample_size(10).measurement_time(Duration::from_secs(30));
    let f = queue_round_trip(2);
    let opts = SolverOptions::default();
    g.bench_function(&f.name, |b| b.iter(|| decide(black_box(&f.system), f.k, &opts).expect("solver runs")));
    g.finish();
}

criterion_group!(benches, small, gadget);
criterion_main!(benches);
