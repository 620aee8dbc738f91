use criterion::{black_box, criterion_group, criterion_main, Criterion};
use pretzel_pi1::derivation::run_pipeline;
use pretzel_pi1::exec::{map_par, map_seq};
use pretzel_pi1::orderability::{nlo_search, SearchOptions};
use pretzel_pi1::surgery::Slope;

fn pipeline_grid(c: &mut Criterion) {
    let s_values: Vec<i64> = (3..=12).collect();
    let mut g = c.benchmark_group("pipeline_s3_12");
    g.sample_size(10);
    g.bench_function("seq", |b| b.iter(|| map_seq(&s_values, |&s| run_pipeline(black_box(s)).is_ok())));
    g.bench_function("par", |b| b.iter(|| map_par(&s_values, |&s| run_pipeline(black_box(s)).is_ok())));
    g.finish();
}

fn nlo_grid(c: &mut Criterion) {
    let cases: Vec<(i64, Slope)> = [(3, 19, 1), (3, 39, 2), (4, 23, 1), (5, 27, 1), (3, 17, 1), (6, 31, 1)]
        .iter()
        .map(|&(s, p, q)| (s, Slope::new(p, q).unwrap()))
        .collect();
    let seq = SearchOptions {
        parallel: false,
        ..Default::default()
    };
    let mut g = c.benchmark_group("nlo_grid");
    g.sample_size(10);
    g.bench_function("seq", |b| {
        b.iter(|| map_seq(&cases, |&(s, sl)| nlo_search(s, sl, seq).map(|o| o.is_certificate())))
    });
    g.bench_function("par", |b| {
        b.iter(|| map_par(&cases, |&(s, sl)| nlo_search(s, sl, SearchOptions::default()).map(|o| o.is_certificate())))
    });
    g.finish();
}

criterion_group!(benches, pipeline_grid, nlo_grid);
criterion_main!(benches);
