use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hcontour_bench::binarized_blank;
use hcontour_core::{
    assemble_contour, detect_sliding, direct_scan, sliding_fill, trace_external_contours,
    ScanParams, ShapePreset, SlidingParams,
};

const SIZES: [(usize, usize); 2] = [(400, 300), (800, 600)];

fn label(size: (usize, usize)) -> String {
    format!("{}x{}", size.0, size.1)
}

fn direct(c: &mut Criterion) {
    let mut group = c.benchmark_group("direct");
    let params = ScanParams::default_for_pitch(Some(24));
    for size in SIZES {
        let img = binarized_blank(ShapePreset::CShape, size);
        group.bench_with_input(BenchmarkId::from_parameter(label(size)), &img, |b, img| {
            b.iter(|| assemble_contour(&direct_scan(black_box(img), &params)))
        });
    }
    group.finish();
}

fn sliding(c: &mut Criterion) {
    let img = binarized_blank(ShapePreset::CShape, SIZES[0]);
    let mut group = c.benchmark_group("sliding_fill");
    for core in [4, 8, 16] {
        let params = SlidingParams::new(core, core, 40).unwrap();
        group.bench_with_input(BenchmarkId::new("core", core), &params, |b, params| {
            b.iter(|| sliding_fill(black_box(&img), params))
        });
    }
    group.finish();

    let filled = sliding_fill(&img, &SlidingParams::default());
    c.bench_function("trace/filled", |b| {
        b.iter(|| trace_external_contours(black_box(&filled)))
    });
    c.bench_function("trace/raw_lattice", |b| {
        b.iter(|| trace_external_contours(black_box(&img)))
    });

    let mut group = c.benchmark_group("sliding_pipeline");
    for size in SIZES {
        let img = binarized_blank(ShapePreset::CShape, size);
        group.bench_with_input(BenchmarkId::from_parameter(label(size)), &img, |b, img| {
            b.iter(|| detect_sliding(black_box(img), &SlidingParams::default()))
        });
    }
    group.finish();
}

criterion_group!(benches, direct, sliding);
criterion_main!(benches);
