use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use floydkit_bench::{coned_ball, free_ball};
use floydkit_core::flow::{thin_triangle_delta, visibility_witness, TriangleSample};
use floydkit_core::graph::DEFAULT_GEODESIC_CAP;
use floydkit_core::{fineness_profile, hull, LabeledGraph};

fn balls(c: &mut Criterion) {
    let mut group = c.benchmark_group("cayley_ball");
    for radius in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(radius), &radius, |b, &r| {
            b.iter(|| free_ball(2, black_box(r)))
        });
    }
    group.finish();
}

fn hulls(c: &mut Criterion) {
    let g = free_ball(2, 6);
    let set: Vec<usize> = (0..g.vertex_count()).step_by(97).collect();
    c.bench_function("hull/rank2_radius6", |b| {
        b.iter(|| hull(&g, black_box(&set), None).unwrap())
    });
    let grid = LabeledGraph::grid(12, 12);
    c.bench_function("hull/grid12_corners", |b| {
        b.iter(|| hull(&grid, black_box(&[0, 11, 132, 143]), None).unwrap())
    });
}

fn fineness(c: &mut Criterion) {
    let g = coned_ball(3);
    c.bench_function("fineness/coned_radius3_len4", |b| {
        b.iter(|| fineness_profile(&g, black_box(4), u64::MAX).unwrap())
    });
}

fn triangles(c: &mut Criterion) {
    let grid = LabeledGraph::grid(5, 5);
    c.bench_function("delta/grid5_exhaustive", |b| {
        b.iter(|| thin_triangle_delta(&grid, &TriangleSample::Exhaustive, None).unwrap())
    });
}

fn visibility(c: &mut Criterion) {
    let grid = LabeledGraph::grid(8, 8);
    c.bench_function("visibility/grid8_corners", |b| {
        b.iter(|| {
            visibility_witness(
                &grid,
                black_box(&[0, 1]),
                black_box(&[62, 63]),
                DEFAULT_GEODESIC_CAP,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, balls, hulls, fineness, triangles, visibility);
criterion_main!(benches);
