use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geoflow_bench::bowed_geodesic;
use geoflow_core::curve::{chord_arc_scan, compute_geometry, reparametrize};
use geoflow_core::{FlowConfig, FlowState, Surface};
use std::hint::black_box;

const SURFACES: [Surface; 3] = [Surface::Plane, Surface::Sphere, Surface::Hyperbolic];

fn geometry(c: &mut Criterion) {
    let mut g = c.benchmark_group("compute_geometry");
    for s in SURFACES {
        let curve = bowed_geodesic(s, 512, 0.1);
        g.bench_with_input(BenchmarkId::from_parameter(s.name()), &curve, |b, c| {
            b.iter(|| compute_geometry(black_box(c)).unwrap())
        });
    }
    g.finish();
}

fn step(c: &mut Criterion) {
    let cfg = FlowConfig { regrid_every: 0, ..FlowConfig::default() };
    let mut g = c.benchmark_group("flow_step");
    for n in [128, 512, 2048] {
        let state = FlowState::new(bowed_geodesic(Surface::Sphere, n, 0.1)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, st| {
            b.iter_batched(|| st.clone(), |mut s| s.step(&cfg).unwrap(), criterion::BatchSize::SmallInput)
        });
    }
    g.finish();
}

fn chord_arc(c: &mut Criterion) {
    let mut g = c.benchmark_group("chord_arc_scan");
    for n in [128, 512] {
        let curve = bowed_geodesic(Surface::Hyperbolic, n, 0.1);
        let geom = compute_geometry(&curve).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| chord_arc_scan(&curve, &geom)));
    }
    g.finish();
}

fn regrid(c: &mut Criterion) {
    let curve = bowed_geodesic(Surface::Plane, 1024, 0.2);
    let geom = compute_geometry(&curve).unwrap();
    c.bench_function("reparametrize/1024", |b| b.iter(|| reparametrize(black_box(&curve), &geom).unwrap()));
}

criterion_group!(benches, geometry, step, chord_arc, regrid);
criterion_main!(benches);
