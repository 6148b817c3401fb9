use std::f64::consts::{FRAC_PI_4, PI};

use geoflow_core::curve::{alpha_epsilon, chord_arc_scan, compute_geometry, self_intersection_count, total_turning};
use geoflow_core::{DiscreteCurve, Point, Surface};
use proptest::prelude::*;

fn plane_curve(n: usize, f: impl Fn(f64) -> (f64, f64)) -> DiscreteCurve {
    let pts = (0..=n)
        .map(|i| {
            let (x, y) = f(i as f64 / n as f64);
            Point::from([x, y, 0.0])
        })
        .collect();
    DiscreteCurve::with_fixed_ends(Surface::Plane, pts).unwrap()
}

/// Max curvature error on a circle of radius 0.5 parametrized with a
/// non-uniform speed, excluding the endpoints.
fn circle_error(n: usize) -> f64 {
    let c = plane_curve(n, |u| {
        let th = 0.2 + 2.5 * (u + 0.15 * (PI * u).sin());
        (0.5 * th.cos(), 0.5 * th.sin())
    });
    let g = compute_geometry(&c).unwrap();
    g.kappa[1..n].iter().map(|k| (k - 2.0).abs()).fold(0.0, f64::max)
}

#[test]
fn circle_curvature_converges_at_second_order() {
    let (e1, e2) = (circle_error(128), circle_error(256));
    let ratio = e1 / e2;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} ({e1:e} → {e2:e})");
}

#[test]
fn sphere_small_circle_and_great_circle() {
    // Colatitude π/4: geodesic curvature cot(π/4) = 1.
    let n = 512;
    let ring = |colat: f64| {
        let pts = (0..=n)
            .map(|i| {
                let lon = -1.0 + 2.0 * i as f64 / n as f64;
                Point::from([colat.sin() * lon.cos(), colat.sin() * lon.sin(), colat.cos()])
            })
            .collect();
        DiscreteCurve::with_fixed_ends(Surface::Sphere, pts).unwrap()
    };
    let g = compute_geometry(&ring(FRAC_PI_4)).unwrap();
    for k in &g.kappa[1..n] {
        assert!((k.abs() - 1.0).abs() < 1e-5, "{k}");
    }
    let g = compute_geometry(&ring(0.5 * PI)).unwrap();
    assert!(g.kappa.iter().all(|k| k.abs() < 1e-6));
}

#[test]
fn hyperbolic_geodesic_has_zero_curvature() {
    let n = 64;
    let pts = (0..=n)
        .map(|i| {
            let s = -1.0 + 2.0 * i as f64 / n as f64;
            Point::from([s.cosh(), s.sinh(), 0.0])
        })
        .collect();
    let c = DiscreteCurve::with_fixed_ends(Surface::Hyperbolic, pts).unwrap();
    let g = compute_geometry(&c).unwrap();
    assert!(g.kappa.iter().all(|k| k.abs() < 1e-8));
    assert!((g.total_length - 2.0).abs() < 1e-12);
}

#[test]
fn semicircle_turning_is_pi() {
    let n = 1024;
    let c = plane_curve(n, |u| ((PI * u).cos(), (PI * u).sin()));
    let g = compute_geometry(&c).unwrap();
    assert!((total_turning(&g) - PI).abs() < 1e-4);
}

#[test]
fn embedded_graph_has_no_intersections() {
    let c = plane_curve(200, |u| (u, 0.3 * (3.0 * PI * u).sin()));
    assert_eq!(self_intersection_count(&c), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chord_arc_ratio_is_at_most_one(a in -0.5..0.5f64, b in -0.5..0.5f64, m in 1u32..4) {
        let c = plane_curve(96, |u| (u, a * (PI * u).sin() + b * (f64::from(m) * PI * u).sin()));
        let g = compute_geometry(&c).unwrap();
        let scan = chord_arc_scan(&c, &g);
        prop_assert!(scan.theta_min <= 1.0 + 1e-12 && scan.theta_min > 0.0);
    }

    #[test]
    fn alpha_is_monotone_in_eps(a in -0.5..0.5f64, e1 in 0.01..0.5f64, e2 in 0.01..0.5f64) {
        let c = plane_curve(128, |u| (u, a * (2.0 * PI * u).sin()));
        let g = compute_geometry(&c).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(alpha_epsilon(&g, lo) <= alpha_epsilon(&g, hi) + 1e-12);
    }
}
