use geoflow_core::{Point, Surface, TangentVector, Vec3};
use proptest::prelude::*;

const SURFACES: [Surface; 3] = [Surface::Plane, Surface::Sphere, Surface::Hyperbolic];

/// A point at geodesic polar coordinates `(r, θ)` about the model origin.
fn polar(s: Surface, r: f64, th: f64) -> Point {
    let o = s.origin();
    let dir = match s {
        Surface::Plane => Vec3::new(th.cos(), th.sin(), 0.0),
        _ => Vec3::new(0.0, th.cos(), th.sin()),
    };
    s.exp_map(&TangentVector::new(o, dir * r))
}

fn point_strategy(s: Surface) -> impl Strategy<Value = Point> {
    let max_r = match s {
        Surface::Plane => 5.0,
        Surface::Sphere => 3.0,
        Surface::Hyperbolic => 3.0,
    };
    (0.0..max_r, 0.0..std::f64::consts::TAU).prop_map(move |(r, th)| polar(s, r, th))
}

fn surface_strategy() -> impl Strategy<Value = Surface> {
    prop::sample::select(SURFACES.to_vec())
}

fn triple() -> impl Strategy<Value = (Surface, Point, Point, Point)> {
    surface_strategy().prop_flat_map(|s| (Just(s), point_strategy(s), point_strategy(s), point_strategy(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn triangle_inequality((s, a, b, c) in triple()) {
        let (ab, bc, ac) = (s.distance(&a, &b), s.distance(&b, &c), s.distance(&a, &c));
        prop_assert!(ac <= ab + bc + 1e-12 * (1.0 + ab + bc));
    }

    #[test]
    fn distance_is_symmetric_and_definite((s, a, b, _c) in triple()) {
        let ab = s.distance(&a, &b);
        prop_assert!((ab - s.distance(&b, &a)).abs() <= 1e-13 * (1.0 + ab));
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(s.distance(&a, &a), 0.0);
        if (a.coords() - b.coords()).norm() > 1e-9 {
            prop_assert!(ab > 0.0);
        }
    }

    #[test]
    fn exp_inverts_log((s, a, b, _c) in triple()) {
        // Stay away from the cut locus on the sphere.
        prop_assume!(s != Surface::Sphere || s.distance(&a, &b) < std::f64::consts::PI - 1e-3);
        let v = s.log_map(&a, &b).unwrap();
        prop_assert!((s.norm(&v.vec) - s.distance(&a, &b)).abs() < 1e-10);
        let back = s.exp_map(&v);
        prop_assert!(s.distance(&back, &b) < 1e-9 * (1.0 + s.distance(&a, &b)));
        prop_assert!(s.constraint_residual(back.coords()).abs() < 1e-12 * (1.0 + back.coords().norm_squared()));
    }

    #[test]
    fn log_inverts_exp(s in surface_strategy(), r in 0.0..1.5f64, th in 0.0..std::f64::consts::TAU,
                       r2 in 0.0..2.5f64, th2 in 0.0..std::f64::consts::TAU) {
        let p = polar(s, r, th);
        let dir = s.unit_tangent(&p, &Vec3::new(th2.cos(), th2.sin(), th2.cos() * th2.sin())
            .map(|c| c + 0.1)).unwrap();
        let v = TangentVector::new(p, dir * r2);
        let q = s.exp_map(&v);
        let w = s.log_map(&p, &q).unwrap();
        prop_assert!((w.vec - v.vec).norm() < 1e-9 * (1.0 + r2 * r2));
    }

    #[test]
    fn distance_matches_quadrature((s, a, b, _c) in triple()) {
        prop_assume!(s != Surface::Sphere || s.distance(&a, &b) < std::f64::consts::PI - 0.1);
        // Length of the geodesic from a fine polyline of ambient chords,
        // measured with the ambient (Euclidean or Minkowski) form.
        let m = 2000;
        let pts: Vec<Point> = (0..=m).map(|k| s.geodesic_point(&a, &b, k as f64 / m as f64).unwrap()).collect();
        let len: f64 = pts.windows(2).map(|w| {
            let d = w[1].coords() - w[0].coords();
            s.dot(&d, &d).max(0.0).sqrt()
        }).sum();
        let d = s.distance(&a, &b);
        prop_assert!((len - d).abs() < 1e-6 * (1.0 + d), "quadrature {len} vs {d}");
    }
}

#[test]
fn nearby_points_keep_full_precision() {
    for s in SURFACES {
        let a = polar(s, 0.3, 0.2);
        for k in 1..10 {
            let eps = 10f64.powi(-k);
            let dir = s.unit_tangent(&a, &Vec3::new(0.3, 1.0, 0.7)).unwrap();
            let b = s.exp_map(&TangentVector::new(a, dir * eps));
            let d = s.distance(&a, &b);
            assert!((d / eps - 1.0).abs() < 1e-7, "{s:?} eps={eps}: {d}");
        }
    }
}
