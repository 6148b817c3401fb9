//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use geoflow_core::{DiscreteCurve, Point, Surface, TangentVector};

/// Sine-perturbed geodesic with `n` intervals between two points 1 apart
/// (in the model's own distance) on `surface`.
pub fn bowed_geodesic(surface: Surface, n: usize, amplitude: f64) -> DiscreteCurve {
    let (a, b) = match surface {
        Surface::Plane => (Point::from([0.0, 0.0, 0.0]), Point::from([1.0, 0.0, 0.0])),
        Surface::Sphere => (Point::from([0.5f64.cos(), -0.5f64.sin(), 0.0]), Point::from([0.5f64.cos(), 0.5f64.sin(), 0.0])),
        Surface::Hyperbolic => {
            (Point::from([0.5f64.cosh(), -0.5f64.sinh(), 0.0]), Point::from([0.5f64.cosh(), 0.5f64.sinh(), 0.0]))
        }
    };
    let chord = surface.log_map(&a, &b).expect("endpoints are not antipodal");
    let pts = (0..=n)
        .map(|i| {
            let u = i as f64 / n as f64;
            if i == 0 || i == n {
                return if i == 0 { a } else { b };
            }
            let base = surface.exp_map(&TangentVector::new(a, chord.vec * u));
            let t = surface.log_map(&base, &b).expect("interior point").vec;
            let normal = surface.rotate_quarter(&base, &(t / surface.norm(&t)));
            surface.exp_map(&TangentVector::new(base, normal * (amplitude * (PI * u).sin())))
        })
        .collect();
    DiscreteCurve::with_fixed_ends(surface, pts).expect("valid fixture")
}
