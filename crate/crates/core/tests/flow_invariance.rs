use std::f64::consts::PI;

use geoflow_core::diagnostics::{monotonicity_residual, record};
use geoflow_core::flow::{kappa_pde_residual, run};
use geoflow_core::{
    DiagnosticRecord, DiagnosticsConfig, DiscreteCurve, FlowConfig, FlowState, MonotonicityProbe, Point, Surface,
    TangentVector, Vec3,
};
use nalgebra::Matrix3;

/// Sine-perturbed geodesic from `a` to `b`.
fn bowed(s: Surface, a: Point, b: Point, amp: f64, n: usize) -> DiscreteCurve {
    let chord = s.log_map(&a, &b).unwrap();
    let pts = (0..=n)
        .map(|i| {
            let u = i as f64 / n as f64;
            let base = s.exp_map(&TangentVector::new(a, chord.vec * u));
            if i == 0 || i == n {
                return if i == 0 { a } else { b };
            }
            let t = s.log_map(&base, &b).unwrap().vec;
            let nrm = s.rotate_quarter(&base, &(t / s.norm(&t)));
            s.exp_map(&TangentVector::new(base, nrm * (amp * (PI * u).sin())))
        })
        .collect();
    DiscreteCurve::with_fixed_ends(s, pts).unwrap()
}

fn three_states(c: DiscreteCurve, every: usize) -> [FlowState; 3] {
    let cfg = FlowConfig { regrid_every: 0, record_every: every, t_max: 1.0, ..FlowConfig::default() };
    let mut st = FlowState::new(c).unwrap();
    let mut out = Vec::new();
    for k in 0..=2 * every {
        if k % every == 0 {
            out.push(st.clone());
        }
        st.step(&cfg).unwrap();
    }
    out.try_into().unwrap()
}

fn moved(c: &DiscreteCurve, m: &Matrix3<f64>, shift: Vec3) -> DiscreteCurve {
    let pts = c.points().iter().map(|p| Point::from_coords_unchecked(m * p.coords() + shift)).collect();
    DiscreteCurve::with_fixed_ends(c.surface(), pts).unwrap()
}

fn rotation(axis: Vec3, angle: f64) -> Matrix3<f64> {
    *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).matrix()
}

/// Lorentz boost in the `(x0, x1)` plane, an isometry of the hyperboloid.
fn boost(r: f64) -> Matrix3<f64> {
    Matrix3::new(r.cosh(), r.sinh(), 0.0, r.sinh(), r.cosh(), 0.0, 0.0, 0.0, 1.0)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn check_invariance(c: DiscreteCurve, m: Matrix3<f64>, shift: Vec3, probe: MonotonicityProbe) {
    let image = moved(&c, &m, shift);
    let probe_image = MonotonicityProbe {
        p_star: Point::from_coords_unchecked(m * probe.p_star.coords() + shift),
        t_star: probe.t_star,
    };
    let a = three_states(c, 5);
    let b = three_states(image, 5);
    let ra = kappa_pde_residual([&a[0], &a[1], &a[2]]).unwrap();
    let rb = kappa_pde_residual([&b[0], &b[1], &b[2]]).unwrap();
    assert!(close(ra, rb, 1e-6), "κ residual {ra:e} vs {rb:e}");
    let ma = monotonicity_residual([&a[0], &a[1], &a[2]], &probe).unwrap();
    let mb = monotonicity_residual([&b[0], &b[1], &b[2]], &probe_image).unwrap();
    assert!(close(ma, mb, 1e-5) || (ma - mb).abs() < 1e-12, "monotonicity residual {ma:e} vs {mb:e}");
    let cfg = DiagnosticsConfig { alpha_eps: Some(0.1), probe: Some(probe) };
    let cfg_image = DiagnosticsConfig { alpha_eps: Some(0.1), probe: Some(probe_image) };
    let (x, y): (DiagnosticRecord, DiagnosticRecord) =
        (record(&a[2], &cfg).unwrap(), record(&b[2], &cfg_image).unwrap());
    for (u, v) in [
        (x.length, y.length),
        (x.kappa_sq_integral, y.kappa_sq_integral),
        (x.turning, y.turning),
        (x.theta_min, y.theta_min),
        (x.q_value.unwrap(), y.q_value.unwrap()),
    ] {
        assert!(close(u, v, 1e-9), "{u} vs {v}");
    }
}

#[test]
fn plane_residuals_are_invariant_under_rigid_motions() {
    let c = bowed(Surface::Plane, Point::from([0.0, 0.0, 0.0]), Point::from([1.0, 0.0, 0.0]), 0.1, 64);
    let probe = MonotonicityProbe { p_star: Point::from([0.5, 0.0, 0.0]), t_star: 0.5 };
    check_invariance(c, rotation(Vec3::z(), 0.7), Vec3::new(3.0, -2.0, 0.0), probe);
}

#[test]
fn sphere_residuals_are_invariant_under_rotations() {
    let s = Surface::Sphere;
    let a = Point::from([(0.5f64).cos(), -(0.5f64).sin(), 0.0]);
    let b = Point::from([(0.5f64).cos(), (0.5f64).sin(), 0.0]);
    let c = bowed(s, a, b, 0.2, 64);
    let probe = MonotonicityProbe { p_star: s.origin(), t_star: 0.5 };
    check_invariance(c, rotation(Vec3::new(1.0, 2.0, -0.5), 1.1), Vec3::zeros(), probe);
}

#[test]
fn hyperbolic_residuals_are_invariant_under_isometries() {
    let s = Surface::Hyperbolic;
    let a = Point::from([(0.5f64).cosh(), -(0.5f64).sinh(), 0.0]);
    let b = Point::from([(0.5f64).cosh(), (0.5f64).sinh(), 0.0]);
    let c = bowed(s, a, b, 0.1, 64);
    let probe = MonotonicityProbe { p_star: s.origin(), t_star: 0.5 };
    // A boost followed by a rotation about the x0 axis.
    let m = rotation(Vec3::x(), 0.4) * boost(0.6);
    check_invariance(c, m, Vec3::zeros(), probe);
}

#[test]
fn length_decreases_every_step_on_all_surfaces() {
    let cases = [
        (Surface::Plane, Point::from([0.0, 0.0, 0.0]), Point::from([1.0, 0.0, 0.0])),
        (Surface::Sphere, Point::from([(0.5f64).cos(), -(0.5f64).sin(), 0.0]), Point::from([(0.5f64).cos(), (0.5f64).sin(), 0.0])),
        (
            Surface::Hyperbolic,
            Point::from([(0.5f64).cosh(), -(0.5f64).sinh(), 0.0]),
            Point::from([(0.5f64).cosh(), (0.5f64).sinh(), 0.0]),
        ),
    ];
    for (s, a, b) in cases {
        let cfg = FlowConfig { regrid_every: 0, ..FlowConfig::default() };
        let mut st = FlowState::new(bowed(s, a, b, 0.2, 48)).unwrap();
        let mut last = st.geom.total_length;
        for _ in 0..2000 {
            st.step(&cfg).unwrap();
            assert!(st.geom.total_length < last, "{s:?} at t={}", st.t);
            last = st.geom.total_length;
        }
    }
}

#[test]
fn run_records_are_time_ordered_and_final_state_recorded() {
    let c = bowed(Surface::Sphere, Point::from([(0.5f64).cos(), -(0.5f64).sin(), 0.0]), Point::from([(0.5f64).cos(), (0.5f64).sin(), 0.0]), 0.2, 32);
    let cfg = FlowConfig { t_max: 0.05, record_every: 7, regrid_every: 10, ..FlowConfig::default() };
    let (st, recs) = run(c, &cfg, &DiagnosticsConfig::default(), &mut []).unwrap();
    assert!(recs.windows(2).all(|w| w[0].t < w[1].t));
    assert_eq!(recs.last().unwrap().t, st.t);
    assert_eq!(st.t, 0.05);
}
