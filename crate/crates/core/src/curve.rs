//! Discrete open curves on a model surface and their derived geometry.
//!
//! A curve is sampled at `n + 1` nodes over a uniform parameter grid. Tangent,
//! normal and geodesic curvature come from second-order finite differences of
//! the ambient coordinates; since the unit normal `N` is tangent to the
//! surface, `κ = ⟨∂ᵤ²F, N⟩ / v²` needs no Christoffel symbols on any of the
//! three models.
//!
//! Arclength is measured along the geodesic polygon through the nodes, so
//! `D(Pᵢ, Pⱼ) ≤ L(i, j)` holds for every pair by the triangle inequality.
//! Integrals `∫ f ds` use the trapezoid rule against that arclength.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeoflowError, Result};
use crate::spline::CubicSpline;
use crate::surface::{Point, Surface, TangentVector, Vec3};

/// Minimum number of parameter intervals.
pub const MIN_INTERVALS: usize = 8;
const MIN_SPEED: f64 = 1e-12;

/// A prescribed endpoint trajectory `t ↦ P(t)`.
#[derive(Clone)]
pub struct Trajectory(Arc<dyn Fn(f64) -> Point + Send + Sync>);

impl Trajectory {
    pub fn new(f: impl Fn(f64) -> Point + Send + Sync + 'static) -> Self {
        Trajectory(Arc::new(f))
    }

    pub fn at(&self, t: f64) -> Point {
        (self.0)(t)
    }
}

impl fmt::Debug for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Trajectory(..)")
    }
}

/// Boundary condition at one end of the curve.
#[derive(Debug, Clone)]
pub enum Boundary {
    Fixed(Point),
    Prescribed(Trajectory),
}

impl Boundary {
    pub fn is_fixed(&self) -> bool {
        matches!(self, Boundary::Fixed(_))
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteCurve {
    surface: Surface,
    span: (f64, f64),
    points: Vec<Point>,
    start: Boundary,
    end: Boundary,
}

impl DiscreteCurve {
    /// Builds a curve over the parameter interval `[0, 1]`.
    pub fn new(surface: Surface, points: Vec<Point>, start: Boundary, end: Boundary) -> Result<Self> {
        Self::with_span(surface, (0.0, 1.0), points, start, end)
    }

    /// Curve whose endpoints are held fixed at the first and last node.
    pub fn with_fixed_ends(surface: Surface, points: Vec<Point>) -> Result<Self> {
        let (a, b) = match (points.first(), points.last()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => return Err(GeoflowError::InvalidCurve("no points".into())),
        };
        Self::new(surface, points, Boundary::Fixed(a), Boundary::Fixed(b))
    }

    pub fn with_span(
        surface: Surface,
        span: (f64, f64),
        points: Vec<Point>,
        start: Boundary,
        end: Boundary,
    ) -> Result<Self> {
        if points.len() < MIN_INTERVALS + 1 {
            return Err(GeoflowError::InvalidCurve(format!(
                "need at least {} nodes, got {}",
                MIN_INTERVALS + 1,
                points.len()
            )));
        }
        if !(span.1 > span.0) || !span.0.is_finite() || !span.1.is_finite() {
            return Err(GeoflowError::InvalidCurve("parameter span must be increasing".into()));
        }
        for (i, p) in points.iter().enumerate() {
            surface
                .point(*p.coords())
                .map_err(|e| GeoflowError::InvalidCurve(format!("node {i}: {e}")))?;
        }
        for (i, w) in points.windows(2).enumerate() {
            if surface.distance(&w[0], &w[1]) <= 0.0 {
                return Err(GeoflowError::InvalidCurve(format!(
                    "nodes {i} and {} coincide",
                    i + 1
                )));
            }
        }
        for (label, bc, p) in [("start", &start, &points[0]), ("end", &end, points.last().unwrap())] {
            if let Boundary::Fixed(a) = bc {
                if a != p {
                    return Err(GeoflowError::InvalidCurve(format!(
                        "{label} node does not match its fixed endpoint"
                    )));
                }
            }
        }
        Ok(DiscreteCurve { surface, span, points, start, end })
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Number of parameter intervals `n` (there are `n + 1` nodes).
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn span(&self) -> (f64, f64) {
        self.span
    }

    /// Uniform parameter spacing.
    pub fn spacing(&self) -> f64 {
        (self.span.1 - self.span.0) / self.intervals() as f64
    }

    pub fn params(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..=self.intervals()).map(|i| self.span.0 + h * i as f64).collect()
    }

    pub fn start(&self) -> &Boundary {
        &self.start
    }

    pub fn end(&self) -> &Boundary {
        &self.end
    }

    pub fn has_fixed_ends(&self) -> bool {
        self.start.is_fixed() && self.end.is_fixed()
    }

    /// Replaces the node positions, keeping grid and boundary data.
    pub(crate) fn set_points(&mut self, points: Vec<Point>) {
        debug_assert_eq!(points.len(), self.points.len());
        self.points = points;
    }
}

/// Per-node derived quantities of a [`DiscreteCurve`].
#[derive(Debug, Clone)]
pub struct CurveGeometry {
    /// Metric speed `|∂ᵤF|_g`.
    pub v: Vec<f64>,
    pub tangent: Vec<TangentVector>,
    pub normal: Vec<TangentVector>,
    /// Geodesic curvature `κ = ⟨∇_T T, N⟩`.
    pub kappa: Vec<f64>,
    /// Cumulative arclength from the first node.
    pub s: Vec<f64>,
    pub total_length: f64,
}

impl CurveGeometry {
    pub fn intervals(&self) -> usize {
        self.s.len() - 1
    }

    /// Length of segment `i` (between nodes `i` and `i + 1`).
    pub fn segment(&self, i: usize) -> f64 {
        self.s[i + 1] - self.s[i]
    }

    pub fn min_segment(&self) -> f64 {
        (0..self.intervals()).map(|i| self.segment(i)).fold(f64::INFINITY, f64::min)
    }

    /// Trapezoid weight of node `i` in `∫ f ds`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        let n = self.intervals();
        let left = if i > 0 { self.segment(i - 1) } else { 0.0 };
        let right = if i < n { self.segment(i) } else { 0.0 };
        0.5 * (left + right)
    }

    /// Trapezoid rule for `∫ f ds` with nodal values `f(i)`.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        (0..=self.intervals()).map(|i| self.weight(i) * f(i)).sum()
    }
}

/// Tangent, normal, curvature and arclength of `curve`.
pub fn compute_geometry(curve: &DiscreteCurve) -> Result<CurveGeometry> {
    let surface = curve.surface;
    let pts = &curve.points;
    let n = pts.len() - 1;
    let h = curve.spacing();
    let x = |i: usize| *pts[i].coords();

    let mut v = Vec::with_capacity(n + 1);
    let mut tangent = Vec::with_capacity(n + 1);
    let mut normal = Vec::with_capacity(n + 1);
    let mut kappa = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (d1, d2) = if i == 0 {
            (
                (-3.0 * x(0) + 4.0 * x(1) - x(2)) / (2.0 * h),
                (2.0 * x(0) - 5.0 * x(1) + 4.0 * x(2) - x(3)) / (h * h),
            )
        } else if i == n {
            (
                (3.0 * x(n) - 4.0 * x(n - 1) + x(n - 2)) / (2.0 * h),
                (2.0 * x(n) - 5.0 * x(n - 1) + 4.0 * x(n - 2) - x(n - 3)) / (h * h),
            )
        } else {
            (
                (x(i + 1) - x(i - 1)) / (2.0 * h),
                (x(i + 1) - 2.0 * x(i) + x(i - 1)) / (h * h),
            )
        };
        let p = &pts[i];
        let d1 = surface.to_tangent(p, &d1);
        let speed = surface.norm(&d1);
        if !(speed >= MIN_SPEED) {
            return Err(GeoflowError::DegenerateParametrization(i));
        }
        let t = d1 / speed;
        let nv = surface.rotate_quarter(p, &t);
        kappa.push(surface.dot(&d2, &nv) / (speed * speed));
        v.push(speed);
        tangent.push(TangentVector::new(*p, t));
        normal.push(TangentVector::new(*p, nv));
    }

    // Compensated (Neumaier) summation: length differences between nearby
    // states are resolved down to a few ulp of L.
    let mut s = Vec::with_capacity(n + 1);
    s.push(0.0);
    let (mut acc, mut comp) = (0.0f64, 0.0f64);
    for w in pts.windows(2) {
        let d = surface.distance(&w[0], &w[1]);
        let sum = acc + d;
        comp += if acc.abs() >= d.abs() { (acc - sum) + d } else { (d - sum) + acc };
        acc = sum;
        s.push(acc + comp);
    }
    let total_length = s[n];
    Ok(CurveGeometry { v, tangent, normal, kappa, s, total_length })
}

/// Intrinsic distance `L(i, j)` along the curve, `i ≤ j`.
pub fn intrinsic_length(geom: &CurveGeometry, i: usize, j: usize) -> f64 {
    debug_assert!(i <= j);
    geom.s[j] - geom.s[i]
}

/// Result of a brute-force scan of the chord-arc ratio `D/L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordArcScan {
    pub theta_min: f64,
    pub argmin: (usize, usize),
    /// Whether the minimizing pair avoids the boundary of `I × I` and is a
    /// strict local minimum among its neighbouring pairs.
    pub interior: bool,
}

#[inline]
fn chord_arc_ratio(surface: Surface, pts: &[Point], geom: &CurveGeometry, i: usize, j: usize) -> f64 {
    if i == j {
        return 1.0;
    }
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    // D ≤ L up to roundoff; the cap keeps the ratio in (0, 1].
    (surface.distance(&pts[i], &pts[j]) / intrinsic_length(geom, i, j)).min(1.0)
}

/// Minimum of `D(Pᵢ, Pⱼ) / L(i, j)` over all pairs `i < j`.
pub fn chord_arc_scan(curve: &DiscreteCurve, geom: &CurveGeometry) -> ChordArcScan {
    let surface = curve.surface;
    let pts = &curve.points;
    let n = pts.len() - 1;
    let mut best = (f64::INFINITY, (0, n));
    for i in 0..n {
        for j in i + 1..=n {
            let r = chord_arc_ratio(surface, pts, geom, i, j);
            if r < best.0 {
                best = (r, (i, j));
            }
        }
    }
    let (theta_min, (i, j)) = best;
    let mut interior = i > 0 && j < n;
    if interior {
        'outer: for di in -1i64..=1 {
            for dj in -1i64..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a < 0 || b > n as i64 || a >= b {
                    continue;
                }
                if chord_arc_ratio(surface, pts, geom, a as usize, b as usize) <= theta_min {
                    interior = false;
                    break 'outer;
                }
            }
        }
    }
    ChordArcScan { theta_min, argmin: (i, j), interior }
}

/// Planar chart in which the geodesic segments between nodes are straight:
/// identity on the plane, the Beltrami–Klein model on the hyperboloid and the
/// gnomonic projection (about `center`) on the sphere.
fn straightening_chart(surface: Surface, pts: &[Point]) -> Option<Vec<[f64; 2]>> {
    match surface {
        Surface::Plane => Some(pts.iter().map(|p| [p.coords()[0], p.coords()[1]]).collect()),
        Surface::Hyperbolic => Some(
            pts.iter()
                .map(|p| {
                    let c = p.coords();
                    [c[1] / c[0], c[2] / c[0]]
                })
                .collect(),
        ),
        Surface::Sphere => {
            let mean: Vec3 = pts.iter().map(|p| *p.coords()).sum();
            let norm = mean.norm();
            if norm < 1e-12 {
                return None;
            }
            let c = mean / norm;
            if pts.iter().any(|p| p.coords().dot(&c) < 1e-3) {
                return None;
            }
            let seed = if c[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
            let e1 = (seed - c * c.dot(&seed)).normalize();
            let e2 = c.cross(&e1);
            Some(
                pts.iter()
                    .map(|p| {
                        let x = p.coords();
                        let z = x.dot(&c);
                        [x.dot(&e1) / z, x.dot(&e2) / z]
                    })
                    .collect(),
            )
        }
    }
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Whether segments `p0→p1` and `q0→q1` meet, counting each contact once via
/// half-open parameter ranges `[0, 1)` on both segments.
fn segments_meet(p0: [f64; 2], p1: [f64; 2], q0: [f64; 2], q1: [f64; 2]) -> bool {
    const TOL: f64 = 1e-12;
    let r = [p1[0] - p0[0], p1[1] - p0[1]];
    let s = [q1[0] - q0[0], q1[1] - q0[1]];
    let qp = [q0[0] - p0[0], q0[1] - p0[1]];
    let denom = cross2(r, s);
    let scale = (r[0].hypot(r[1]) * s[0].hypot(s[1])).max(f64::MIN_POSITIVE);
    if denom.abs() <= TOL * scale {
        // Parallel: only collinear overlaps count.
        if cross2(qp, r).abs() > TOL * scale.sqrt() * qp[0].hypot(qp[1]).max(1.0) {
            return false;
        }
        let rr = r[0] * r[0] + r[1] * r[1];
        if rr == 0.0 {
            return false;
        }
        let t0 = (qp[0] * r[0] + qp[1] * r[1]) / rr;
        let t1 = t0 + (s[0] * r[0] + s[1] * r[1]) / rr;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        return lo < 1.0 - TOL && hi >= -TOL;
    }
    let t = cross2(qp, s) / denom;
    let u = cross2(qp, r) / denom;
    (-TOL..1.0 - TOL).contains(&t) && (-TOL..1.0 - TOL).contains(&u)
}

/// Great-circle arc test used on the sphere when no gnomonic chart covers the
/// whole curve.
fn arcs_meet(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> bool {
    let n1 = a.cross(b);
    let n2 = c.cross(d);
    let line = n1.cross(&n2);
    if line.norm() < 1e-14 {
        return false;
    }
    let on_arc = |x: &Vec3, p: &Vec3, q: &Vec3, n: &Vec3| p.cross(x).dot(n) >= -1e-14 && x.cross(q).dot(n) > 1e-14;
    let x = line.normalize();
    [x, -x].iter().any(|x| on_arc(x, a, b, &n1) && on_arc(x, c, d, &n2))
}

/// Number of contacts between non-adjacent segments of the curve, each
/// segment realized as the geodesic arc between consecutive nodes.
pub fn self_intersection_count(curve: &DiscreteCurve) -> usize {
    let pts = &curve.points;
    let n = pts.len() - 1;
    let mut count = 0;
    if let Some(chart) = straightening_chart(curve.surface, pts) {
        let bbox: Vec<[f64; 4]> = (0..n)
            .map(|i| {
                let (a, b) = (chart[i], chart[i + 1]);
                [a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1])]
            })
            .collect();
        for a in 0..n {
            for b in a + 2..n {
                let (x, y) = (&bbox[a], &bbox[b]);
                if x[1] < y[0] - 1e-12 || y[1] < x[0] - 1e-12 || x[3] < y[2] - 1e-12 || y[3] < x[2] - 1e-12 {
                    continue;
                }
                if segments_meet(chart[a], chart[a + 1], chart[b], chart[b + 1]) {
                    count += 1;
                }
            }
        }
    } else {
        for a in 0..n {
            for b in a + 2..n {
                if arcs_meet(pts[a].coords(), pts[a + 1].coords(), pts[b].coords(), pts[b + 1].coords()) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Resamples the curve so that its nodes are equally spaced in arclength.
///
/// Each ambient coordinate is interpolated against arclength with a
/// not-a-knot cubic spline and the result projected back onto the surface.
/// Endpoints are copied unchanged. Because arclength is re-measured on the
/// new polygon, a second pass is applied to remove the residual spacing
/// error of the first.
pub fn reparametrize(curve: &DiscreteCurve, geom: &CurveGeometry) -> Result<DiscreteCurve> {
    let first = resample_uniform(curve, geom)?;
    let g1 = compute_geometry(&first)?;
    resample_uniform(&first, &g1)
}

fn resample_uniform(curve: &DiscreteCurve, geom: &CurveGeometry) -> Result<DiscreteCurve> {
    let surface = curve.surface;
    let pts = &curve.points;
    let n = pts.len() - 1;
    let splines: Vec<CubicSpline> = (0..3)
        .map(|k| {
            let y: Vec<f64> = pts.iter().map(|p| p.coords()[k]).collect();
            CubicSpline::not_a_knot(&geom.s, &y)
        })
        .collect();
    let step = geom.total_length / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(pts[0]);
    let mut seg = 0;
    for k in 1..n {
        let target = step * k as f64;
        while seg + 1 < n && geom.s[seg + 1] <= target {
            seg += 1;
        }
        let raw = Vec3::new(
            splines[0].eval_in(seg, target),
            splines[1].eval_in(seg, target),
            splines[2].eval_in(seg, target),
        );
        out.push(surface.project(&raw)?);
    }
    out.push(pts[n]);
    let mut next = curve.clone();
    next.set_points(out);
    Ok(next)
}

/// Total absolute curvature `∫ |κ| ds`.
pub fn total_turning(geom: &CurveGeometry) -> f64 {
    geom.integrate(|i| geom.kappa[i].abs())
}

/// `α_ε = sup_{|J| < ε} |∫_J κ ds|` over sub-arcs `J` of the curve.
///
/// The cumulative integral `K(s)` is piecewise quadratic (κ linear between
/// nodes). Candidates are every node-to-node window of length at most `ε`
/// (found with monotone deques) and every window of length exactly `ε`
/// anchored at a node.
pub fn alpha_epsilon(geom: &CurveGeometry, eps: f64) -> f64 {
    assert!(eps > 0.0, "eps must be positive");
    let n = geom.intervals();
    let s = &geom.s;
    let kappa = &geom.kappa;
    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        cum[i + 1] = cum[i] + 0.5 * (kappa[i] + kappa[i + 1]) * geom.segment(i);
    }
    let cum_at = |t: f64| -> f64 {
        let t = t.clamp(0.0, geom.total_length);
        let i = s.partition_point(|&x| x <= t).saturating_sub(1).min(n - 1);
        let len = geom.segment(i);
        let tau = t - s[i];
        let slope = if len > 0.0 { (kappa[i + 1] - kappa[i]) / len } else { 0.0 };
        cum[i] + kappa[i] * tau + 0.5 * slope * tau * tau
    };

    let mut best: f64 = 0.0;
    let mut maxq: std::collections::VecDeque<usize> = Default::default();
    let mut minq: std::collections::VecDeque<usize> = Default::default();
    let mut lo = 0;
    for j in 0..=n {
        while s[j] - s[lo] > eps {
            lo += 1;
        }
        while maxq.back().is_some_and(|&b| cum[b] <= cum[j]) {
            maxq.pop_back();
        }
        maxq.push_back(j);
        while minq.back().is_some_and(|&b| cum[b] >= cum[j]) {
            minq.pop_back();
        }
        minq.push_back(j);
        while maxq.front().is_some_and(|&f| f < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&f| f < lo) {
            minq.pop_front();
        }
        let hi = cum[*maxq.front().unwrap()];
        let low = cum[*minq.front().unwrap()];
        best = best.max((cum[j] - low).abs()).max((hi - cum[j]).abs());
    }
    for i in 0..=n {
        if s[i] + eps <= geom.total_length {
            best = best.max((cum_at(s[i] + eps) - cum[i]).abs());
        }
        if s[i] - eps >= 0.0 {
            best = best.max((cum[i] - cum_at(s[i] - eps)).abs());
        }
    }
    best
}

/// Distance from `x` to the geodesic segment `[a, b]`.
fn segment_distance(surface: Surface, x: &Point, a: &Point, b: &Point) -> Result<f64> {
    if surface == Surface::Plane {
        let (x, a, b) = (x.coords(), a.coords(), b.coords());
        let d = b - a;
        let len2 = d.dot(&d);
        let t = if len2 > 0.0 { ((x - a).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
        return Ok((x - (a + d * t)).norm());
    }
    // Golden-section search; the distance to a short geodesic is unimodal.
    let f = |t: f64| -> Result<f64> { Ok(surface.distance(x, &surface.geodesic_point(a, b, t)?)) };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut c, mut d) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(fc.min(fd).min(surface.distance(x, a)).min(surface.distance(x, b)))
}

/// Symmetric Hausdorff distance between two geodesic polygons. Each polygon
/// is densified by `refine` points per segment and measured against the
/// segments of the other.
pub fn hausdorff_distance(surface: Surface, a: &[Point], b: &[Point], refine: usize) -> Result<f64> {
    let refine = refine.max(1);
    let densify = |pts: &[Point]| -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(pts.len() * refine);
        for w in pts.windows(2) {
            for k in 0..refine {
                out.push(surface.geodesic_point(&w[0], &w[1], k as f64 / refine as f64)?);
            }
        }
        if let Some(last) = pts.last() {
            out.push(*last);
        }
        Ok(out)
    };
    let directed = |x: &[Point], y: &[Point]| -> Result<f64> {
        let seg_len: Vec<f64> = y.windows(2).map(|w| surface.distance(&w[0], &w[1])).collect();
        let mut worst: f64 = 0.0;
        for p in x {
            let node: Vec<f64> = y.iter().map(|q| surface.distance(p, q)).collect();
            let mut best = node.iter().copied().fold(f64::INFINITY, f64::min);
            for (k, w) in y.windows(2).enumerate() {
                // Lower bound from the triangle inequality prunes most segments.
                if node[k].min(node[k + 1]) - seg_len[k] < best {
                    best = best.min(segment_distance(surface, p, &w[0], &w[1])?);
                }
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    Ok(directed(&densify(a)?, b)?.max(directed(&densify(b)?, a)?))
}
