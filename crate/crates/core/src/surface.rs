//! The three simply connected constant-curvature surfaces, realized in
//! ambient coordinates:
//!
//! - `Sphere`: the unit sphere in Euclidean R³ (S = +1),
//! - `Plane`: the plane `x₂ = 0` in R³ (S = 0),
//! - `Hyperbolic`: the upper sheet of `−x₀² + x₁² + x₂² = −1` in Minkowski
//!   space with form `diag(−1, +1, +1)` (S = −1).
//!
//! Geodesics, distances and the exponential/logarithm maps all have closed
//! forms in these models, so every routine here is exact up to roundoff.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{GeoflowError, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance on the model constraint for a coordinate triple to count as a point.
pub const POINT_TOLERANCE: f64 = 1e-12;
/// Slack allowed on the arccos/arccosh domain before a pair is rejected.
const DOMAIN_SLACK: f64 = 1e-9;
/// Base points of two tangent vectors must agree to this accuracy.
const BASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Sphere,
    Plane,
    Hyperbolic,
}

/// A point of a model surface, stored in ambient coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point(Vec3);

impl Point {
    /// Wraps raw coordinates without checking the model constraint.
    pub fn from_coords_unchecked(coords: Vec3) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }
}

impl From<[f64; 3]> for Point {
    fn from(a: [f64; 3]) -> Self {
        Point(Vec3::new(a[0], a[1], a[2]))
    }
}

impl From<Point> for [f64; 3] {
    fn from(p: Point) -> Self {
        p.to_array()
    }
}

/// A tangent vector `vec` attached at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub vec: Vec3,
}

impl TangentVector {
    pub fn new(base: Point, vec: Vec3) -> Self {
        TangentVector { base, vec }
    }
}

impl Surface {
    pub fn gauss_curvature(self) -> i32 {
        match self {
            Surface::Sphere => 1,
            Surface::Plane => 0,
            Surface::Hyperbolic => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Surface::Sphere => "sphere",
            Surface::Plane => "plane",
            Surface::Hyperbolic => "hyperbolic",
        }
    }

    /// The ambient bilinear form: Euclidean on Sphere/Plane, Minkowski on
    /// Hyperbolic. Restricted to a tangent space it is the metric `g`.
    #[inline]
    pub fn dot(self, a: &Vec3, b: &Vec3) -> f64 {
        match self {
            Surface::Hyperbolic => -a[0] * b[0] + a[1] * b[1] + a[2] * b[2],
            _ => a.dot(b),
        }
    }

    /// Length of a tangent vector. Negative squared norms (never produced by
    /// genuinely tangent vectors) are clamped to zero.
    #[inline]
    pub fn norm(self, v: &Vec3) -> f64 {
        self.dot(v, v).max(0.0).sqrt()
    }

    /// Orthogonal projection of an ambient vector onto the tangent space at `p`.
    #[inline]
    pub fn to_tangent(self, p: &Point, raw: &Vec3) -> Vec3 {
        let x = &p.0;
        match self {
            Surface::Sphere => raw - x * x.dot(raw),
            Surface::Plane => Vec3::new(raw[0], raw[1], 0.0),
            // ⟨x, x⟩ = −1, so the normal component is −⟨raw, x⟩ x.
            Surface::Hyperbolic => raw + x * self.dot(raw, x),
        }
    }

    /// Rotation by +90° in the oriented tangent plane at `p`. The orientation
    /// is the one induced by the outward normal on the sphere, by `e₂` on the
    /// plane and by the Lorentzian cross product on the hyperboloid.
    #[inline]
    pub fn rotate_quarter(self, p: &Point, t: &Vec3) -> Vec3 {
        match self {
            Surface::Plane => Vec3::new(-t[1], t[0], 0.0),
            Surface::Sphere => p.0.cross(t),
            Surface::Hyperbolic => {
                let c = p.0.cross(t);
                Vec3::new(-c[0], c[1], c[2])
            }
        }
    }

    /// Signed violation of the model constraint at `x` (zero on the surface).
    pub fn constraint_residual(self, x: &Vec3) -> f64 {
        match self {
            Surface::Sphere => x.dot(x) - 1.0,
            Surface::Plane => x[2],
            Surface::Hyperbolic => self.dot(x, x) + 1.0,
        }
    }

    /// Validates raw coordinates as a point of this surface.
    pub fn point(self, coords: Vec3) -> Result<Point> {
        let r = self.constraint_residual(&coords);
        let sheet_ok = self != Surface::Hyperbolic || coords[0] >= 1.0 - POINT_TOLERANCE;
        if !coords.iter().all(|c| c.is_finite()) || r.abs() > POINT_TOLERANCE || !sheet_ok {
            return Err(GeoflowError::OffSurface(r));
        }
        Ok(Point(coords))
    }

    /// Validates that `v` is tangent at `base`.
    pub fn tangent(self, base: Point, vec: Vec3) -> Result<TangentVector> {
        let residual = match self {
            Surface::Plane => vec[2],
            _ => self.dot(&vec, &base.0),
        };
        if residual.abs() > 1e-10 * (1.0 + vec.norm()) {
            return Err(GeoflowError::NotTangent(residual));
        }
        Ok(TangentVector { base, vec })
    }

    /// The metric `⟨a, b⟩_g` of two tangent vectors at the same point.
    pub fn metric_inner(self, a: &TangentVector, b: &TangentVector) -> Result<f64> {
        if (a.base.0 - b.base.0).amax() > BASE_TOLERANCE {
            return Err(GeoflowError::BaseMismatch);
        }
        Ok(self.dot(&a.vec, &b.vec))
    }

    /// Geodesic distance, with validation of the arccos/arccosh domain.
    pub fn geodesic_distance(self, p: &Point, q: &Point) -> Result<f64> {
        match self {
            Surface::Sphere => {
                let c = p.0.dot(&q.0);
                if !c.is_finite() || c.abs() > 1.0 + DOMAIN_SLACK {
                    return Err(GeoflowError::InvalidPointPair);
                }
            }
            Surface::Hyperbolic => {
                let c = -self.dot(&p.0, &q.0);
                if !c.is_finite() || c < 1.0 - DOMAIN_SLACK {
                    return Err(GeoflowError::InvalidPointPair);
                }
            }
            Surface::Plane => {}
        }
        Ok(self.distance(p, q))
    }

    /// Geodesic distance without domain validation. Uses formulations that
    /// stay accurate for nearby points (atan2 on the sphere, the half-chord
    /// asinh on the hyperboloid) instead of arccos/arccosh of an inner product.
    #[inline]
    pub fn distance(self, p: &Point, q: &Point) -> f64 {
        match self {
            Surface::Plane => (p.0 - q.0).norm(),
            Surface::Sphere => p.0.cross(&q.0).norm().atan2(p.0.dot(&q.0)),
            Surface::Hyperbolic => {
                let d = p.0 - q.0;
                let chord = self.dot(&d, &d).max(0.0).sqrt();
                2.0 * (0.5 * chord).asinh()
            }
        }
    }

    /// Point reached at time 1 by the geodesic with initial velocity `v`.
    pub fn exp_map(self, v: &TangentVector) -> Point {
        let len = self.norm(&v.vec);
        if len == 0.0 {
            return v.base;
        }
        let x = &v.base.0;
        let raw = match self {
            Surface::Plane => x + v.vec,
            Surface::Sphere => x * len.cos() + v.vec * (len.sin() / len),
            Surface::Hyperbolic => x * len.cosh() + v.vec * (len.sinh() / len),
        };
        // Re-projection only corrects roundoff; the closed forms are exact.
        self.project(&raw).unwrap_or(Point(raw))
    }

    /// Inverse of [`Surface::exp_map`]: the tangent vector at `p` pointing to
    /// `q` with length equal to their distance.
    pub fn log_map(self, p: &Point, q: &Point) -> Result<TangentVector> {
        let x = &p.0;
        let y = &q.0;
        let vec = match self {
            Surface::Plane => {
                let d = y - x;
                Vec3::new(d[0], d[1], 0.0)
            }
            Surface::Sphere => {
                let w = y - x * x.dot(y);
                let nw = w.norm();
                if nw < 1e-9 && x.dot(y) < 0.0 {
                    return Err(GeoflowError::ConjugatePair);
                }
                if nw == 0.0 {
                    Vec3::zeros()
                } else {
                    w * (self.distance(p, q) / nw)
                }
            }
            Surface::Hyperbolic => {
                let w = y + x * self.dot(x, y);
                let nw = self.norm(&w);
                if nw == 0.0 {
                    Vec3::zeros()
                } else {
                    w * (self.distance(p, q) / nw)
                }
            }
        };
        Ok(TangentVector { base: *p, vec })
    }

    /// Nearest point of the model constraint set (radial normalization on the
    /// sphere, Minkowski normalization on the hyperboloid).
    pub fn project(self, raw: &Vec3) -> Result<Point> {
        if !raw.iter().all(|c| c.is_finite()) {
            return Err(GeoflowError::ProjectionIllDefined);
        }
        match self {
            Surface::Plane => Ok(Point(Vec3::new(raw[0], raw[1], 0.0))),
            Surface::Sphere => {
                let n = raw.norm();
                if n < 1e-8 {
                    return Err(GeoflowError::ProjectionIllDefined);
                }
                Ok(Point(raw / n))
            }
            Surface::Hyperbolic => {
                let q = -self.dot(raw, raw);
                if raw[0] <= 0.0 || q <= 1e-8 {
                    return Err(GeoflowError::ProjectionIllDefined);
                }
                Ok(Point(raw / q.sqrt()))
            }
        }
    }

    /// The warping function `𝒮(φ)` of geodesic polar coordinates
    /// `g = dφ² + 𝒮(φ)² dθ²` and its derivative `𝒮′(φ)`.
    pub fn scale_profile(self, phi: f64) -> (f64, f64) {
        match self {
            Surface::Sphere => (phi.sin(), phi.cos()),
            Surface::Plane => (phi, 1.0),
            Surface::Hyperbolic => (phi.sinh(), phi.cosh()),
        }
    }

    /// `ρ 𝒮′(ρ)/𝒮(ρ) − 1`, the curvature correction of the heat-kernel
    /// monotonicity identity. Identically zero on the plane; a series is used
    /// for small ρ on the curved surfaces.
    pub fn polar_log_derivative_defect(self, rho: f64) -> f64 {
        if rho == 0.0 {
            return 0.0;
        }
        match self {
            Surface::Plane => {
                let (s, ds) = self.scale_profile(rho);
                rho * ds / s - 1.0
            }
            Surface::Sphere if rho < 1e-4 => -rho * rho / 3.0 - rho.powi(4) / 45.0,
            Surface::Hyperbolic if rho < 1e-4 => rho * rho / 3.0 - rho.powi(4) / 45.0,
            _ => {
                let (s, ds) = self.scale_profile(rho);
                rho * ds / s - 1.0
            }
        }
    }

    /// Point at fraction `frac` along the minimizing geodesic from `a` to `b`.
    pub fn geodesic_point(self, a: &Point, b: &Point, frac: f64) -> Result<Point> {
        let v = self.log_map(a, b)?;
        Ok(self.exp_map(&TangentVector::new(*a, v.vec * frac)))
    }

    /// Unit tangent at `p` in the direction of the ambient vector `dir`.
    pub fn unit_tangent(self, p: &Point, dir: &Vec3) -> Option<Vec3> {
        let t = self.to_tangent(p, dir);
        let n = self.norm(&t);
        (n > 1e-14).then(|| t / n)
    }

    /// The origin of the model: `(1,0,0)` on the sphere and hyperboloid and
    /// `(0,0,0)` on the plane.
    pub fn origin(self) -> Point {
        match self {
            Surface::Plane => Point(Vec3::zeros()),
            _ => Point(Vec3::new(1.0, 0.0, 0.0)),
        }
    }
}
