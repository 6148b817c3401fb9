//! Scenario files: schema, initial-curve generators and hypothesis checks.

use std::path::Path;

use anyhow::{bail, Context};
use geoflow_core::curve::{self_intersection_count, DiscreteCurve};
use geoflow_core::selfsimilar::moving_grim_reaper;
use geoflow_core::{DiagnosticsConfig, FlowConfig, Point, Surface, TangentVector, Vec3};
use serde::{Deserialize, Serialize};

const ON_BARRIER_TOL: f64 = 1e-9;
const INSIDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub surface: Surface,
    /// Number of parameter intervals.
    pub n: usize,
    pub initial: InitialCurve,
    /// The two barrier geodesics `Γ_a`, `Γ_b`.
    #[serde(default)]
    pub barriers: Option<[Barrier; 2]>,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    /// Write a snapshot every this many records (the final state is always
    /// written).
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
}

fn default_snapshot_every() -> usize {
    10
}

/// A geodesic given by a point and a tangent direction there.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Barrier {
    pub point: [f64; 3],
    pub direction: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCurve {
    /// The geodesic from `a` to `b`, displaced along its unit normal by the
    /// sum of the profile terms (a function of the parameter `u ∈ [0, 1]`).
    PerturbedGeodesic { a: [f64; 3], b: [f64; 3], profile: Vec<Profile> },
    /// Explicit node list (must have `n + 1` entries).
    Points { points: Vec<[f64; 3]> },
    /// Planar prolate trochoid `(θ − λ sin θ, −λ cos θ)·scale`, `θ ∈ [−π, π]`;
    /// for `λ > 1` it has a loop.
    Trochoid { lambda: f64, scale: f64 },
    /// Planar grim reaper with endpoints following the exact translating
    /// solution.
    GrimReaper { half_width: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `amplitude · sin(mode · π · u)`.
    Sine { amplitude: f64, mode: u32 },
    /// Gaussian `amplitude · exp(−((u − center)/width)²)`, with its endpoint
    /// values removed by a linear correction.
    Bump { amplitude: f64, center: f64, width: f64 },
}

impl Profile {
    fn eval(&self, u: f64) -> f64 {
        match *self {
            Profile::Sine { amplitude, mode } => amplitude * (f64::from(mode) * std::f64::consts::PI * u).sin(),
            Profile::Bump { amplitude, center, width } => {
                let g = |x: f64| (-((x - center) / width).powi(2)).exp();
                amplitude * (g(u) - (1.0 - u) * g(0.0) - u * g(1.0))
            }
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> anyhow::Result<Scenario> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let scn: Scenario =
            serde_json::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))?;
        Ok(scn)
    }

    /// Builds the initial discrete curve.
    pub fn build_curve(&self) -> anyhow::Result<DiscreteCurve> {
        let s = self.surface;
        let n = self.n;
        let curve = match &self.initial {
            InitialCurve::PerturbedGeodesic { a, b, profile } => {
                let a = s.point(Vec3::from(*a)).context("initial.a")?;
                let b = s.point(Vec3::from(*b)).context("initial.b")?;
                let chord = s.log_map(&a, &b).context("initial: endpoints")?;
                if s.norm(&chord.vec) == 0.0 {
                    bail!("initial: endpoints coincide");
                }
                let mut pts = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    let u = i as f64 / n as f64;
                    let base = s.exp_map(&TangentVector::new(a, chord.vec * u));
                    let dir = s.log_map(&base, &b).ok().filter(|v| s.norm(&v.vec) > 1e-12);
                    let tangent = match dir {
                        Some(v) => v.vec,
                        None => -s.log_map(&base, &a)?.vec,
                    };
                    let t = tangent / s.norm(&tangent);
                    let normal = s.rotate_quarter(&base, &t);
                    let offset: f64 = if i == 0 || i == n { 0.0 } else { profile.iter().map(|p| p.eval(u)).sum() };
                    pts.push(if offset == 0.0 { base } else { s.exp_map(&TangentVector::new(base, normal * offset)) });
                }
                pts[0] = a;
                pts[n] = b;
                DiscreteCurve::with_fixed_ends(s, pts)?
            }
            InitialCurve::Points { points } => {
                if points.len() != n + 1 {
                    bail!("initial.points: expected {} points, got {}", n + 1, points.len());
                }
                let pts = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| s.point(Vec3::from(*p)).with_context(|| format!("initial.points[{i}]")))
                    .collect::<anyhow::Result<Vec<Point>>>()?;
                DiscreteCurve::with_fixed_ends(s, pts)?
            }
            InitialCurve::Trochoid { lambda, scale } => {
                if s != Surface::Plane {
                    bail!("initial: trochoid is planar-only");
                }
                let pts = (0..=n)
                    .map(|i| {
                        let th = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                        Point::from([scale * (th - lambda * th.sin()), -scale * lambda * th.cos(), 0.0])
                    })
                    .collect();
                DiscreteCurve::with_fixed_ends(s, pts)?
            }
            InitialCurve::GrimReaper { half_width } => {
                if s != Surface::Plane {
                    bail!("initial: grim reaper is planar-only");
                }
                moving_grim_reaper(*half_width, n)?
            }
        };
        Ok(curve)
    }
}

/// Signed side of `x` relative to a barrier geodesic; zero on the barrier.
pub fn barrier_side(surface: Surface, barrier: &Barrier, x: &Point) -> anyhow::Result<f64> {
    let p = surface.point(Vec3::from(barrier.point)).context("barrier point")?;
    let d = surface
        .unit_tangent(&p, &Vec3::from(barrier.direction))
        .context("barrier direction is not a tangent direction")?;
    // The unit normal of the geodesic plane (or line) through p along d.
    let nrm = surface.rotate_quarter(&p, &d);
    Ok(match surface {
        Surface::Plane => (x.coords() - p.coords()).dot(&nrm),
        Surface::Sphere => x.coords().dot(&p.coords().cross(&d)),
        Surface::Hyperbolic => {
            let c = p.coords().cross(&d);
            surface.dot(x.coords(), &Vec3::new(-c[0], c[1], c[2]))
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// `+1` or `−1` per barrier: the side on which the curve lies.
    #[serde(skip)]
    pub orientation: Option<[f64; 2]>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the geometric hypotheses on the initial data: (a) endpoints on
/// the barriers, (b) interior nodes strictly between them, (c) embedded,
/// (d) on the sphere, contained in an open hemisphere with non-antipodal
/// endpoints.
pub fn validate_scenario(scn: &Scenario, curve: &DiscreteCurve) -> anyhow::Result<ValidationReport> {
    let s = scn.surface;
    let pts = curve.points();
    let n = pts.len() - 1;
    let mut checks = Vec::new();
    let mut orientation = None;

    if let Some(barriers) = &scn.barriers {
        let ends = [pts[0], pts[n]];
        let mut worst: f64 = 0.0;
        for (k, b) in barriers.iter().enumerate() {
            worst = worst.max(barrier_side(s, b, &ends[k]).with_context(|| format!("barriers[{k}]"))?.abs());
        }
        checks.push(Check {
            name: "endpoints_on_barriers",
            passed: worst <= ON_BARRIER_TOL,
            detail: format!("max endpoint offset {worst:.3e}"),
        });

        let mut signs = [0.0; 2];
        let mut inside = true;
        let mut detail = String::from("all interior nodes strictly inside");
        for (k, b) in barriers.iter().enumerate() {
            let sides: Vec<f64> = pts[1..n].iter().map(|p| barrier_side(s, b, p)).collect::<anyhow::Result<_>>()?;
            let positive = sides.iter().filter(|&&v| v > 0.0).count();
            let sign = if 2 * positive >= sides.len() { 1.0 } else { -1.0 };
            signs[k] = sign;
            if let Some((i, v)) = sides.iter().enumerate().find(|(_, &v)| sign * v <= INSIDE_TOL) {
                inside = false;
                detail = format!("node {} on the wrong side of barrier {k} (offset {:.3e})", i + 1, sign * v);
                break;
            }
            let other = ends[1 - k];
            let off = sign * barrier_side(s, b, &other)?;
            if off < -ON_BARRIER_TOL {
                inside = false;
                detail = format!("curve lies outside the region on barrier {k}");
                break;
            }
        }
        if inside {
            orientation = Some(signs);
        }
        checks.push(Check { name: "interior_inside_region", passed: inside, detail });
    }

    let crossings = self_intersection_count(curve);
    checks.push(Check {
        name: "embedded",
        passed: crossings == 0,
        detail: format!("{crossings} self-intersections"),
    });

    if s == Surface::Sphere {
        let mean: Vec3 = pts.iter().map(|p| *p.coords()).sum();
        let (passed, detail) = if mean.norm() < 1e-12 {
            (false, "no hemisphere contains the curve".to_string())
        } else {
            let c = mean.normalize();
            let lowest = pts.iter().map(|p| p.coords().dot(&c)).fold(f64::INFINITY, f64::min);
            let d = s.distance(&pts[0], &pts[n]);
            if lowest <= 0.0 {
                (false, format!("curve leaves the open hemisphere (min height {lowest:.3e})"))
            } else if d >= std::f64::consts::PI - 1e-9 {
                (false, "endpoints are antipodal".to_string())
            } else {
                (true, format!("min hemisphere height {lowest:.3e}, endpoint distance {d:.6}"))
            }
        };
        checks.push(Check { name: "open_hemisphere", passed, detail });
    }
    Ok(ValidationReport { checks, orientation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_scenario(profile: Vec<Profile>) -> Scenario {
        Scenario {
            name: "t".into(),
            description: String::new(),
            surface: Surface::Plane,
            n: 64,
            initial: InitialCurve::PerturbedGeodesic { a: [0.0, 0.0, 0.0], b: [1.0, 0.0, 0.0], profile },
            barriers: Some([
                Barrier { point: [0.0, 0.0, 0.0], direction: [0.0, 1.0, 0.0] },
                Barrier { point: [1.0, 0.0, 0.0], direction: [0.0, 1.0, 0.0] },
            ]),
            flow: FlowConfig::default(),
            diagnostics: DiagnosticsConfig::default(),
            snapshot_every: 10,
        }
    }

    #[test]
    fn perturbed_geodesic_matches_graph() {
        let scn = plane_scenario(vec![Profile::Sine { amplitude: 0.01, mode: 1 }]);
        let c = scn.build_curve().unwrap();
        for (i, p) in c.points().iter().enumerate() {
            let x = i as f64 / 64.0;
            assert!((p.coords()[0] - x).abs() < 1e-15);
            assert!((p.coords()[1] - 0.01 * (std::f64::consts::PI * x).sin()).abs() < 1e-15);
        }
        assert!(validate_scenario(&scn, &c).unwrap().passed());
    }

    #[test]
    fn crossing_a_barrier_fails_region_check() {
        let mut scn = plane_scenario(vec![Profile::Sine { amplitude: 0.01, mode: 1 }]);
        scn.barriers.as_mut().unwrap()[1].point = [0.9, 0.0, 0.0];
        let c = scn.build_curve().unwrap();
        let rep = validate_scenario(&scn, &c).unwrap();
        assert!(!rep.check("interior_inside_region").unwrap().passed);
        assert!(!rep.check("endpoints_on_barriers").unwrap().passed);
    }

    #[test]
    fn loops_fail_embedding_check() {
        let mut scn = plane_scenario(vec![]);
        scn.initial = InitialCurve::Trochoid { lambda: 1.8, scale: 0.2 };
        scn.barriers = None;
        scn.n = 128;
        let c = scn.build_curve().unwrap();
        let rep = validate_scenario(&scn, &c).unwrap();
        assert!(!rep.check("embedded").unwrap().passed);
    }

    #[test]
    fn bump_profile_vanishes_at_ends() {
        let p = Profile::Bump { amplitude: 0.3, center: 0.2, width: 0.3 };
        assert!(p.eval(0.0).abs() < 1e-16 && p.eval(1.0).abs() < 1e-16);
        let expected = 0.3 * (1.0 - 0.8 * (-4.0f64 / 9.0).exp() - 0.2 * (-64.0f64 / 9.0).exp());
        assert!((p.eval(0.2) - expected).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = r#"{"name":"x","surface":"plane","n":8,"initial":{"kind":"points","points":[]},"bogus":1}"#;
        assert!(serde_json::from_str::<Scenario>(bad).is_err());
    }
}
