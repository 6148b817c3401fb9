//! Parabolic rescaling and the planar self-similar solutions: the grim
//! reaper translator and the shrinking circle.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::curve::{chord_arc_scan, compute_geometry, Boundary, CurveGeometry, DiscreteCurve, Trajectory};
use crate::error::{GeoflowError, Result};
use crate::flow::{FlowConfig, FlowState, FlowStatus};
use crate::surface::{Point, Surface};

/// Scale factor `R > 0` of the metric `g_R = R² g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleFactor {
    r: f64,
}

impl RescaleFactor {
    pub fn new(r: f64) -> Result<Self> {
        if r > 0.0 && r.is_finite() {
            Ok(RescaleFactor { r })
        } else {
            Err(GeoflowError::InvalidConfig(format!("rescale factor must be positive, got {r}")))
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// `R(t) = (2(t* − t))^{−1/2}`.
pub fn type1_factor(t: f64, t_star: f64) -> Result<RescaleFactor> {
    if !(t < t_star) {
        return Err(GeoflowError::PastTerminalTime);
    }
    RescaleFactor::new((2.0 * (t_star - t)).sqrt().recip())
}

/// A quantity `base · R^power`, kept symbolic so that scale-invariant
/// combinations are evaluated from unscaled values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub base: f64,
    pub power: i32,
}

impl Scaled {
    pub fn value(&self, f: RescaleFactor) -> f64 {
        match self.power {
            0 => self.base,
            p => self.base * f.r.powi(p),
        }
    }
}

impl std::ops::Mul for Scaled {
    type Output = Scaled;

    fn mul(self, other: Scaled) -> Scaled {
        Scaled { base: self.base * other.base, power: self.power + other.power }
    }
}

impl std::ops::Div for Scaled {
    type Output = Scaled;

    fn div(self, other: Scaled) -> Scaled {
        Scaled { base: self.base / other.base, power: self.power - other.power }
    }
}

/// Curve quantities under the metric `R² g`.
#[derive(Debug, Clone)]
pub struct RescaleReport {
    pub factor: RescaleFactor,
    /// `κ_R = κ / R` per node.
    pub kappa: Vec<Scaled>,
    /// `s_R = R s` per node.
    pub arclength: Vec<Scaled>,
    pub length: Scaled,
    /// `D_R = R D` and `L_R = R L` at the chord-arc minimizing pair.
    pub chord: Scaled,
    pub arc: Scaled,
    /// `dτ/dt = R²`.
    pub time_dilation: Scaled,
    pub theta_min: f64,
}

impl RescaleReport {
    /// `κ_R · R` per node; exactly `κ`.
    pub fn kappa_times_r(&self) -> Vec<f64> {
        let r = Scaled { base: 1.0, power: 1 };
        self.kappa.iter().map(|k| (*k * r).value(self.factor)).collect()
    }

    /// `D_R / L_R` at the minimizing pair; exactly the unscaled ratio.
    pub fn theta_min_rescaled(&self) -> f64 {
        (self.chord / self.arc).value(self.factor)
    }

    /// Largest deviation, in units of the last place, between numerically
    /// rescaled values `(κ/R)·R` and `κ`.
    pub fn numeric_kappa_ulps(&self) -> f64 {
        self.kappa
            .iter()
            .map(|k| {
                let round_trip = k.value(self.factor) * self.factor.r;
                if k.base == 0.0 {
                    return round_trip.abs() / f64::MIN_POSITIVE;
                }
                (round_trip - k.base).abs() / (k.base.abs() * f64::EPSILON)
            })
            .fold(0.0, f64::max)
    }
}

pub fn rescale(curve: &DiscreteCurve, geom: &CurveGeometry, factor: RescaleFactor) -> RescaleReport {
    let scan = chord_arc_scan(curve, geom);
    let (i, j) = scan.argmin;
    let d = curve.surface().distance(&curve.points()[i], &curve.points()[j]);
    let l = geom.s[j] - geom.s[i];
    RescaleReport {
        factor,
        kappa: geom.kappa.iter().map(|&k| Scaled { base: k, power: -1 }).collect(),
        arclength: geom.s.iter().map(|&s| Scaled { base: s, power: 1 }).collect(),
        length: Scaled { base: geom.total_length, power: 1 },
        chord: Scaled { base: d, power: 1 },
        arc: Scaled { base: l, power: 1 },
        time_dilation: Scaled { base: 1.0, power: 2 },
        theta_min: scan.theta_min,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonSpec {
    GrimReaper { half_width: f64 },
    ShrinkingCircle { radius: f64 },
    Geodesic,
}

/// Grim reaper graph `y = t − ln cos x`.
pub fn grim_reaper_height(x: f64, t: f64) -> f64 {
    t - x.cos().ln()
}

/// Planar sample of a soliton at `t = 0`. The shrinking circle is the arc
/// `θ ∈ [−3π/4, 3π/4]` centred at the origin, traversed counter-clockwise;
/// the geodesic is the segment from `(−1, 0)` to `(1, 0)`.
pub fn soliton_curve(spec: SolitonSpec, n: usize) -> Result<DiscreteCurve> {
    let pts: Vec<Point> = match spec {
        SolitonSpec::GrimReaper { half_width } => {
            if !(half_width > 0.0 && half_width < FRAC_PI_2) {
                return Err(GeoflowError::InvalidConfig("grim reaper half_width must lie in (0, π/2)".into()));
            }
            (0..=n)
                .map(|i| {
                    let x = -half_width + 2.0 * half_width * i as f64 / n as f64;
                    Point::from([x, grim_reaper_height(x, 0.0), 0.0])
                })
                .collect()
        }
        SolitonSpec::ShrinkingCircle { radius } => {
            if !(radius > 0.0) {
                return Err(GeoflowError::InvalidConfig("radius must be positive".into()));
            }
            let half = 0.75 * std::f64::consts::PI;
            (0..=n)
                .map(|i| {
                    let a = -half + 2.0 * half * i as f64 / n as f64;
                    Point::from([radius * a.cos(), radius * a.sin(), 0.0])
                })
                .collect()
        }
        SolitonSpec::Geodesic => (0..=n).map(|i| Point::from([-1.0 + 2.0 * i as f64 / n as f64, 0.0, 0.0])).collect(),
    };
    DiscreteCurve::with_fixed_ends(Surface::Plane, pts)
}

fn require_plane(curve: &DiscreteCurve) -> Result<()> {
    if curve.surface() == Surface::Plane {
        Ok(())
    } else {
        Err(GeoflowError::PlanarOnly)
    }
}

/// `max |κ + ⟨F − c, N⟩|`, the pointwise defect of `K + F⊥ = 0`.
pub fn homothetic_residual(curve: &DiscreteCurve, geom: &CurveGeometry, center: Point) -> Result<f64> {
    require_plane(curve)?;
    Ok(curve
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (geom.kappa[i] + (p.coords() - center.coords()).dot(&geom.normal[i].vec)).abs())
        .fold(0.0, f64::max))
}

/// `max |κ − ⟨e, N⟩|` for translation direction `e`.
pub fn translator_residual(curve: &DiscreteCurve, geom: &CurveGeometry, direction: [f64; 2]) -> Result<f64> {
    if curve.surface() != Surface::Plane {
        return Err(GeoflowError::PlanarOnly);
    }
    let norm = direction[0].hypot(direction[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(GeoflowError::InvalidConfig("translation direction must be a unit vector".into()));
    }
    Ok((0..=curve.intervals())
        .map(|i| {
            let nv = &geom.normal[i].vec;
            (geom.kappa[i] - (direction[0] * nv[0] + direction[1] * nv[1])).abs()
        })
        .fold(0.0, f64::max))
}

/// Grim reaper with endpoints moving as `(±w, t − ln cos w)`.
pub fn moving_grim_reaper(half_width: f64, n: usize) -> Result<DiscreteCurve> {
    let base = soliton_curve(SolitonSpec::GrimReaper { half_width }, n)?;
    let end = |x: f64| Boundary::Prescribed(Trajectory::new(move |t| Point::from([x, grim_reaper_height(x, t), 0.0])));
    DiscreteCurve::new(Surface::Plane, base.points().to_vec(), end(-half_width), end(half_width))
}

/// Runs the flow from the `t = 0` grim reaper with prescribed endpoints and
/// returns the sup over steps and nodes of `|y − (t − ln cos x)|`.
pub fn grim_reaper_tracking_error(cfg: &FlowConfig, half_width: f64, n: usize, t_end: f64) -> Result<f64> {
    if !(half_width < FRAC_PI_2 - 0.1) {
        return Err(GeoflowError::InvalidConfig("half_width must be below π/2 − 0.1".into()));
    }
    cfg.validate()?;
    let mut state = FlowState::new(moving_grim_reaper(half_width, n)?)?;
    let deviation = |s: &FlowState| {
        s.curve
            .points()
            .iter()
            .map(|p| (p.coords()[1] - grim_reaper_height(p.coords()[0], s.t)).abs())
            .fold(0.0, f64::max)
    };
    let mut worst = deviation(&state);
    while state.t < t_end {
        state.step_capped(cfg, t_end - state.t)?;
        if state.status != FlowStatus::Running {
            return Err(GeoflowError::FlowBlowup(state.message.clone().unwrap_or_default()));
        }
        if cfg.regrid_every > 0 && state.step % cfg.regrid_every as u64 == 0 {
            state.regrid();
        }
        worst = worst.max(deviation(&state));
    }
    Ok(worst)
}

/// A soliton sample together with its geometry.
pub fn soliton_geometry(spec: SolitonSpec, n: usize) -> Result<(DiscreteCurve, CurveGeometry)> {
    let c = soliton_curve(spec, n)?;
    let g = compute_geometry(&c)?;
    Ok((c, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::total_turning;

    #[test]
    fn type1_factor_examples() {
        assert_eq!(type1_factor(0.5, 1.0).unwrap().r(), 1.0);
        assert_eq!(type1_factor(0.875, 1.0).unwrap().r(), 2.0);
        assert!(type1_factor(1.0, 1.0).is_err());
        let mut last = 0.0;
        for k in 0..100 {
            let r = type1_factor(k as f64 / 100.0, 1.0).unwrap().r();
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn rescale_examples() {
        let (c, g) = soliton_geometry(SolitonSpec::ShrinkingCircle { radius: 1.0 }, 256).unwrap();
        let rep = rescale(&c, &g, RescaleFactor::new(2.0).unwrap());
        for (k, kr) in g.kappa.iter().zip(&rep.kappa) {
            assert!((kr.value(rep.factor) - 0.5 * k).abs() < 1e-15);
        }
        assert!(rep.kappa.iter().all(|k| (k.value(rep.factor) - 0.5).abs() < 1e-3));
        for r in [0.5, 2.0, 10.0, 1.0] {
            let rep = rescale(&c, &g, RescaleFactor::new(r).unwrap());
            assert_eq!(rep.kappa_times_r(), g.kappa);
            assert_eq!(rep.theta_min_rescaled().to_bits(), rep.theta_min.to_bits());
            assert!(rep.numeric_kappa_ulps() <= 4.0);
            assert_eq!(rep.time_dilation.value(rep.factor), r * r);
        }
        let id = rescale(&c, &g, RescaleFactor::new(1.0).unwrap());
        assert!(id.arclength.iter().zip(&g.s).all(|(a, s)| a.value(id.factor) == *s));
        assert!(RescaleFactor::new(0.0).is_err());
    }

    #[test]
    fn grim_reaper_samples() {
        let c = soliton_curve(SolitonSpec::GrimReaper { half_width: 1.0 }, 64).unwrap();
        let mid = c.points()[32].coords();
        assert_eq!((mid[0], mid[1]), (0.0, 0.0));
        let end = c.points()[64].coords();
        assert!((end[1] - 0.615_626_470_386_014).abs() < 1e-12);
        assert!(soliton_curve(SolitonSpec::GrimReaper { half_width: 1.6 }, 64).is_err());
    }

    #[test]
    fn translator_and_homothetic_residuals() {
        let (c, g) = soliton_geometry(SolitonSpec::GrimReaper { half_width: 1.0 }, 512).unwrap();
        assert!(translator_residual(&c, &g, [0.0, 1.0]).unwrap() < 1e-3);
        let origin = Point::from([0.0, 0.0, 0.0]);
        assert!(homothetic_residual(&c, &g, origin).unwrap() > 0.1);

        let (c, g) = soliton_geometry(SolitonSpec::ShrinkingCircle { radius: 1.0 }, 256).unwrap();
        assert!(homothetic_residual(&c, &g, origin).unwrap() < 1e-3);
        assert!(translator_residual(&c, &g, [0.0, 1.0]).unwrap() > 0.5);

        let (c, g) = soliton_geometry(SolitonSpec::Geodesic, 64).unwrap();
        assert!(homothetic_residual(&c, &g, origin).unwrap() < 1e-10);
        assert!(translator_residual(&c, &g, [1.0, 0.0]).unwrap() < 1e-10);
    }

    #[test]
    fn residuals_are_planar_only() {
        let pts: Vec<Point> = (0..=8)
            .map(|i| {
                let a = 0.1 * i as f64;
                Point::from([a.cos(), a.sin(), 0.0])
            })
            .collect();
        let c = DiscreteCurve::with_fixed_ends(Surface::Sphere, pts).unwrap();
        let g = compute_geometry(&c).unwrap();
        let err = homothetic_residual(&c, &g, Surface::Sphere.origin()).unwrap_err();
        assert_eq!(err.to_string(), "homothetic residual is planar-only");
        assert!(translator_residual(&c, &g, [0.0, 1.0]).is_err());
    }

    #[test]
    fn grim_reaper_turning_approaches_pi() {
        let mut last = 0.0;
        for w in [0.5, 1.0, 1.3, 1.45, 1.52] {
            let (_, g) = soliton_geometry(SolitonSpec::GrimReaper { half_width: w }, 2048).unwrap();
            let tt = total_turning(&g);
            assert!(tt > last && tt < std::f64::consts::PI);
            assert!((tt - 2.0 * w).abs() < 1e-3);
            last = tt;
        }
    }

    #[test]
    fn tracking_at_zero_time() {
        let cfg = FlowConfig::default();
        assert!(grim_reaper_tracking_error(&cfg, 1.0, 64, 0.0).unwrap() < 1e-12);
    }
}
