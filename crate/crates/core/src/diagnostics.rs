//! Monitored functionals of a flow trajectory.
//!
//! Besides the per-record table ([`DiagnosticRecord`]) this module holds the
//! backwards-heat-kernel functional `Q` and the terms of its evolution
//! identity, the blowup-rate heuristics, the exponential decay fit and the
//! first/second variation checks of the chord-arc ratio at interior minima.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve::{alpha_epsilon, chord_arc_scan, CurveGeometry};
use crate::error::{GeoflowError, Result};
use crate::flow::{three_point_derivative, FlowState};
use crate::spline::CubicSpline;
use crate::surface::{Point, Surface, Vec3};

/// Center `P*` and reference time `t*` of the backwards heat kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicityProbe {
    pub p_star: Point,
    pub t_star: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Window length for `α_ε`; defaults to a tenth of the initial length.
    pub alpha_eps: Option<f64>,
    pub probe: Option<MonotonicityProbe>,
}

impl DiagnosticsConfig {
    /// Fills in defaults that depend on the initial geometry.
    pub fn resolved(&self, initial: &CurveGeometry) -> DiagnosticsConfig {
        DiagnosticsConfig {
            alpha_eps: Some(self.alpha_eps.unwrap_or(0.1 * initial.total_length)),
            probe: self.probe,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub step: u64,
    pub regrids: u64,
    pub length: f64,
    pub kappa_sq_integral: f64,
    pub dkappa_sq_integral: f64,
    pub turning: f64,
    pub kappa_sup: f64,
    pub theta_min: f64,
    pub theta_argmin: (usize, usize),
    pub theta_interior: bool,
    pub alpha: f64,
    pub q_value: Option<f64>,
    pub blowup_rate: Option<f64>,
}

/// Fourth-order difference of `f` at node `i`, times `12h`.
fn diff4(f: &[f64], i: usize) -> f64 {
    let n = f.len() - 1;
    if i >= 2 && i + 2 <= n {
        f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]
    } else if i == 0 {
        -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]
    } else if i == 1 {
        -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]
    } else if i == n - 1 {
        3.0 * f[n] + 10.0 * f[n - 1] - 18.0 * f[n - 2] + 6.0 * f[n - 3] - f[n - 4]
    } else {
        25.0 * f[n] - 48.0 * f[n - 1] + 36.0 * f[n - 2] - 16.0 * f[n - 3] + 3.0 * f[n - 4]
    }
}

/// `∂ₛκ` of the effective curvature: fourth-order differences of `κ` and of
/// the arclength `s` in the parameter.
///
/// Dividing by `ds/du` rather than by the ambient speed `v` keeps the
/// derivative consistent with the arclength used for integration; `v`
/// differs from it by a relative `S h²/6`.
pub fn dkappa_ds(state: &FlowState) -> Vec<f64> {
    let k = state.kappa_effective();
    let s = &state.geom.s;
    (0..k.len()).map(|i| diff4(&k, i) / diff4(s, i)).collect()
}

/// `(L, ∫|κ|ds)` with the effective curvature; cheap enough to evaluate
/// every step.
pub fn length_and_turning(state: &FlowState) -> (f64, f64) {
    let k = state.kappa_effective();
    let g = &state.geom;
    (g.total_length, g.integrate(|i| k[i].abs()))
}

pub fn record(state: &FlowState, cfg: &DiagnosticsConfig) -> Result<DiagnosticRecord> {
    let g = &state.geom;
    let k = state.kappa_effective();
    let dk = dkappa_ds(state);
    let scan = chord_arc_scan(&state.curve, g);
    let eps = cfg.alpha_eps.unwrap_or(0.1 * g.total_length);
    let q_value = match &cfg.probe {
        Some(p) if state.t < p.t_star => Some(q_functional(state, p)?),
        _ => None,
    };
    Ok(DiagnosticRecord {
        t: state.t,
        step: state.step,
        regrids: state.regrids,
        length: g.total_length,
        kappa_sq_integral: g.integrate(|i| k[i] * k[i]),
        dkappa_sq_integral: g.integrate(|i| dk[i] * dk[i]),
        turning: g.integrate(|i| k[i].abs()),
        kappa_sup: state.kappa_sup(),
        theta_min: scan.theta_min,
        theta_argmin: scan.argmin,
        theta_interior: scan.interior,
        alpha: alpha_epsilon(g, eps),
        q_value,
        blowup_rate: None,
    })
}

/// `(L/π)²∫(∂ₛκ)² − ∫κ²`, when the Wirtinger inequality applies
/// (`L < π` or `S ≤ 0`).
pub fn wirtinger_slack(surface: Surface, r: &DiagnosticRecord) -> Option<f64> {
    (r.length < PI || surface.gauss_curvature() <= 0)
        .then(|| (r.length / PI).powi(2) * r.dkappa_sq_integral - r.kappa_sq_integral)
}

/// `L∫(∂ₛκ)² − ‖κ‖∞²`.
pub fn sobolev_slack(r: &DiagnosticRecord) -> f64 {
    r.length * r.dkappa_sq_integral - r.kappa_sup * r.kappa_sup
}

struct Kernel {
    tau: f64,
    lambda: Vec<f64>,
    rho: Vec<f64>,
    /// `ρW = −log_{Pᵢ}(P*)`.
    rho_w: Vec<Vec3>,
}

fn kernel(state: &FlowState, probe: &MonotonicityProbe) -> Result<Kernel> {
    let tau = probe.t_star - state.t;
    if !(tau > 0.0) {
        return Err(GeoflowError::ProbeExpired);
    }
    let surface = state.curve.surface();
    let pts = state.curve.points();
    let norm = (4.0 * PI * tau).sqrt().recip();
    let mut lambda = Vec::with_capacity(pts.len());
    let mut rho = Vec::with_capacity(pts.len());
    let mut rho_w = Vec::with_capacity(pts.len());
    for p in pts {
        let r = surface.distance(&probe.p_star, p);
        lambda.push(norm * (-r * r / (4.0 * tau)).exp());
        rho.push(r);
        rho_w.push(-surface.log_map(p, &probe.p_star)?.vec);
    }
    Ok(Kernel { tau, lambda, rho, rho_w })
}

/// `Q(t) = ∫ Λ ds`.
pub fn q_functional(state: &FlowState, probe: &MonotonicityProbe) -> Result<f64> {
    let k = kernel(state, probe)?;
    Ok(state.geom.integrate(|i| k.lambda[i]))
}

/// `∫ Λ (κ + ⟨ρW, N⟩/(2τ))² ds`.
pub fn homothetic_defect(state: &FlowState, probe: &MonotonicityProbe) -> Result<f64> {
    Ok(monotonicity_terms(state, probe)?.defect)
}

/// The terms of the evolution identity
/// `dQ/dt = −defect + boundary − correction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityTerms {
    pub q: f64,
    /// `∫ Λ |K + ρW⊥/(2τ)|² ds`.
    pub defect: f64,
    /// `[⟨Λ ρW/(2τ), T⟩]` evaluated between the endpoints.
    pub boundary: f64,
    /// `∫ Λ/(2τ) (1 − ⟨T,W⟩²)(ρ𝒮′(ρ)/𝒮(ρ) − 1) ds`; zero on the plane.
    pub correction: f64,
}

impl MonotonicityTerms {
    pub fn rhs(&self) -> f64 {
        -self.defect + self.boundary - self.correction
    }
}

pub fn monotonicity_terms(state: &FlowState, probe: &MonotonicityProbe) -> Result<MonotonicityTerms> {
    let ker = kernel(state, probe)?;
    let surface = state.curve.surface();
    let g = &state.geom;
    let k = state.kappa_effective();
    let n = g.intervals();
    let two_tau = 2.0 * ker.tau;
    let q = g.integrate(|i| ker.lambda[i]);
    let defect = g.integrate(|i| {
        let c = k[i] + surface.dot(&ker.rho_w[i], &g.normal[i].vec) / two_tau;
        ker.lambda[i] * c * c
    });
    let edge = |i: usize| ker.lambda[i] * surface.dot(&ker.rho_w[i], &g.tangent[i].vec) / two_tau;
    let boundary = edge(n) - edge(0);
    let correction = if surface == Surface::Plane {
        0.0
    } else {
        g.integrate(|i| {
            let rho = ker.rho[i];
            if rho == 0.0 {
                return 0.0;
            }
            let tw = surface.dot(&ker.rho_w[i], &g.tangent[i].vec) / rho;
            ker.lambda[i] / two_tau * (1.0 - tw * tw) * surface.polar_log_derivative_defect(rho)
        })
    };
    Ok(MonotonicityTerms { q, defect, boundary, correction })
}

/// `|dQ/dt − RHS|` at the middle of three states, `dQ/dt` by a three-point
/// difference.
pub fn monotonicity_residual(history: [&FlowState; 3], probe: &MonotonicityProbe) -> Result<f64> {
    let [a, b, c] = history;
    if a.regrids != b.regrids || b.regrids != c.regrids {
        return Err(GeoflowError::RegridInWindow);
    }
    if !(a.t < b.t && b.t < c.t) {
        return Err(GeoflowError::InvalidHistory("times must be strictly increasing".into()));
    }
    let qa = q_functional(a, probe)?;
    let qc = q_functional(c, probe)?;
    let mid = monotonicity_terms(b, probe)?;
    let dq = three_point_derivative([a.t, b.t, c.t], [qa, mid.q, qc]);
    Ok((dq - mid.rhs()).abs())
}

/// Running time integral of the homothetic defect (trapezoid rule in time).
#[derive(Debug, Clone, Default)]
pub struct HomotheticIntegral {
    last: Option<(f64, f64)>,
    pub total: f64,
}

impl HomotheticIntegral {
    pub fn push(&mut self, t: f64, defect: f64) {
        if let Some((t0, d0)) = self.last {
            self.total += 0.5 * (d0 + defect) * (t - t0);
        }
        self.last = Some((t, defect));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupClass {
    #[serde(rename = "type-1-like")]
    Type1Like,
    #[serde(rename = "type-2-like")]
    Type2Like,
    #[serde(rename = "no singularity at t*_est")]
    NoSingularity,
}

impl fmt::Display for BlowupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlowupClass::Type1Like => "type-1-like",
            BlowupClass::Type2Like => "type-2-like",
            BlowupClass::NoSingularity => "no singularity at t*_est",
        })
    }
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

/// Trailing records with `‖κ‖∞` at least a quarter of the final value (at
/// least three). Earlier records are far from the self-similar regime.
fn blowup_window(records: &[DiagnosticRecord]) -> usize {
    let m = records.len();
    let floor = 0.25 * records[m - 1].kappa_sup;
    let run = records.iter().rev().take_while(|r| r.kappa_sup >= floor).count();
    m - run.max(3).min(m)
}

/// Blowup time from a linear fit of `‖κ‖∞⁻²` against `t` over the trailing
/// records with `‖κ‖∞` within a factor 4 of the final value. `None` when the
/// curvature is not growing.
pub fn estimate_blowup_time(records: &[DiagnosticRecord]) -> Option<f64> {
    if records.len() < 3 {
        return None;
    }
    let tail = &records[blowup_window(records)..];
    let t: Vec<f64> = tail.iter().map(|r| r.t).collect();
    let y: Vec<f64> = tail.iter().map(|r| r.kappa_sup.powi(-2)).collect();
    if !y.iter().all(|v| v.is_finite()) {
        return None;
    }
    let (slope, intercept, _) = linear_fit(&t, &y);
    let t_star = -intercept / slope;
    (slope < 0.0 && t_star > tail[tail.len() - 1].t).then_some(t_star)
}

/// `√(t* − t)·‖κ‖∞` per record; `NaN` for records at or past `t*`.
pub fn blowup_rate(records: &[DiagnosticRecord], t_star: f64) -> Vec<f64> {
    records
        .iter()
        .map(|r| if r.t < t_star { (t_star - r.t).sqrt() * r.kappa_sup } else { f64::NAN })
        .collect()
}

/// Classifies a rate series: decaying to zero, bounded (type 1) or growing
/// like a power of `1/(t* − t)` (type 2).
pub fn classify_blowup(records: &[DiagnosticRecord], t_star: f64) -> BlowupClass {
    let rate = blowup_rate(records, t_star);
    let peak = rate.iter().copied().filter(|r| r.is_finite()).fold(0.0, f64::max);
    let last = rate.last().copied().unwrap_or(0.0);
    if !(last >= 0.1 * peak) || peak == 0.0 {
        return BlowupClass::NoSingularity;
    }
    let start = blowup_window(records);
    let (x, y): (Vec<f64>, Vec<f64>) = records[start..]
        .iter()
        .zip(&rate[start..])
        .filter(|(r, q)| r.t < t_star && **q > 0.0)
        .map(|(r, q)| (-(t_star - r.t).ln(), q.ln()))
        .unzip();
    if x.len() < 2 {
        return BlowupClass::Type1Like;
    }
    let (slope, _, _) = linear_fit(&x, &y);
    if slope > 0.1 {
        BlowupClass::Type2Like
    } else {
        BlowupClass::Type1Like
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub delta: f64,
    pub c: f64,
    pub r_squared: f64,
}

/// Least-squares fit `∫κ²ds ≈ c·e^{−δt}` over the final half (in time) of
/// the records.
pub fn decay_fit(records: &[DiagnosticRecord]) -> Result<DecayFit> {
    if records.len() < 20 {
        return Err(GeoflowError::InvalidHistory(format!(
            "decay fit needs at least 20 records, got {}",
            records.len()
        )));
    }
    let t_mid = 0.5 * (records[0].t + records[records.len() - 1].t);
    let tail: Vec<&DiagnosticRecord> = records.iter().filter(|r| r.t >= t_mid).collect();
    if tail.len() < 2 || tail.iter().any(|r| !(r.kappa_sq_integral > 1e-20)) {
        return Err(GeoflowError::DecayFitUndefined);
    }
    let t: Vec<f64> = tail.iter().map(|r| r.t).collect();
    let y: Vec<f64> = tail.iter().map(|r| r.kappa_sq_integral.ln()).collect();
    let (slope, intercept, r_squared) = linear_fit(&t, &y);
    Ok(DecayFit { delta: -slope, c: intercept.exp(), r_squared })
}

/// `𝒮(D/2) / (2𝒮′(D/2))`.
pub fn half_chord_coefficient(surface: Surface, d: f64) -> f64 {
    let (s, ds) = surface.scale_profile(0.5 * d);
    s / (2.0 * ds)
}

/// First and second variation data of `D` at an interior minimum of `D/L`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalReport {
    pub argmin: (usize, usize),
    pub theta: f64,
    /// Arclength positions of the minimum of the interpolated curve.
    pub refined: (f64, f64),
    pub refined_ratio: f64,
    /// `⟨W, T⟩` at the two refined points; both equal `D/L` at a critical point.
    pub w_dot_t: (f64, f64),
    /// `±1`, chosen so that `⟨T_q,V_q⟩ = ε⟨T_p,V_p⟩` up to magnitude.
    pub epsilon: f64,
    /// `⟨K_q,W_q⟩ − ⟨K_p,W_p⟩` at the node pair.
    pub kw_difference: f64,
    /// Second variation from the closed-form expression.
    pub analytic: f64,
    /// Second difference of `D` under moves of `±h` in arclength.
    pub finite_difference: f64,
    pub h: f64,
}

impl VariationalReport {
    pub fn first_variation_error(&self) -> f64 {
        (self.w_dot_t.0 - self.refined_ratio).abs().max((self.w_dot_t.1 - self.refined_ratio).abs())
    }

    pub fn second_variation_error(&self) -> f64 {
        (self.analytic - self.finite_difference).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VariationalCheck {
    NotApplicable,
    Report(VariationalReport),
}

impl fmt::Display for VariationalCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariationalCheck::NotApplicable => f.write_str("not applicable (boundary minimum)"),
            VariationalCheck::Report(r) => write!(
                f,
                "argmin {:?}: <W,T> = ({:.6}, {:.6}) vs D/L {:.6}; second variation {:.6e} vs {:.6e}",
                r.argmin, r.w_dot_t.0, r.w_dot_t.1, r.refined_ratio, r.analytic, r.finite_difference
            ),
        }
    }
}

/// The curve interpolated by cubic splines of the ambient coordinates
/// against arclength, projected onto the surface.
struct SmoothCurve {
    surface: Surface,
    splines: [CubicSpline; 3],
}

impl SmoothCurve {
    fn new(state: &FlowState) -> Self {
        let s = &state.geom.s;
        let pts = state.curve.points();
        let spline = |k: usize| {
            let y: Vec<f64> = pts.iter().map(|p| p.coords()[k]).collect();
            CubicSpline::not_a_knot(s, &y)
        };
        SmoothCurve { surface: state.curve.surface(), splines: [spline(0), spline(1), spline(2)] }
    }

    fn raw(&self, s: f64) -> (Vec3, Vec3) {
        let i = self.splines[0].interval(s);
        let x = Vec3::new(self.splines[0].eval_in(i, s), self.splines[1].eval_in(i, s), self.splines[2].eval_in(i, s));
        let dx = Vec3::new(self.splines[0].deriv_in(i, s), self.splines[1].deriv_in(i, s), self.splines[2].deriv_in(i, s));
        (x, dx)
    }

    /// Projected position and its derivative.
    fn eval(&self, s: f64) -> Result<(Point, Vec3)> {
        let (x, dx) = self.raw(s);
        let p = self.surface.project(&x)?;
        let d = match self.surface {
            Surface::Plane => Vec3::new(dx[0], dx[1], 0.0),
            Surface::Sphere => {
                let r = x.norm();
                let u = x / r;
                (dx - u * u.dot(&dx)) / r
            }
            Surface::Hyperbolic => {
                let r = (-self.surface.dot(&x, &x)).sqrt();
                let u = x / r;
                (dx + u * self.surface.dot(&u, &dx)) / r
            }
        };
        Ok((p, d))
    }

    /// Length of the projected curve between `a < b` (Gauss–Legendre on each
    /// knot interval).
    fn length(&self, a: f64, b: f64) -> Result<f64> {
        const X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
        const W: [f64; 5] = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];
        let knots = self.splines[0].knots();
        let mut cuts = vec![a];
        cuts.extend(knots.iter().copied().filter(|&k| k > a && k < b));
        cuts.push(b);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in X.iter().zip(&W) {
                let (_, d) = self.eval(mid + half * x)?;
                total += wt * half * self.surface.norm(&d);
            }
        }
        Ok(total)
    }

    fn ratio(&self, a: f64, b: f64) -> Result<f64> {
        let (p, _) = self.eval(a)?;
        let (q, _) = self.eval(b)?;
        Ok(self.surface.distance(&p, &q) / self.length(a, b)?)
    }
}

/// Newton iteration for a critical point of `D/L` on the smooth curve,
/// started at `(a, b)`.
fn refine_minimum(c: &SmoothCurve, a: f64, b: f64, lo: f64, hi: f64, h: f64) -> Result<(f64, f64)> {
    let f = |x: f64, y: f64| c.ratio(x, y);
    let (mut x, mut y) = (a, b);
    let d = 1e-6 * h.clamp(1e-9, 1.0);
    let e = 1e-3 * h;
    for _ in 0..60 {
        let gx = (f(x + d, y)? - f(x - d, y)?) / (2.0 * d);
        let gy = (f(x, y + d)? - f(x, y - d)?) / (2.0 * d);
        let f0 = f(x, y)?;
        let hxx = (f(x + e, y)? - 2.0 * f0 + f(x - e, y)?) / (e * e);
        let hyy = (f(x, y + e)? - 2.0 * f0 + f(x, y - e)?) / (e * e);
        let hxy = (f(x + e, y + e)? - f(x + e, y - e)? - f(x - e, y + e)? + f(x - e, y - e)?) / (4.0 * e * e);
        let det = hxx * hyy - hxy * hxy;
        let (sx, sy) = if det > 0.0 && hxx > 0.0 {
            ((hyy * gx - hxy * gy) / det, (hxx * gy - hxy * gx) / det)
        } else {
            (gx * h, gy * h)
        };
        let (nx, ny) = ((x - sx).clamp(lo, hi), (y - sy).clamp(lo, hi));
        let moved = (nx - x).abs().max((ny - y).abs());
        x = nx;
        y = ny;
        if moved < 1e-13 * (1.0 + hi) {
            break;
        }
    }
    Ok((x, y))
}

/// First and second variation checks at the chord-arc minimum of the state.
pub fn chord_arc_variational_check(state: &FlowState) -> Result<VariationalCheck> {
    let scan = chord_arc_scan(&state.curve, &state.geom);
    if !scan.interior {
        return Ok(VariationalCheck::NotApplicable);
    }
    let surface = state.curve.surface();
    let g = &state.geom;
    let (i, j) = scan.argmin;
    let pts = state.curve.points();
    let (p, q) = (pts[i], pts[j]);
    let d = surface.distance(&p, &q);
    let h = g.total_length / g.intervals() as f64;

    // Node-level second variation.
    let wp = surface.log_map(&p, &q)?.vec / d;
    let wq = -surface.log_map(&q, &p)?.vec / d;
    let vp = surface.rotate_quarter(&p, &wp);
    let vq = surface.rotate_quarter(&q, &wq);
    let a = surface.dot(&g.tangent[i].vec, &vp);
    let bq = surface.dot(&g.tangent[j].vec, &vq);
    let epsilon = if a * bq < 0.0 { -1.0 } else { 1.0 };
    let b = epsilon * bq;
    let kw_difference = g.kappa[j] * surface.dot(&g.normal[j].vec, &wq) - g.kappa[i] * surface.dot(&g.normal[i].vec, &wp);
    let (sh, dsh) = surface.scale_profile(0.5 * d);
    let alpha = dsh / (2.0 * sh);
    let beta = -f64::from(surface.gauss_curvature()) * sh / (2.0 * dsh);
    let analytic = kw_difference + alpha * (b - a).powi(2) + beta * (a + b).powi(2);

    let smooth = SmoothCurve::new(state);
    let (sp, sq) = (g.s[i], g.s[j]);
    let dist = |x: f64, y: f64| -> Result<f64> {
        let (u, _) = smooth.eval(x)?;
        let (w, _) = smooth.eval(y)?;
        Ok(surface.distance(&u, &w))
    };
    let finite_difference = (dist(sp + h, sq + epsilon * h)? - 2.0 * d + dist(sp - h, sq - epsilon * h)?) / (h * h);

    let (rp, rq) = refine_minimum(&smooth, sp, sq, 0.0, g.total_length, h)?;
    let (pp, tp) = smooth.eval(rp)?;
    let (pq, tq) = smooth.eval(rq)?;
    let dd = surface.distance(&pp, &pq);
    let refined_ratio = dd / smooth.length(rp, rq)?;
    let w1 = surface.log_map(&pp, &pq)?.vec / dd;
    let w2 = -surface.log_map(&pq, &pp)?.vec / dd;
    let w_dot_t = (surface.dot(&w1, &tp) / surface.norm(&tp), surface.dot(&w2, &tq) / surface.norm(&tq));

    Ok(VariationalCheck::Report(VariationalReport {
        argmin: (i, j),
        theta: scan.theta_min,
        refined: (rp, rq),
        refined_ratio,
        w_dot_t,
        epsilon,
        kw_difference,
        analytic,
        finite_difference,
        h,
    }))
}
