//! Explicit time stepping of `∂ₜF = K` with fixed or prescribed endpoints.

use serde::{Deserialize, Serialize};

use crate::curve::{compute_geometry, reparametrize, Boundary, CurveGeometry, DiscreteCurve};
use crate::diagnostics::{self, DiagnosticRecord, DiagnosticsConfig};
use crate::error::{GeoflowError, Result};
use crate::surface::TangentVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    /// `dt = cfl · min(Δs)²`.
    pub cfl: f64,
    pub t_max: f64,
    pub kappa_converged: f64,
    pub kappa_blowup: f64,
    /// Regrid every this many steps; 0 disables regridding.
    pub regrid_every: usize,
    pub record_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            cfl: 0.25,
            t_max: 10.0,
            kappa_converged: 1e-5,
            kappa_blowup: 1e4,
            regrid_every: 50,
            record_every: 50,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GeoflowError::InvalidConfig(m.into()));
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return bad("cfl must lie in (0, 0.5]");
        }
        if !(self.t_max >= 0.0) {
            return bad("t_max must be non-negative");
        }
        if !(self.kappa_converged > 0.0 && self.kappa_converged < self.kappa_blowup) {
            return bad("need 0 < kappa_converged < kappa_blowup");
        }
        if self.record_every == 0 {
            return bad("record_every must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowStatus {
    Running,
    Converged,
    Blowup,
    Timeout,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub curve: DiscreteCurve,
    pub geom: CurveGeometry,
    pub t: f64,
    pub step: u64,
    /// Number of regrids applied so far.
    pub regrids: u64,
    pub status: FlowStatus,
    pub message: Option<String>,
}

impl FlowState {
    pub fn new(curve: DiscreteCurve) -> Result<Self> {
        let geom = compute_geometry(&curve)?;
        Ok(FlowState { curve, geom, t: 0.0, step: 0, regrids: 0, status: FlowStatus::Running, message: None })
    }

    /// Curvature with the endpoint values replaced by 0 at fixed endpoints,
    /// where the flow forces `κ = 0`.
    pub fn kappa_effective(&self) -> Vec<f64> {
        let mut k = self.geom.kappa.clone();
        let n = k.len() - 1;
        if self.curve.start().is_fixed() {
            k[0] = 0.0;
        }
        if self.curve.end().is_fixed() {
            k[n] = 0.0;
        }
        k
    }

    /// `‖κ‖∞` of the effective curvature.
    pub fn kappa_sup(&self) -> f64 {
        let k = &self.geom.kappa;
        let n = k.len() - 1;
        let lo = usize::from(self.curve.start().is_fixed());
        let hi = if self.curve.end().is_fixed() { n - 1 } else { n };
        k[lo..=hi].iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
    }

    /// Time step the next call to [`FlowState::step`] would take.
    pub fn next_dt(&self, cfg: &FlowConfig) -> f64 {
        let m = self.geom.min_segment();
        cfg.cfl * m * m
    }

    pub fn step(&mut self, cfg: &FlowConfig) -> Result<()> {
        self.step_capped(cfg, f64::INFINITY)
    }

    /// One explicit step with `dt = min(cfl · min(Δs)², dt_max)`.
    pub fn step_capped(&mut self, cfg: &FlowConfig, dt_max: f64) -> Result<()> {
        if self.status != FlowStatus::Running {
            return Err(GeoflowError::NotRunning);
        }
        let dt = self.next_dt(cfg).min(dt_max);
        let surface = self.curve.surface();
        let t_next = self.t + dt;
        let n = self.curve.intervals();
        let mut next = Vec::with_capacity(n + 1);
        next.push(match self.curve.start() {
            Boundary::Fixed(a) => *a,
            Boundary::Prescribed(tr) => tr.at(t_next),
        });
        for i in 1..n {
            let v = self.geom.normal[i].vec * (dt * self.geom.kappa[i]);
            next.push(surface.exp_map(&TangentVector::new(self.curve.points()[i], v)));
        }
        next.push(match self.curve.end() {
            Boundary::Fixed(b) => *b,
            Boundary::Prescribed(tr) => tr.at(t_next),
        });
        let mut curve = self.curve.clone();
        curve.set_points(next);
        self.t = t_next;
        self.step += 1;
        match compute_geometry(&curve) {
            Ok(g) => {
                self.curve = curve;
                self.geom = g;
            }
            Err(e) => {
                self.curve = curve;
                self.fail(e);
            }
        }
        Ok(())
    }

    /// Resamples the curve uniformly in arclength.
    pub fn regrid(&mut self) {
        match reparametrize(&self.curve, &self.geom).and_then(|c| Ok((compute_geometry(&c)?, c))) {
            Ok((g, c)) => {
                self.curve = c;
                self.geom = g;
                self.regrids += 1;
            }
            Err(e) => self.fail(e),
        }
    }

    fn fail(&mut self, e: GeoflowError) {
        self.status = FlowStatus::Blowup;
        self.message = Some(e.to_string());
    }
}

/// Callbacks invoked by [`run`].
pub trait Observer {
    /// Called at every recorded state.
    fn observe(&mut self, state: &FlowState, record: &DiagnosticRecord);
    /// Called after every time step, before any regrid of that step.
    fn after_step(&mut self, _state: &FlowState) {}
    /// Called after each regrid.
    fn after_regrid(&mut self, _state: &FlowState) {}
}

impl<F: FnMut(&FlowState, &DiagnosticRecord)> Observer for F {
    fn observe(&mut self, state: &FlowState, record: &DiagnosticRecord) {
        self(state, record)
    }
}

/// Runs the flow until convergence, blowup or `t_max`, recording a
/// [`DiagnosticRecord`] at step 0, every `record_every` steps and at the end.
pub fn run(
    initial: DiscreteCurve,
    cfg: &FlowConfig,
    diag: &DiagnosticsConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<(FlowState, Vec<DiagnosticRecord>)> {
    cfg.validate()?;
    let mut state = FlowState::new(initial)?;
    let diag = diag.resolved(&state.geom);
    let mut records = Vec::new();
    let emit = |state: &FlowState, records: &mut Vec<DiagnosticRecord>, obs: &mut [&mut dyn Observer]| -> Result<()> {
        let rec = diagnostics::record(state, &diag)?;
        for o in obs.iter_mut() {
            o.observe(state, &rec);
        }
        records.push(rec);
        Ok(())
    };
    emit(&state, &mut records, observers)?;
    let mut last_recorded = 0;
    loop {
        if state.status != FlowStatus::Running {
            break;
        }
        if state.t >= cfg.t_max {
            state.status = FlowStatus::Timeout;
            break;
        }
        let ksup = state.kappa_sup();
        if !(ksup <= cfg.kappa_blowup) {
            state.status = FlowStatus::Blowup;
            state.message = Some(format!("curvature {ksup:.3e} exceeds blowup threshold"));
            break;
        }
        if ksup < cfg.kappa_converged {
            state.status = FlowStatus::Converged;
            break;
        }
        state.step_capped(cfg, cfg.t_max - state.t)?;
        if state.status != FlowStatus::Running {
            break;
        }
        for o in observers.iter_mut() {
            o.after_step(&state);
        }
        if cfg.regrid_every > 0 && state.step % cfg.regrid_every as u64 == 0 {
            state.regrid();
            if state.status != FlowStatus::Running {
                break;
            }
            for o in observers.iter_mut() {
                o.after_regrid(&state);
            }
        }
        if state.step % cfg.record_every as u64 == 0 {
            emit(&state, &mut records, observers)?;
            last_recorded = state.step;
        }
    }
    if state.step != last_recorded && state.geom.kappa.iter().all(|k| k.is_finite()) {
        emit(&state, &mut records, observers)?;
    }
    Ok((state, records))
}

fn check_window(states: [&FlowState; 3]) -> Result<()> {
    let [a, b, c] = states;
    if a.regrids != b.regrids || b.regrids != c.regrids {
        return Err(GeoflowError::RegridInWindow);
    }
    if !(a.t < b.t && b.t < c.t) {
        return Err(GeoflowError::InvalidHistory("times must be strictly increasing".into()));
    }
    let n = a.curve.intervals();
    if b.curve.intervals() != n || c.curve.intervals() != n {
        return Err(GeoflowError::InvalidHistory("grids differ".into()));
    }
    Ok(())
}

/// Second-order derivative at `t1` from samples at `t0 < t1 < t2`.
pub(crate) fn three_point_derivative(t: [f64; 3], f: [f64; 3]) -> f64 {
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    let back = (f[1] - f[0]) / h0;
    let fwd = (f[2] - f[1]) / h1;
    (back * h1 + fwd * h0) / (h0 + h1)
}

/// `max |∂ₜκ − (∂ₛ²κ + κ³ + Sκ)|` at the middle state, with `∂ₜκ` taken at
/// fixed parameter from the three states. Nodes adjacent to the endpoints
/// are excluded, since their curvature comes from one-sided stencils.
pub fn kappa_pde_residual(history: [&FlowState; 3]) -> Result<f64> {
    check_window(history)?;
    let [a, b, c] = history;
    let times = [a.t, b.t, c.t];
    let g = &b.geom;
    let n = g.intervals();
    let h = b.curve.spacing();
    let s_curv = f64::from(b.curve.surface().gauss_curvature());
    let k = &g.kappa;
    let mut worst: f64 = 0.0;
    for i in 2..=n - 2 {
        let dt_k = three_point_derivative(times, [a.geom.kappa[i], k[i], c.geom.kappa[i]]);
        let vl = 0.5 * h * (g.v[i - 1] + g.v[i]);
        let vr = 0.5 * h * (g.v[i] + g.v[i + 1]);
        let kss = ((k[i + 1] - k[i]) / vr - (k[i] - k[i - 1]) / vl) / (0.5 * (vl + vr));
        let rhs = kss + k[i].powi(3) + s_curv * k[i];
        worst = worst.max((dt_k - rhs).abs());
    }
    Ok(worst)
}

/// `|ΔL/Δt + ½(∫κ²ds(t₁) + ∫κ²ds(t₂))|` between two records.
pub fn length_decay_residual(r1: &DiagnosticRecord, r2: &DiagnosticRecord) -> Result<f64> {
    if r1.regrids != r2.regrids {
        return Err(GeoflowError::RegridInWindow);
    }
    let dt = r2.t - r1.t;
    if dt == 0.0 {
        return Err(GeoflowError::InvalidHistory("records share the same time".into()));
    }
    Ok(((r2.length - r1.length) / dt + 0.5 * (r1.kappa_sq_integral + r2.kappa_sq_integral)).abs())
}
