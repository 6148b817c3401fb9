//! Executes a scenario, monitors the in-hypothesis invariants and writes the
//! output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use geoflow_core::curve::self_intersection_count;
use geoflow_core::diagnostics::{
    chord_arc_variational_check, classify_blowup, decay_fit, estimate_blowup_time, homothetic_defect,
    length_and_turning, sobolev_slack, wirtinger_slack, BlowupClass, DecayFit, HomotheticIntegral, VariationalCheck,
};
use geoflow_core::flow::{run, Observer};
use geoflow_core::{DiagnosticRecord, FlowState, FlowStatus, Point, Surface};
use serde::Serialize;

use crate::scenario::{barrier_side, Barrier, Scenario, ValidationReport};

const MAX_VIOLATIONS: usize = 50;

/// Checks run along in-hypothesis trajectories.
struct InvariantMonitor {
    surface: Surface,
    barriers: Option<([Barrier; 2], [f64; 2])>,
    endpoint_distance: f64,
    last: Option<(f64, f64)>,
    theta0: Option<f64>,
    violations: Vec<String>,
    suppressed: usize,
}

impl InvariantMonitor {
    fn flag(&mut self, msg: String) {
        if self.violations.len() < MAX_VIOLATIONS {
            self.violations.push(msg);
        } else {
            self.suppressed += 1;
        }
    }

    fn check_step(&mut self, state: &FlowState) {
        let (len, turning) = length_and_turning(state);
        if let Some((l0, tt0)) = self.last {
            if len >= l0 + 1e-12 {
                self.flag(format!("t={:.6e}: length increased from {l0:.15e} to {len:.15e}", state.t));
            }
            if turning > tt0 + 1e-8 {
                self.flag(format!("t={:.6e}: total turning increased by {:.3e}", state.t, turning - tt0));
            }
        }
        if len < self.endpoint_distance - 1e-9 {
            self.flag(format!("t={:.6e}: length {len:.12e} below endpoint distance", state.t));
        }
        if let Some((bars, signs)) = self.barriers {
            for (k, b) in bars.iter().enumerate() {
                let outside = state
                    .curve
                    .points()
                    .iter()
                    .map(|p| signs[k] * barrier_side(self.surface, b, p).unwrap_or(f64::NAN))
                    .fold(f64::INFINITY, f64::min);
                if !(outside >= -1e-9) {
                    self.flag(format!("t={:.6e}: node outside barrier {k} by {:.3e}", state.t, -outside));
                }
            }
        }
        self.last = Some((len, turning));
    }
}

impl Observer for InvariantMonitor {
    fn observe(&mut self, state: &FlowState, r: &DiagnosticRecord) {
        let theta0 = *self.theta0.get_or_insert(r.theta_min);
        if r.theta_min < theta0 - 1e-3 {
            self.flag(format!("t={:.6e}: theta_min {:.6} below initial {theta0:.6}", r.t, r.theta_min));
        }
        let crossings = self_intersection_count(&state.curve);
        if crossings > 0 {
            self.flag(format!("t={:.6e}: {crossings} self-intersections", r.t));
        }
        if let Some(w) = wirtinger_slack(self.surface, r) {
            if w < -1e-8 {
                self.flag(format!("t={:.6e}: Wirtinger inequality violated by {:.3e}", r.t, -w));
            }
        }
        let sob = sobolev_slack(r);
        if sob < -1e-8 {
            self.flag(format!("t={:.6e}: Sobolev inequality violated by {:.3e}", r.t, -sob));
        }
        if r.theta_interior {
            if let Ok(VariationalCheck::Report(rep)) = chord_arc_variational_check(state) {
                if rep.kw_difference < -1e-4 {
                    self.flag(format!(
                        "t={:.6e}: interior chord-arc minimum with <K_q,W_q> - <K_p,W_p> = {:.3e}",
                        r.t, rep.kw_difference
                    ));
                }
            }
        }
        if self.last.is_none() {
            self.check_step(state);
        }
    }

    fn after_step(&mut self, state: &FlowState) {
        self.check_step(state);
    }

    fn after_regrid(&mut self, state: &FlowState) {
        // Regridding perturbs L and the turning by interpolation error only;
        // monotonicity is checked between regrids.
        self.last = Some(length_and_turning(state));
    }
}

/// Collects records, snapshots and the homothetic-defect integral.
struct Collector<'a> {
    scenario: &'a Scenario,
    snapshots: Vec<(f64, Vec<Point>)>,
    homothetic: Option<HomotheticIntegral>,
    count: usize,
}

impl Observer for Collector<'_> {
    fn observe(&mut self, state: &FlowState, r: &DiagnosticRecord) {
        if self.count.is_multiple_of(self.scenario.snapshot_every.max(1)) {
            self.snapshots.push((r.t, state.curve.points().to_vec()));
        }
        self.count += 1;
        if let (Some(acc), Some(probe)) = (self.homothetic.as_mut(), self.scenario.diagnostics.probe.as_ref()) {
            if let Ok(d) = homothetic_defect(state, probe) {
                acc.push(state.t, d);
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupSummary {
    pub t_star_estimate: f64,
    pub classification: BlowupClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub surface: Surface,
    pub status: FlowStatus,
    pub message: Option<String>,
    pub t_final: f64,
    pub steps: u64,
    pub regrids: u64,
    pub records: usize,
    pub in_hypothesis: bool,
    pub forced: bool,
    pub validation: ValidationReport,
    pub violations: Vec<String>,
    pub blowup: Option<BlowupSummary>,
    pub homothetic_integral: Option<f64>,
    pub decay_fit: Option<DecayFit>,
}

pub struct RunOutput {
    pub records: Vec<DiagnosticRecord>,
    pub snapshots: Vec<(f64, Vec<Point>)>,
    pub summary: Summary,
    pub final_state: FlowState,
}

impl RunOutput {
    /// Process exit code: 0 converged, 2 blowup, 3 timeout, 4 invariant
    /// violation on an in-hypothesis run.
    pub fn exit_code(&self) -> i32 {
        if self.summary.in_hypothesis && !self.summary.violations.is_empty() {
            return 4;
        }
        match self.summary.status {
            FlowStatus::Converged => 0,
            FlowStatus::Blowup => 2,
            FlowStatus::Timeout | FlowStatus::Running => 3,
        }
    }
}

/// Runs a scenario whose initial curve has already been validated (or whose
/// validation is waived by `forced`).
pub fn execute(scn: &Scenario, validation: ValidationReport, forced: bool) -> anyhow::Result<RunOutput> {
    let curve = scn.build_curve()?;
    let in_hypothesis = validation.passed() && curve.has_fixed_ends() && scn.barriers.is_some();
    let mut monitor = InvariantMonitor {
        surface: scn.surface,
        barriers: scn.barriers.zip(validation.orientation),
        endpoint_distance: scn.surface.distance(&curve.points()[0], &curve.points()[curve.intervals()]),
        last: None,
        theta0: None,
        violations: Vec::new(),
        suppressed: 0,
    };
    let mut collector = Collector {
        scenario: scn,
        snapshots: Vec::new(),
        homothetic: scn.diagnostics.probe.map(|_| HomotheticIntegral::default()),
        count: 0,
    };
    let (state, mut records) = {
        let mut observers: Vec<&mut dyn Observer> = vec![&mut collector];
        if in_hypothesis {
            observers.push(&mut monitor);
        }
        run(curve, &scn.flow, &scn.diagnostics, &mut observers)?
    };
    if let Some(last) = records.last() {
        if collector.snapshots.last().map(|s| s.0) != Some(last.t) {
            collector.snapshots.push((last.t, state.curve.points().to_vec()));
        }
    }

    let blowup = estimate_blowup_time(&records).map(|t_star| {
        for r in records.iter_mut() {
            r.blowup_rate = (r.t < t_star).then(|| (t_star - r.t).sqrt() * r.kappa_sup);
        }
        BlowupSummary { t_star_estimate: t_star, classification: classify_blowup(&records, t_star) }
    });
    let mut violations = monitor.violations;
    if monitor.suppressed > 0 {
        violations.push(format!("... {} further violations suppressed", monitor.suppressed));
    }
    let summary = Summary {
        scenario: scn.name.clone(),
        surface: scn.surface,
        status: state.status,
        message: state.message.clone(),
        t_final: state.t,
        steps: state.step,
        regrids: state.regrids,
        records: records.len(),
        in_hypothesis,
        forced,
        validation,
        violations,
        blowup,
        homothetic_integral: collector.homothetic.map(|h| h.total),
        decay_fit: if state.status == FlowStatus::Converged { decay_fit(&records).ok() } else { None },
    };
    Ok(RunOutput { records, snapshots: collector.snapshots, summary, final_state: state })
}

pub const CSV_HEADER: [&str; 10] = [
    "t",
    "length",
    "kappa_sq_integral",
    "dkappa_sq_integral",
    "turning",
    "kappa_sup",
    "theta_min",
    "alpha",
    "q_value",
    "blowup_rate",
];

fn fmt_num(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_outputs(out: &RunOutput, dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let csv_path = dir.join("diagnostics.csv");
    let mut w = csv::Writer::from_path(&csv_path).with_context(|| format!("writing {}", csv_path.display()))?;
    w.write_record(CSV_HEADER)?;
    for r in &out.records {
        let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        w.write_record([
            fmt_num(r.t),
            fmt_num(r.length),
            fmt_num(r.kappa_sq_integral),
            fmt_num(r.dkappa_sq_integral),
            fmt_num(r.turning),
            fmt_num(r.kappa_sup),
            fmt_num(r.theta_min),
            fmt_num(r.alpha),
            opt(r.q_value),
            opt(r.blowup_rate),
        ])?;
    }
    w.flush().with_context(|| format!("writing {}", csv_path.display()))?;

    let snap_path = dir.join("snapshots.jsonl");
    let file = File::create(&snap_path).with_context(|| format!("writing {}", snap_path.display()))?;
    let mut file = BufWriter::new(file);
    for (t, pts) in &out.snapshots {
        let points: Vec<[f64; 3]> = pts.iter().map(|p| p.to_array()).collect();
        serde_json::to_writer(&mut file, &serde_json::json!({ "t": t, "points": points }))?;
        file.write_all(b"\n")?;
    }
    file.flush().with_context(|| format!("writing {}", snap_path.display()))?;

    let summary_path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&out.summary)?;
    fs::write(&summary_path, text + "\n").with_context(|| format!("writing {}", summary_path.display()))?;
    Ok(())
}

/// Output directory for a scenario: `--out` if given, else
/// `$GEOFLOW_OUT/<name>` (default root `out`).
pub fn output_dir(explicit: Option<&Path>, scenario_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let root = std::env::var_os("GEOFLOW_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
            root.join(scenario_name)
        }
    }
}
