//! The `soliton-check` report.

use std::fmt::Write;

use geoflow_core::selfsimilar::{
    grim_reaper_tracking_error, homothetic_residual, soliton_geometry, translator_residual, SolitonSpec,
};
use geoflow_core::{FlowConfig, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    GrimReaper,
    Circle,
    Geodesic,
}

/// One residual measured at several resolutions.
#[derive(Debug, Clone)]
pub struct Table {
    pub label: String,
    pub rows: Vec<(usize, f64)>,
    pub threshold: f64,
}

impl Table {
    /// Residual at the requested resolution (the middle row).
    pub fn at_target(&self) -> f64 {
        self.rows[self.rows.len() / 2].1
    }

    pub fn passed(&self) -> bool {
        self.at_target() < self.threshold
    }
}

fn table(label: &str, n: usize, threshold: f64, f: impl Fn(usize) -> anyhow::Result<f64>) -> anyhow::Result<Table> {
    let sizes = [(n / 2).max(8), n, 2 * n];
    let rows = sizes.iter().map(|&m| Ok((m, f(m)?))).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Table { label: label.to_string(), rows, threshold })
}

/// Tracking of the moving grim reaper: run to `t_end` at resolution `n`.
#[derive(Debug, Clone, Copy)]
pub struct Tracking {
    pub t_end: f64,
    pub n: usize,
}

pub fn tables(kind: Kind, n: usize, track: Option<Tracking>) -> anyhow::Result<Vec<Table>> {
    let origin = Point::from([0.0, 0.0, 0.0]);
    let mut out = Vec::new();
    match kind {
        Kind::GrimReaper => {
            let spec = SolitonSpec::GrimReaper { half_width: 1.0 };
            out.push(table("grim reaper translator residual", n, 1e-3, |m| {
                let (c, g) = soliton_geometry(spec, m)?;
                Ok(translator_residual(&c, &g, [0.0, 1.0])?)
            })?);
            if let Some(Tracking { t_end, n }) = track {
                // Normal motion slides nodes toward the moving endpoints;
                // frequent regridding keeps the spacing uniform.
                let cfg = FlowConfig { regrid_every: 20, ..FlowConfig::default() };
                out.push(table(&format!("grim reaper tracking error to t={t_end}"), n, 1e-3, |m| {
                    Ok(grim_reaper_tracking_error(&cfg, 1.0, m, t_end)?)
                })?);
            }
        }
        Kind::Circle => {
            let spec = SolitonSpec::ShrinkingCircle { radius: 1.0 };
            out.push(table("unit circle homothetic residual", n, 1e-3, |m| {
                let (c, g) = soliton_geometry(spec, m)?;
                Ok(homothetic_residual(&c, &g, origin)?)
            })?);
        }
        Kind::Geodesic => {
            out.push(table("geodesic homothetic residual", n, 1e-10, |m| {
                let (c, g) = soliton_geometry(SolitonSpec::Geodesic, m)?;
                Ok(homothetic_residual(&c, &g, origin)?)
            })?);
            out.push(table("geodesic translator residual (e = (1,0))", n, 1e-10, |m| {
                let (c, g) = soliton_geometry(SolitonSpec::Geodesic, m)?;
                Ok(translator_residual(&c, &g, [1.0, 0.0])?)
            })?);
        }
    }
    Ok(out)
}

pub fn render(tables: &[Table]) -> String {
    let mut s = String::new();
    for t in tables {
        let _ = writeln!(s, "{} (threshold {:e})", t.label, t.threshold);
        let _ = writeln!(s, "  {:>6}  {:>12}  {:>6}", "n", "residual", "order");
        for (k, (n, r)) in t.rows.iter().enumerate() {
            let order = if k > 0 && *r > 0.0 && t.rows[k - 1].1 > 0.0 {
                format!("{:.2}", (t.rows[k - 1].1 / r).log2())
            } else {
                "-".to_string()
            };
            let _ = writeln!(s, "  {n:>6}  {r:>12.4e}  {order:>6}");
        }
        let _ = writeln!(s, "  {}", if t.passed() { "PASS" } else { "FAIL" });
    }
    s
}
