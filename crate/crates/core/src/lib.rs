//! Curve shortening flow `∂ₜF = K` for open curves with fixed endpoints on the
//! three constant-curvature model surfaces (S², R², H²), together with the
//! monitored functionals used to check the flow's qualitative behaviour:
//! chord-arc ratios, the backwards-heat-kernel functional and its evolution
//! identity, blowup-rate classification and the self-similar solitons.
//!
//! Module layout:
//!
//! - [`surface`]: model geometries in ambient coordinates (distance, exp, log).
//! - [`curve`]: discrete curves and their derived geometry.
//! - [`flow`]: explicit time stepping, regridding and PDE-consistency residuals.
//! - [`diagnostics`]: per-record functionals, monotonicity identity, fits.
//! - [`selfsimilar`]: rescalings, soliton generators and soliton residuals.

pub mod curve;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod selfsimilar;
pub mod spline;
pub mod surface;

pub use curve::{
    compute_geometry, Boundary, ChordArcScan, CurveGeometry, DiscreteCurve, Trajectory,
};
pub use diagnostics::{DiagnosticRecord, DiagnosticsConfig, MonotonicityProbe};
pub use error::{GeoflowError, Result};
pub use flow::{FlowConfig, FlowState, FlowStatus};
pub use selfsimilar::{RescaleFactor, SolitonSpec};
pub use surface::{Point, Surface, TangentVector, Vec3};
