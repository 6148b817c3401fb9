use thiserror::Error;

/// Errors produced by the geometry, flow and diagnostics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoflowError {
    #[error("tangent vectors at different points")]
    BaseMismatch,
    #[error("invalid point pair")]
    InvalidPointPair,
    #[error("conjugate pair, log undefined")]
    ConjugatePair,
    #[error("projection ill-defined")]
    ProjectionIllDefined,
    #[error("point is off the model surface (constraint residual {0:.3e})")]
    OffSurface(f64),
    #[error("vector is not tangent at its base point (residual {0:.3e})")]
    NotTangent(f64),
    #[error("degenerate parametrization at node {0}")]
    DegenerateParametrization(usize),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("flow state is not running")]
    NotRunning,
    #[error("residual undefined across regrid")]
    RegridInWindow,
    #[error("invalid history: {0}")]
    InvalidHistory(String),
    #[error("probe expired")]
    ProbeExpired,
    #[error("decay fit undefined")]
    DecayFitUndefined,
    #[error("homothetic residual is planar-only")]
    PlanarOnly,
    #[error("flow blowup: {0}")]
    FlowBlowup(String),
    #[error("t must be strictly before t_star")]
    PastTerminalTime,
}

pub type Result<T, E = GeoflowError> = std::result::Result<T, E>;
