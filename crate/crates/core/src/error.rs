use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("node {node} out of range (grid has {count} nodes)")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("node {node} is not an interior node")]
    NotInterior { node: usize },
    #[error("level {level} out of range (field has {count} levels)")]
    LevelOutOfRange { level: usize, count: usize },
    #[error("time {t} outside stored span [0, {span}]")]
    TimeOutOfSpan { t: f64, span: f64 },
    #[error("normal undefined at kink (interface between cells {lower} and {upper})")]
    KinkNormal { lower: usize, upper: usize },
    #[error("surface value {value} at node {node} outside [0, {horizon}]")]
    SurfaceRange { node: usize, value: f64, horizon: f64 },
    #[error("coefficient matrix not positive definite at node {node} (eigenvalue {eigenvalue})")]
    NotPositiveDefinite { node: usize, eigenvalue: f64 },
    #[error("coefficient matrix not symmetric at node {node}")]
    NotSymmetric { node: usize },
    #[error("energy undefined for timelike Γ_S (max |∇S|_A = {max_slope})")]
    Timelike { max_slope: f64 },
    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("non-finite value detected at level {level}")]
    NonFinite { level: usize },
    #[error("initial data incompatible with boundary data at node {node} (mismatch {mismatch})")]
    Incompatible { node: usize, mismatch: f64 },
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("analytic coefficient gradient unavailable for sampled coefficients")]
    NoAnalyticGradient,
    #[error("analytic source derivatives unavailable")]
    NoAnalyticSource,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("epsilon {eps} unusable: {inside} levels inside [0, 2ε]; need at least 4 and 2ε < T")]
    EpsilonOutOfRange { eps: f64, inside: usize },
    #[error("order {k} exceeds hierarchy order {max}")]
    OrderTooHigh { k: usize, max: usize },
    #[error("grids differ between inputs")]
    GridMismatch,
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
