use thiserror::Error;

/// Errors raised by the geometry, bundle, metric-space and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {value} on axis {axis} lies outside [{lo}, {hi}]")]
    OutOfDomain {
        axis: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("metric is degenerate at {at:?}: smallest eigenvalue {min_eigenvalue:e}")]
    DegenerateMetric { at: Vec<f64>, min_eigenvalue: f64 },
    #[error("metric is not symmetric at {at:?} (deviation {deviation:e})")]
    AsymmetricMetric { at: Vec<f64>, deviation: f64 },
    #[error("integration left the coordinate domain at parameter {param}")]
    LeftDomain { param: f64 },
    #[error("projection jacobian is rank deficient at {at:?}: smallest singular value {sigma_min:e}")]
    RankDeficient { at: Vec<f64>, sigma_min: f64 },
    #[error("base point mismatch: expected {expected:?}, got {got:?}")]
    BasePointMismatch { expected: Vec<f64>, got: Vec<f64> },
    #[error("bundle tangent vectors are attached to different points")]
    MismatchedBasePoint,
    #[error("warping function is not positive ({value}) at {at:?}")]
    NonPositiveWarp { at: Vec<f64>, value: f64 },
    #[error("warping function value {value} exceeds declared upper bound {upper_bound}")]
    WarpAboveBound { value: f64, upper_bound: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sampled graph has {found} connected components, expected {expected}")]
    DisconnectedGraph { found: usize, expected: usize },
    #[error("invalid metric space: {0}")]
    InvalidMetricSpace(String),
    #[error("relation is not a correspondence: {0}")]
    NotSurjective(String),
    #[error("exact Gromov-Hausdorff enumeration limited to |X|*|Y| <= {limit}, got {size}")]
    TooLarge { size: usize, limit: usize },
    #[error("fiber net for base net point {0} is empty")]
    EmptyFiberNet(usize),
    #[error("target point {0} is not the image of any sampled source point")]
    UncoveredTarget(usize),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("scenario `{0}` has a non-integrable horizontal distribution")]
    IntegrabilityRequired(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
