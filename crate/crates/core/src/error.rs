use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("DomainError: {coordinate} = {value} lies outside the shape domain")]
    Domain { coordinate: &'static str, value: f64 },
    #[error("GeometryError: {0}")]
    Geometry(String),
    #[error("ConfigError: {0}")]
    Config(String),
    #[error("PreconditionError: {0}")]
    Precondition(String),
    #[error("ConvergenceError: stationary-point search stalled (best residual {best_residual:e})")]
    Convergence { best_residual: f64 },
    #[error("DegenerateHessianError: |det| = {det:e} below threshold {threshold:e}")]
    DegenerateHessian { det: f64, threshold: f64 },
    #[error("BudgetError: quadrature needs {nodes} nodes, budget is {budget}")]
    Budget { nodes: u64, budget: u64 },
    #[error("ModelError: {0}")]
    Model(String),
    #[error("MetricsError: {0}")]
    Metrics(String),
    #[error("BoundaryError: minimum at search interval edge ({at})")]
    Boundary { at: f64 },
    #[error("DegenerateWeightError: bias weights sum to zero")]
    DegenerateWeight,
}

impl Error {
    /// Short error-kind name, as printed on the CLI diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "DomainError",
            Error::Geometry(_) => "GeometryError",
            Error::Config(_) => "ConfigError",
            Error::Precondition(_) => "PreconditionError",
            Error::Convergence { .. } => "ConvergenceError",
            Error::DegenerateHessian { .. } => "DegenerateHessianError",
            Error::Budget { .. } => "BudgetError",
            Error::Model(_) => "ModelError",
            Error::Metrics(_) => "MetricsError",
            Error::Boundary { .. } => "BoundaryError",
            Error::DegenerateWeight => "DegenerateWeightError",
        }
    }
}
