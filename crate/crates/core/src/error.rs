use thiserror::Error;

/// Failures of the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty index window: ceil(n*a) = {lo} > floor(n*b) = {hi}")]
    WindowEmpty { lo: i64, hi: i64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("x = {x} lies outside [{a}, {b}]")]
    DomainViolation { x: f64, a: f64, b: f64 },

    #[error("function `{0}` has no finite sup norm")]
    UnboundedFunction(String),

    #[error("invalid quadrature weights: {0}")]
    InvalidWeights(String),

    #[error("function `{id}` is not defined on [{lo}, {hi}]")]
    IntervalViolation { id: String, lo: f64, hi: f64 },

    #[error("function `{id}` does not supply a derivative of order {order}")]
    MissingDerivative { id: String, order: usize },

    #[error("derivative of order {order} is {value:e} at x0 = {x0}, not zero")]
    CriticalPointViolated { order: usize, x0: f64, value: f64 },

    #[error("degenerate rate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
