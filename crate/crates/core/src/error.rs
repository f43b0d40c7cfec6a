use thiserror::Error;

/// Errors raised by the solvers. Numeric payloads are reported as `f64`
/// whatever the working scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    NonConvergence { estimate: f64, error_bound: f64 },
    #[error("principal-value pole {pole} lies on an endpoint of [{a}, {b}]")]
    PoleAtEndpoint { pole: f64, a: f64, b: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("point ({re}, {im}) lies on the branch cut")]
    OnCut { re: f64, im: f64 },
    #[error("argument {value} outside the admissible range {range}")]
    OutOfRange { value: f64, range: &'static str },
    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),
    #[error("accumulated winding {winding} is not close to an integer; refine the grid")]
    GridTooCoarse { winding: f64 },
    #[error("iteration did not converge after {iterations} sweeps (last change {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("far-field regression is not linear enough (R^2 = {r_squared})")]
    UnstableFit { r_squared: f64 },
    #[error("profile grids do not overlap: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
