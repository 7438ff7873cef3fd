use thiserror::Error;

/// Errors raised anywhere in the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
    #[error(
        "quadrature budget exhausted: value {value:e} ± {error:e}, worst interval [{worst_lo:e}, {worst_hi:e}]"
    )]
    QuadratureBudget {
        value: f64,
        error: f64,
        worst_lo: f64,
        worst_hi: f64,
    },
    #[error("quadrature failed at ω = {omega:e}: {source}")]
    QuadratureAt {
        omega: f64,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
    #[error("no sign change on [{lo:e}, {hi:e}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("fixed point not reached after {iterations} iterations (last {last:e}, residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        last: f64,
        residual: f64,
    },
    #[error("time grid is not uniform at sample {index}")]
    NonUniformGrid { index: usize },
    #[error("record too short: |P(t_max)| = {tail:.3} > 0.05, increase t_max")]
    TraceTooShort { tail: f64 },
    #[error("frequency grid too coarse: peak height drifts by {drift:.3e} under refinement")]
    GridTooCoarse { drift: f64 },
    #[error("Hilbert space dimension {dim} exceeds the limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },
    #[error("{0}")]
    Degenerate(&'static str),
}

impl Error {
    pub(crate) fn at(omega: f64, source: Error) -> Self {
        Error::QuadratureAt {
            omega,
            source: alloc::boxed::Box::new(source),
        }
    }
}
