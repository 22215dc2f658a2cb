use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error(
        "quadrature tolerance not met: estimated error {achieved:e} > requested {requested:e}"
    )]
    Tolerance { achieved: f64, requested: f64 },

    #[error("exponent {exponent} exceeds overflow guard in {context}")]
    Overflow { exponent: f64, context: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("point outside the disk: {0}")]
    OutOfDomain(String),

    #[error("invalid configuration: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
