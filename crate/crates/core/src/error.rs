use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("unsupported model: {0}")]
    UnsupportedModel(&'static str),

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("root search did not converge: {0}")]
    InversionFailure(&'static str),

    #[error("grid refinement did not converge (coarse {coarse}, fine {fine})")]
    GridRefinement { coarse: f64, fine: f64 },

    #[error("point count {0} exceeds the overflow guard")]
    PointOverflow(u64),

    #[error("normalization failed: total mass {0}")]
    Normalization(f64),

    #[error("empty input")]
    Empty,

    #[error("cannot parse model spec `{0}`")]
    ModelSpec(alloc::string::String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, what: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(what))
    }
}
