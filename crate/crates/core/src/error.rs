use thiserror::Error;

/// Errors raised by the geometry engine.
///
/// Structural errors (malformed input) are kept separate from failed
/// identities: a failed identity is a residual in a report, never an `Err`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid tangent space: {0}")]
    InvalidSpace(String),

    #[error("degenerate seed: projection norm {norm:e} is below tolerance")]
    DegenerateSeed { norm: f64 },

    #[error("shape operator is not g-symmetric (residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("holomorphic sectional curvature c must be nonzero")]
    ZeroCurvature,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("focal point: |lambda| = {lambda:e} exceeded the blow-up bound at r = {r}")]
    FocalPoint { r: f64, lambda: f64 },

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("spectral entry {entry} disagrees with the Riccati oracle by {deviation:e}")]
    OracleMismatch { entry: String, deviation: f64 },
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

pub(crate) fn ensure_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
