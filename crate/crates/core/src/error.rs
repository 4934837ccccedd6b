use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point lies within {margin} of a non-smooth stratum ({stratum})")]
    SingularPoint { stratum: &'static str, margin: f64 },
    #[error("jacobian vanishes at the requested point")]
    DegenerateJacobian,
    #[error("target lies on the non-injectivity half-line {{-t e_x : t >= 0}}")]
    OnNonInjectiveSet,
    #[error("newton inversion failed (best residual {residual:e})")]
    InversionFailed { residual: f64 },
    #[error("matrix is singular or has non-positive determinant ({det:e})")]
    SingularMatrix { det: f64 },
    #[error("integration domain is empty")]
    EmptyDomain,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("box counting needs >= 4 scales spanning >= 2 decades")]
    InsufficientScales,
    #[error("occupied voxels touch the bounding box; enlarge the grid")]
    GridTooCoarse,
    #[error("argument out of range: {0}")]
    OutOfRange(&'static str),
    #[error("level c = 0 degenerates to a circle")]
    DegenerateLevel,
}

pub type Result<T> = core::result::Result<T, Error>;
