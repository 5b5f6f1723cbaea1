use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are deliberately fine-grained: the HTTP layer maps domain errors
/// (`AlphaIsOne`, `ParamOutsideDisk`, ...) to 422 and the CLI maps everything
/// here to exit status 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TandelbrotError {
    #[error("alpha = 1 is excluded from the tangent family")]
    AlphaIsOne,
    #[error("alpha = 0: the free asymptotic value 1/alpha is undefined")]
    AlphaZero,
    #[error("alpha = 0 gives the entire map T_0, which has no poles")]
    NoPoles,
    #[error("cannot evaluate at infinity (essential singularity)")]
    EssentialSingularityInput,
    #[error("input is a pole of the map")]
    PoleInput,
    #[error("parameter {0} lies outside the unit disk")]
    ParamOutsideDisk(f64),
    #[error("invalid orbit seed: {0}")]
    InvalidSeed(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("derivative vanished during Newton refinement")]
    DegenerateDerivative,
    #[error("an intermediate iterate was clamped; the parameter derivative is unavailable")]
    DerivativeThroughPole,
    #[error("fixed-point continuation lost: {0}")]
    ContinuationLost(String),
    #[error("parameter is not in a hyperbolic component (no attracting cycle)")]
    NotHyperbolic,
    #[error("a = 0 is excluded from the Newton family")]
    AZero,
    #[error("grid is not contained in the disk |alpha| < 1/2")]
    GridOutsideHalfDisk,
    #[error("viewport has zero pixels")]
    ZeroPixelViewport,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed tile: {0}")]
    MalformedTile(String),
}

pub type Result<T> = std::result::Result<T, TandelbrotError>;
