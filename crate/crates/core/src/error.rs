use thiserror::Error;

/// Every failure the workbench can report.
///
/// Variant names are part of the command-line contract: diagnostics start
/// with [`Error::kind`] so scripts can match on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("element is not Hermitian")]
    NotHermitian,
    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("no convergence after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (pivot {pivot:e})")]
    NotPsd { pivot: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rank deficient system (achieved rank {rank} of {cols})")]
    RankDeficient { rank: usize, cols: usize },
    #[error("vector is a member of the cone")]
    IsMember,
    #[error("desk scale exceeded: {what}")]
    DeskScaleExceeded { what: String },
    #[error("functional is not in the dual cone")]
    NotInDualCone,
    #[error("vector is not absorbed by the neighbourhood")]
    NotAbsorbed,
    #[error("Riesz elements live on different spaces ({left} vs {right})")]
    SpaceMismatch { left: usize, right: usize },
    #[error("functional is not positive")]
    NotPositive,
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeExceeded { degree: usize, bound: usize },
    #[error("moment for exponents {exps:?} is missing")]
    MissingMoment { exps: Vec<u32> },
    #[error("functional is not a state (value on 1 is {value})")]
    NotState { value: f64 },
    #[error("moment data of degree {available} cannot support degree {needed}")]
    DegreeHeadroomMissing { needed: usize, available: usize },
    #[error("representation is not flat")]
    NotFlat,
    #[error("degenerate spectrum: eigenvalue gap {gap:e} after {retries} retries")]
    DegenerateSpectrum { gap: f64, retries: usize },
    #[error("functional is not Hermitian on the algebra basis")]
    NotHermitianFunctional,
    #[error("sequence is not decreasing and nonnegative at step {step}")]
    NotDecreasing { step: usize },
    #[error("polynomial has odd degree {degree}")]
    OddDegree { degree: usize },
    #[error("invalid order data: {reason}")]
    InvalidOrderData { reason: String },
    #[error("invalid algebra: {reason}")]
    InvalidAlgebra { reason: String },
    #[error("invalid input at `{field}`: {reason}")]
    Parse { field: String, reason: String },
}

impl Error {
    /// Stable variant name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::NotHermitian => "NotHermitian",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NotPsd { .. } => "NotPsd",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::IsMember => "IsMember",
            Error::DeskScaleExceeded { .. } => "DeskScaleExceeded",
            Error::NotInDualCone => "NotInDualCone",
            Error::NotAbsorbed => "NotAbsorbed",
            Error::SpaceMismatch { .. } => "SpaceMismatch",
            Error::NotPositive => "NotPositive",
            Error::DegreeExceeded { .. } => "DegreeExceeded",
            Error::MissingMoment { .. } => "MissingMoment",
            Error::NotState { .. } => "NotState",
            Error::DegreeHeadroomMissing { .. } => "DegreeHeadroomMissing",
            Error::NotFlat => "NotFlat",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::NotHermitianFunctional => "NotHermitianFunctional",
            Error::NotDecreasing { .. } => "NotDecreasing",
            Error::OddDegree { .. } => "OddDegree",
            Error::InvalidOrderData { .. } => "InvalidOrderData",
            Error::InvalidAlgebra { .. } => "InvalidAlgebra",
            Error::Parse { .. } => "Parse",
        }
    }

    pub(crate) fn parse(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
