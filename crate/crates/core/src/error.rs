use crate::C64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Each variant is a distinct error class; [`Error::exit_code`] maps them onto
/// the process exit codes used by the command line front end.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coin is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("coin has a vanishing upper-left entry (assumption A2)")]
    A2Violated,
    #[error("|p|^2 - |q|^2 deviates from 1 by {deviation:.3e}")]
    ConstraintViolated { deviation: f64 },
    #[error("transfer-matrix product has no image in the coin group")]
    ProductLeavesS,
    #[error("coin sequence must contain at least one coin")]
    EmptySequence,
    #[error("n0 = 0 is not supported by the compressed evolution matrix")]
    UnsupportedN0,
    #[error("transfer polynomial relation check failed (relative residual {residual:.3e})")]
    RelationCheckFailed { residual: f64 },
    #[error("spectral parameter {xi} is (numerically) a resonance")]
    AtResonance { xi: C64 },
    #[error("polynomial root finding did not converge in {iterations} iterations")]
    RootFindingDiverged { iterations: usize },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("another resonance lies within twice the contour radius {radius:.3e}")]
    CircleTouchesOtherResonance { radius: f64 },
    #[error("Jordan chain solve is inconsistent (residual {residual:.3e})")]
    ChainSolveFailed { residual: f64 },
    #[error("window [{lo}, {hi}] lies outside the admissible cone [{cone_lo}, {cone_hi}]")]
    WindowOutsideCone {
        lo: i64,
        hi: i64,
        cone_lo: i64,
        cone_hi: i64,
    },
    #[error("survival norm underflows after {usable} usable points (need 20)")]
    AllZeroTail { usable: usize },
    #[error("double barrier requires n0 = 1 and non-diagonal coins (assumption A3)")]
    A3Violated,
    #[error("perturbed coin leaves the admissible coin group")]
    LeftS,
    #[error("perturbation direction phi = {phi} does not split the multiple resonance")]
    DegenerateDirection { phi: f64 },
    #[error("configuration error at {location}: {message}")]
    ConfigParse { location: String, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Process exit code for this error class. Zero is success and 1 is
    /// reserved for I/O failures in the binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigParse { .. } => 2,
            Error::InvalidArgument(_) => 3,
            Error::NotUnitary { .. } => 10,
            Error::A2Violated => 11,
            Error::ConstraintViolated { .. } => 12,
            Error::ProductLeavesS => 13,
            Error::EmptySequence => 14,
            Error::UnsupportedN0 => 20,
            Error::RelationCheckFailed { .. } => 21,
            Error::AtResonance { .. } => 30,
            Error::RootFindingDiverged { .. } => 40,
            Error::InvariantViolation(_) => 41,
            Error::CircleTouchesOtherResonance { .. } => 42,
            Error::ChainSolveFailed { .. } => 43,
            Error::WindowOutsideCone { .. } => 50,
            Error::AllZeroTail { .. } => 51,
            Error::A3Violated => 52,
            Error::LeftS => 60,
            Error::DegenerateDirection { .. } => 61,
        }
    }

    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigParse {
            location: location.into(),
            message: message.into(),
        }
    }
}
