use thiserror::Error;

use crate::state::Subsystem;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the simulator kernel and the weak-measurement layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subsystem {0} appears more than once")]
    DuplicateLabel(Subsystem),
    #[error("subsystem {0} is not part of the target space")]
    LabelNotInTarget(Subsystem),
    #[error("subsystem {0} is not part of the state")]
    LabelNotInState(Subsystem),
    #[error("label sets differ: {left:?} vs {right:?}")]
    LabelMismatch {
        left: Vec<Subsystem>,
        right: Vec<Subsystem>,
    },
    #[error("expected {expected} amplitudes/rows, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("pre/post overlap {overlap:e} is below the cutoff; the weak value diverges")]
    VanishingOverlap { overlap: f64 },
    #[error("postselection probability {probability:e} is numerically zero")]
    ZeroProbability { probability: f64 },
    #[error("observable is not Hermitian")]
    NonHermitianObservable,
    #[error("observable does not factor as an arm projector times a polarization involution")]
    UnsupportedCoupling,
    #[error("coupling strength g = {0} outside (0, 0.1]")]
    InvalidCoupling(f64),
    #[error("no trial survived postselection")]
    NoPostselectedEvents,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
