use thiserror::Error;

use crate::cdga::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator {0} has degree 0; generators must have positive degree")]
    ZeroDegree(String),
    #[error("duplicate generator name {0}")]
    DuplicateGenerator(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("{context}: expected degree {expected}, found degrees {found:?}")]
    DegreeMismatch {
        context: String,
        expected: u32,
        found: Vec<u32>,
    },
    #[error("replacement for {generator} has degree {found}, parity differs from degree {expected}")]
    ParityMismatch {
        generator: String,
        expected: u32,
        found: u32,
    },
    #[error("cannot solve {relation} for {generator}: it must occur only as an isolated linear term")]
    NotSolvable { generator: String, relation: String },
    #[error("d{generator} = {differential} is not a nonzero multiple of a single even generator")]
    NotLinearDifferential { generator: String, differential: String },
    #[error("{generator} still occurs in the differential of {occurs_in}")]
    ResidualOccurrence { generator: String, occurs_in: String },
    #[error("{0} is not a cocycle")]
    NotACocycle(String),
    #[error("monomial basis in degree {degree} exceeds the limit of {limit}")]
    ResourceLimit { degree: u32, limit: usize },
    #[error("sphere dimension {0} unsupported: need a positive multiple of 4")]
    UnsupportedDimension(u32),
    #[error("invalid model: {}", render_violations(.0))]
    InvalidModel(Vec<Violation>),
    #[error("{0}")]
    InvalidInput(String),
    #[error("verification failed at step {step} ({description}): betti before {before:?}, after {after:?}")]
    VerificationFailed {
        step: usize,
        description: String,
        before: Vec<usize>,
        after: Vec<usize>,
    },
}

fn render_violations(vs: &[Violation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
