use thiserror::Error;

use crate::shift::Word;

/// Broad classification of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input violates a documented precondition.
    Precondition,
    /// An iterative solver did not converge or produced an inconsistent result.
    Numerical,
    /// A well-posed question was answered negatively with a finite witness.
    Obstruction,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),

    #[error("transition matrix is not primitive")]
    NotPrimitive,

    #[error("alphabet size {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("matrix is not column stochastic: {0}")]
    NotStochastic(String),

    #[error("potentials are defined over different transition matrices")]
    BaseMismatch,

    #[error("word {0} is not admissible")]
    NotAdmissible(Word),

    #[error("word {0} is not a cycle")]
    NotACycle(Word),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error("value {value} at position {position} matches no admissible edge")]
    NoMatch { position: usize, value: f64 },

    #[error("value {value} at position {position} matches several edges; Q is not in G_A")]
    NotInG { position: usize, value: f64 },

    #[error("last value is 1, so the final symbol has a unique predecessor and the word is not determined")]
    BadTerminal,

    #[error("#E0(A) = {a} differs from #E0(B) = {b}")]
    E0CountMismatch { a: usize, b: usize },

    #[error(
        "E0 value sets differ (only in first: {only_first:?}, only in second: {only_second:?})"
    )]
    ValueSetMismatch {
        only_first: Vec<f64>,
        only_second: Vec<f64>,
    },

    #[error("induced block code is not a conjugacy: {0}")]
    NotInvertible(String),

    #[error("degenerate input: Q_32 equals Q_14 * Q_42")]
    Degenerate,

    #[error("base matrix is not the 4-symbol counterexample matrix")]
    WrongBase,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NonConvergence { .. } | Error::Numerical(_) => ErrorKind::Numerical,
            Error::ValueSetMismatch { .. } | Error::NotInvertible(_) => ErrorKind::Obstruction,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
