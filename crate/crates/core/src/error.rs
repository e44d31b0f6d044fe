use thiserror::Error;

use crate::model::{Kind, SlotRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus must have positive degree")]
    DegenerateModulus,
    #[error("modulus is not square-free")]
    NotSquarefree,
    #[error("isolating interval does not contain exactly one root")]
    NotIsolated,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("expected a {expected:?}-slot, got {got}")]
    Kind { expected: Kind, got: SlotRef },
    #[error("slot {0} does not exist in this type")]
    NoSuchSlot(SlotRef),
    #[error("not a geometric type: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("transition matrix is reducible")]
    Reducible,
    #[error("minimal polynomial of the expansion factor has degree {0}, exact arithmetic supports at most 4")]
    DegreeTooLarge(usize),
    #[error("closed-word count overflowed for period {0}")]
    Overflow(usize),
    #[error("period {0} is outside the supported range 1..=12")]
    Period(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("budget exceeded: {what} limit {limit}")]
    Budget { what: &'static str, limit: usize },
    #[error("identification is ambiguous around guard at {0}")]
    WindingGuard(String),
    #[error("point is not in the interior of a side of the rectangle: {0}")]
    NotAQuadrantPair(String),
    #[error("unknown rectangle id {0}")]
    UnknownRect(usize),
    #[error("slot {0} does not belong to a rectangle of type {1}")]
    ForeignSlot(SlotRef, usize),
    #[error("rectangle type {0} out of range")]
    NoSuchType(usize),
    #[error("development is not Markovian here: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<FieldError> for CoverError {
    fn from(e: FieldError) -> Self {
        CoverError::Symbolic(e.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("rectangles {0} and {1} are not comparable by a monotone chain")]
    NotComparable(usize, usize),
    #[error("no B-cancellation at position {0}")]
    NotBReducible(usize),
    #[error("C-move not applicable: {0}")]
    NotCApplicable(String),
    #[error("path is not closed")]
    NotClosed,
    #[error("malformed path: {0}")]
    Malformed(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("surgery matrix has determinant {0}, expected 1")]
    Det(i64),
    #[error("prong data needs n >= 2, got {0}")]
    Prongs(i64),
    #[error("meridian/parallel exponents are not integral for n={n}, k={k}")]
    Format { n: i64, k: i64 },
}

/// Umbrella error used by front ends.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}
