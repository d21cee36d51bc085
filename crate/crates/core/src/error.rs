//! Shared error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Matrix / vector shapes are incompatible for the requested operation.
    ShapeMismatch(String),
    /// Polynomial arities disagree.
    ArityMismatch { left: usize, right: usize },
    /// A tensor does not satisfy the class expected by the operation.
    ClassMismatch(String),
    /// Simplex with zero measure.
    DegenerateSimplex,
    /// The image of a basis element does not lie in the span of the codomain.
    ImageNotInCodomain { element: usize, detail: String },
    /// A parameter is outside the validity range of the construction.
    ParamRange(String),
    /// A square system is singular where a unique solution was required.
    SingularMatrix,
    /// A floating rank decision had no acceptable singular-value gap even
    /// after precision escalation.
    RankGap { accepted: f64, rejected: f64 },
    /// Non-finite floating value where a finite one was required.
    NonFinite,
    /// Malformed mesh file or non-conforming mesh.
    Mesh(String),
    /// Anything else that indicates a bug rather than bad input.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch(s) => write!(f, "shape mismatch: {s}"),
            Error::ArityMismatch { left, right } => {
                write!(f, "arity mismatch: {left} vs {right}")
            }
            Error::ClassMismatch(s) => write!(f, "tensor class mismatch: {s}"),
            Error::DegenerateSimplex => write!(f, "degenerate simplex"),
            Error::ImageNotInCodomain { element, detail } => {
                write!(f, "image of basis element {element} not in codomain: {detail}")
            }
            Error::ParamRange(s) => write!(f, "parameter out of range: {s}"),
            Error::SingularMatrix => write!(f, "singular matrix"),
            Error::RankGap { accepted, rejected } => write!(
                f,
                "ambiguous rank: smallest accepted singular value {accepted:e} vs largest rejected {rejected:e}"
            ),
            Error::NonFinite => write!(f, "non-finite floating value"),
            Error::Mesh(s) => write!(f, "mesh error: {s}"),
            Error::Internal(s) => write!(f, "internal error: {s}"),
        }
    }
}

impl std::error::Error for Error {}
