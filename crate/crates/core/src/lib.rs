//! Verification laboratory for divdiv-conforming symmetric-tensor and
//! sym-curl-conforming trace-free-tensor finite elements on simplices.
//!
//! The crate builds polynomial tensor spaces with exact rational
//! coefficients, realizes the differential and Koszul operators between
//! them as exact matrices, and certifies dimension formulas, complex
//! exactness, Green's identities, trace relations and degree-of-freedom
//! unisolvence at desk scale.  Geometry-dependent quantities (unit
//! normals, tangents) enter through an arbitrary-precision floating
//! layer with configurable precision.

pub mod bigfloat;
pub mod bubblecx;
pub mod complexlab;
pub mod diffops;
pub mod error;
pub mod exactla;
pub mod femdofs;
pub mod meshfem;
pub mod polyring;
pub mod polyspaces;
pub mod randgen;
pub mod report;
pub mod simplexgeo;
pub mod suites;
pub mod tensorops;
pub mod tol;
pub mod tracesgreen;

pub use error::{Error, Result};
pub use exactla::{ExactMatrix, Rat};
