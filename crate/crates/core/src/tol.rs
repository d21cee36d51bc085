//! Pinned precisions and tolerances used by the verification suites.
//!
//! Every threshold that a report can pass or fail against lives here so
//! that runs are reproducible and the acceptance suite has a single
//! source of truth.

/// Default working precision in bits for all floating computations.
pub const DEFAULT_PREC: u32 = 256;

/// Escalated precision used once when a floating rank decision is ambiguous.
pub const ESCALATED_PREC: u32 = 512;

/// A DOF matrix counts as nonsingular iff `sigma_min / sigma_max` exceeds this.
pub const UNISOLVENCE_RATIO: f64 = 1e-8;

/// Singular values below this are treated as zero when computing floating ranks.
pub const RANK_EPS: f64 = 1e-40;

/// Required relative gap between the smallest accepted and largest rejected
/// singular value in a floating rank decision.
pub const RANK_GAP: f64 = 1e3;

/// Relative residual bound for Green's identities and trace relations.
pub const GREEN_TOL: f64 = 1e-50;

/// Relative residual bound for pointwise polynomial identities evaluated
/// through floating frames.
pub const FRAME_IDENTITY_TOL: f64 = 1e-60;

/// Bound for bubble-space trace vanishing and edge vanishing.
pub const BUBBLE_TRACE_TOL: f64 = 1e-55;

/// Bound for single-valuedness of shared traces and DOFs across elements.
pub const SINGLE_VALUED_TOL: f64 = 1e-55;

/// Residual bound for the discrete divdiv surjectivity (least-squares preimage).
pub const SURJECTIVITY_TOL: f64 = 1e-40;

/// Residual bound for dual-basis biorthogonality.
pub const BIORTHOGONALITY_TOL: f64 = 1e-60;
