//! Numerical tolerances used across the crate.
//!
//! Three-level ladder: construction checks are strictest, algebraic
//! identities sit in the middle, and anything comparing two independent
//! computation routes gets the loosest bound. Keeping them centralized
//! makes it obvious which kind of disagreement a failing check reports.

/// Validity checks at construction time (Hermiticity, trace, norms).
pub const CONSTRUCTION: f64 = 1e-10;

/// Algebraic identities between quantities computed along one route
/// (e.g. eigendecomposition reconstruction error).
pub const IDENTITY: f64 = 1e-8;

/// Agreement between two independent computation routes
/// (closed form vs density-matrix pipeline).
pub const CROSS_ROUTE: f64 = 1e-6;

/// Most negative eigenvalue tolerated on a state before it is rejected
/// instead of clamped.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Eigenvalues below this are treated as exact zeros when ranking a
/// spectrum (purification ancilla dimension, rank checks).
pub const RANK_CUTOFF: f64 = 1e-12;

/// Allowed imaginary residue on quantities that must be real
/// (Born probabilities, correlators) and allowed trace drift under
/// trace-preserving maps.
pub const REAL_RESIDUE: f64 = 1e-9;

/// Conditional-state branches below this probability contribute zero
/// entropy instead of being renormalized.
pub const BRANCH_CUTOFF: f64 = 1e-12;

/// Exact-structure checks: orthonormality of fixed basis vectors,
/// operator-sum completeness.
pub const EXACT_STRUCTURE: f64 = 1e-12;
