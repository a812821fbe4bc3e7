//! Numerical tolerances used throughout the crate.
//!
//! Two regimes: 1e-9 for closed-form identities evaluated in a single
//! spectral pass, 1e-8 for chains that compound two or more
//! eigendecompositions. Everything tighter is either definitional or a
//! structural residual of one matrix factorization.

/// Max-entrywise residual allowed for `|A - A'|` when accepting a Hermitian operator.
pub const HERMITICITY: f64 = 1e-10;

/// Allowed deviation of a density-operator trace from one.
pub const TRACE: f64 = 1e-10;

/// Eigenvalues of a density operator may dip this far below zero (round-off floor).
pub const PSD_FLOOR: f64 = -1e-10;

/// Log-domain clipping floor: eigenvalues below this are treated as zero in
/// entropy sums (the 0 ln 0 = 0 convention) and clipped inside matrix logs.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Measurement branches with probability at or below this are dropped.
pub const BRANCH_FLOOR: f64 = 1e-12;

/// POVM completeness residual: max entry of `|sum D_k - I|`.
pub const COMPLETENESS: f64 = 1e-9;

/// Unitarity residual accepted for user-provided stage unitaries.
pub const UNITARITY: f64 = 1e-9;

/// Generated Haar unitaries must satisfy `|U'U - I|` within this.
pub const GENERATED_UNITARITY: f64 = 1e-10;

/// Commutator norm below which a state/POVM pair counts as classical.
pub const CLASSICALITY: f64 = 1e-9;

/// Probabilities may stray this far outside [0, 1] before clamping.
pub const PROBABILITY_SLACK: f64 = 1e-12;

/// Sum of an outcome distribution must be within this of one.
pub const DISTRIBUTION_SUM: f64 = 1e-9;

/// Single-eigendecomposition identities (closed forms, trace identities).
pub const CLOSED_FORM: f64 = 1e-9;

/// Identities whose evaluation chains two or more eigendecompositions.
pub const SPECTRAL_CHAIN: f64 = 1e-8;

/// Default tolerance for inequality verdicts (slack may not drop below its negative).
pub const INEQUALITY: f64 = 1e-8;

/// Cycle preconditions (`|dU| <= tol`, `|dF| <= tol`, `I <= tol`) for the
/// Clausius and two-bath verifiers.
pub const CYCLE_PRECONDITION: f64 = 1e-9;

/// First-law identity in analytic ledgers is closed-form arithmetic.
pub const ANALYTIC_IDENTITY: f64 = 1e-12;
