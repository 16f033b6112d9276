//! Euclidean projection onto parameter-dependent polyhedra, with tools to
//! diagnose constraint qualifications and to certify continuity properties of
//! the projection map numerically.
//!
//! A [`scenario::Scenario`] describes a family of sets
//!
//! ```text
//! C(p) = { x : <x, g_i(p)> = f_i(p)   for equality rows,
//!              <x, g_i(p)> <= f_i(p)  for inequality rows }
//! ```
//!
//! where the row vectors `g_i` and right-hand sides `f_i` are expression trees
//! over the parameter vector `p`. On top of that the crate
//!
//! * computes the projection `P(v, p)` of a point onto `C(p)` with a dual
//!   active-set solver, checked against a subset-enumeration oracle
//!   ([`projection`]),
//! * decomposes `v - P(v, p)` into Lagrange multipliers and reduces such
//!   combinations to independent supports ([`multipliers`]),
//! * checks LICQ, MFCQ, and constant-rank conditions around an anchor
//!   parameter ([`cq`]),
//! * enumerates re-taggings of active inequalities into equalities and tests
//!   which of them are stable under parameter perturbations
//!   ([`representations`]),
//! * fits Holder-1/2 and Lipschitz continuity constants of `P` on shrinking
//!   sampling shells and probes the normal-cone graph for Lipschitz-like
//!   behavior ([`stability`]).
//!
//! Everything is deterministic. Sampling draws from counter-based streams
//! keyed by the seed and the sample position, so results do not depend on how
//! work is scheduled across threads. The environment variable
//! `POLYPROJ_THREADS` caps the worker count.
//!
//! The `polyproj` binary exposes the same operations as a small report-writing
//! command line tool; the `examples/` directory walks through each capability.

pub mod cli;
pub mod cq;
pub mod multipliers;
pub mod numerics;
pub mod projection;
pub mod report;
pub mod representations;
pub mod sampling;
pub mod scenario;
pub mod stability;

mod subsets;

pub use numerics::{Matrix, RankResult, TAU_POS, TAU_RANK};
pub use projection::{ProjectionResult, ProjectionStatus, TOL_ACT, TOL_FEAS};
pub use scenario::{Polyhedron, Scenario};

use std::fmt;

/// Errors shared by every module. Each operation documents which variants it
/// can produce.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input or an intermediate value was NaN or infinite.
    NonFinite,
    /// Input vectors were linearly dependent where independence is required.
    DependentInput,
    /// The target vector is not in the span of the basis at the tolerance.
    NotInSpan,
    /// Equality rows are linearly dependent (the system is still consistent).
    DependentRows,
    /// Equality rows are dependent and the right-hand sides contradict.
    Inconsistent,
    /// The active-set loop hit its iteration cap without converging.
    CycleLimit,
    /// The subset-enumeration oracle refuses more than 20 constraints.
    TooManyConstraints,
    /// The constraint set is empty.
    Infeasible,
    /// The given point violates the constraints beyond the tolerance.
    NotFeasible,
    /// The vector is not contained in the cone spanned by the active rows.
    NotInCone,
    /// A positive combination summed to (numerically) zero.
    ZeroSum,
    /// The free block of a mixed combination is linearly dependent.
    DependentFreePart,
    /// A subset scan would exceed its enumeration cap.
    SubsetBlowup,
    /// Rows that must be independent at the anchor parameter are not.
    DependentAtAnchor,
    /// Equality rows fail the independence precondition of MFCQ.
    IndependenceViolation,
    /// The anchor projection problem is infeasible.
    AnchorInfeasible,
    /// No multiplier representation exists over the required rows.
    NoRepresentation,
    /// The candidate re-tagging set L is not admissible.
    InadmissibleL,
    /// The scenario carries no anchors but the operation needs them.
    MissingAnchors,
    /// The scenario document violates the file format.
    Schema(String),
    /// An expression string violates the grammar.
    Expr(String),
    /// An unexpected numerical failure (residual blow-up, no pivot, ...).
    Numeric(String),
    /// A checked precondition on plain arguments was violated.
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite => write!(f, "non-finite value in input or result"),
            Error::DependentInput => write!(f, "input vectors are linearly dependent"),
            Error::NotInSpan => write!(f, "target is not in the span of the basis"),
            Error::DependentRows => write!(f, "equality rows are linearly dependent"),
            Error::Inconsistent => write!(f, "equality system is inconsistent"),
            Error::CycleLimit => write!(f, "active-set iteration cap exceeded"),
            Error::TooManyConstraints => write!(f, "too many constraints for subset enumeration"),
            Error::Infeasible => write!(f, "constraint set is empty"),
            Error::NotFeasible => write!(f, "point violates the constraints"),
            Error::NotInCone => write!(f, "vector is outside the active-row cone"),
            Error::ZeroSum => write!(f, "positive combination sums to zero"),
            Error::DependentFreePart => write!(f, "free block of the combination is dependent"),
            Error::SubsetBlowup => write!(f, "subset enumeration exceeds the cap"),
            Error::DependentAtAnchor => write!(f, "rows are dependent at the anchor parameter"),
            Error::IndependenceViolation => write!(f, "equality rows are dependent at the point"),
            Error::AnchorInfeasible => write!(f, "anchor projection problem is infeasible"),
            Error::NoRepresentation => write!(f, "no representation over the required rows"),
            Error::InadmissibleL => write!(f, "re-tagging set is not admissible"),
            Error::MissingAnchors => write!(f, "scenario has no anchors"),
            Error::Schema(msg) => write!(f, "scenario schema: {msg}"),
            Error::Expr(msg) => write!(f, "expression: {msg}"),
            Error::Numeric(msg) => write!(f, "numerical failure: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
