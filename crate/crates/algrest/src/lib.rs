//! Exact-arithmetic engine for algebraic restrictions of differential forms
//! to quasi-homogeneous curve germs.
//!
//! The library computes, over the rationals and with no rounding anywhere:
//!
//! * graded bases of the spaces of algebraic restrictions of 2-forms and of
//!   closed 2-forms to a curve germ ([`restriction`]),
//! * infinitesimal actions of tangent vector fields on those restrictions and
//!   normal-form reduction by graded elimination ([`classify`]),
//! * discrete symplectic invariants: index of isotropy, symplectic
//!   multiplicity, Lagrangian tangency orders and geometric conditions
//!   ([`invariants`]),
//! * a built-in, load-checked catalog of the U7, U8 and U9 curve
//!   singularities together with golden data for regression ([`catalog`]).
//!
//! Everything is driven by the small exact substrate in [`poly`], [`linalg`]
//! and [`forms`]. Input files and coefficient lists are parsed by [`parse`];
//! reports are rendered by [`report`].

pub mod catalog;
pub mod classify;
pub mod forms;
pub mod germ;
pub mod invariants;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod report;
pub mod restriction;

pub use num_rational::BigRational;

/// Crate-wide exact scalar. Always in lowest terms, denominator positive.
pub type Q = num_rational::BigRational;

/// Deterministic RNG used wherever the engine draws random rationals.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha20Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha20Rng::seed_from_u64(seed)
}

use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("quasi-degree of the zero polynomial is undefined")]
    ZeroPolynomialDegree,
    #[error("polynomial is not quasi-homogeneous: degrees {0} and {1} both occur")]
    NonHomogeneous(i64, i64),
    #[error("form degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("restriction space did not stabilize below degree bound {bound}: quotient piece at quasi-degree {delta} is nonzero; increase the degree bound")]
    StabilizationFailed { bound: i64, delta: i64 },
    #[error("2-form has a homogeneous component of quasi-degree {delta} above the truncation bound {bound}")]
    PieceAboveBound { delta: i64, bound: i64 },
    #[error("vector field is not tangent to the germ")]
    NotTangent,
    #[error("algebraic restriction is not in the closed subspace")]
    NotClosed,
    #[error("tangency search reached ceiling {ceiling} without an infinity certificate; increase the ceiling")]
    CeilingExhausted { ceiling: usize },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("load check failed for {identity}: {reason}")]
    LoadCheck { identity: String, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the restriction class admits no representative vanishing at 0 (hypothesis of the 1-form route)")]
    NoVanishingRepresentative,
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;
