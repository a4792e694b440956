//! Rate-distortion limits for compressing ensembles of commuting mixed
//! quantum states.
//!
//! An ensemble of quantum states with commuting density operators is
//! equivalent to a classical source that emits one of `M` probability
//! distributions per letter; a measurement of the emitted state produces an
//! outcome in an `N`-letter alphabet. Compressing such a source subject to a
//! fidelity constraint is a rate-distortion problem in which the distortion
//! is a convex function of the empirical joint distribution of (state,
//! reconstruction) pairs.
//!
//! The crate computes the rate-distortion function `R(Δ)` of this problem
//! for both observation modes:
//!
//! - **visible**: the encoder sees the state sequence itself,
//! - **hidden** (also called *blind*): the encoder sees only a sequence of
//!   measurement outcomes.
//!
//! Modules:
//!
//! - [`prob`] — finite-alphabet probability vectors, joint matrices,
//!   channels, and the usual information measures in bits.
//! - [`model`] — the commuting-ensemble source model and its naive
//!   entropy/erasure/mutual-information bounds.
//! - [`distortion`] — the Bhattacharyya-Wootters and informational-divergence
//!   distortion measures (plus expected letter distortion for classical
//!   validation), with analytic gradients.
//! - [`solver`] — the Lagrangian-sweep convex solver for `R(Δ)`, a
//!   brute-force grid oracle, and the classical rate-distortion special case.
//! - [`sim`] — a random-codebook achievability simulator.
//!
//! The crate is `no_std` (it requires `alloc`); float transcendentals come
//! from [`libm`]. All operations are pure functions over immutable values
//! and are safe to call concurrently.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(test, not(feature = "std")))]
extern crate std;

use core::fmt;

pub mod distortion;
pub mod model;
pub mod prob;
pub mod sim;
pub mod solver;

pub use distortion::DistortionMeasure;
pub use model::{CdoSource, Mode, ViewSpec};
pub use prob::{Channel, JointPmf, Matrix, Pmf};
pub use sim::{Codebook, SimReport};
pub use solver::{RdCurve, RdPoint, SolverOptions};

/// Errors for model construction and solver/simulator operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability vector does not sum to one within tolerance.
    NotNormalized { sum: f64 },
    /// A probability entry is negative.
    NegativeEntry { index: usize, value: f64 },
    /// A channel row does not sum to one within tolerance.
    RowNotNormalized { row: usize, sum: f64 },
    /// Vector lengths or row counts disagree.
    LengthMismatch { expected: usize, got: usize },
    /// Matrix shapes disagree.
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// An operation that needs at least one element got none.
    EmptyInput,
    /// A scalar parameter is outside its domain.
    OutOfRange { what: &'static str, value: f64 },
    /// A letter index lies outside its alphabet.
    LetterOutOfRange { index: usize, alphabet: usize },
    /// A gradient was requested at a point with zero mass where the
    /// reference distribution has positive mass.
    ZeroWhereReferencePositive { row: usize, col: usize },
    /// An alphabet exceeds what an exhaustive scan can handle.
    AlphabetTooLarge {
        what: &'static str,
        size: usize,
        max: usize,
    },
    /// A codebook (or type-class table) would exceed the memory budget.
    MemoryBudget { required: f64, budget: u64 },
    /// The requested distortion lies below the minimum achievable value.
    InfeasibleDelta { delta: f64, min_distortion: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotNormalized { sum } => {
                write!(f, "probabilities sum to {sum}, expected 1")
            }
            Error::NegativeEntry { index, value } => {
                write!(f, "negative probability {value} at index {index}")
            }
            Error::RowNotNormalized { row, sum } => {
                write!(f, "channel row {row} sums to {sum}, expected 1")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::ShapeMismatch { expected, got } => write!(
                f,
                "shape mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::EmptyInput => write!(f, "empty input"),
            Error::OutOfRange { what, value } => {
                write!(f, "{what} = {value} is out of range")
            }
            Error::LetterOutOfRange { index, alphabet } => {
                write!(f, "letter {index} outside alphabet of size {alphabet}")
            }
            Error::ZeroWhereReferencePositive { row, col } => write!(
                f,
                "zero mass at ({row}, {col}) where the reference is positive"
            ),
            Error::AlphabetTooLarge { what, size, max } => {
                write!(f, "{what} alphabet size {size} exceeds maximum {max}")
            }
            Error::MemoryBudget { required, budget } => write!(
                f,
                "requires {required:.3e} letters, budget is {budget}"
            ),
            Error::InfeasibleDelta {
                delta,
                min_distortion,
            } => write!(
                f,
                "distortion limit {delta} is below the minimum achievable {min_distortion}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
