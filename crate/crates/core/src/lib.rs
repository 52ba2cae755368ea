//! Musielak-Orlicz norms generated by permutation matrix-averages.
//!
//! The crate computes both sides of the equivalence
//!
//! ```text
//!     Ave_π max_i |x_i y_{iπ(i)}|  ~  ‖x‖_{ΣM_i*}
//! ```
//!
//! where the Orlicz functions `M_i` are built from the rows of `y`, and the
//! converse direction (functions to matrix). Averages are computed exactly by
//! enumerating permutations at small dimension and by seeded Monte-Carlo
//! sampling beyond that.
//!
//! Modules, bottom-up:
//!
//! * [`orlicz`]: piecewise-linear and power Orlicz functions, inversion and
//!   Legendre conjugation.
//! * [`musielak`]: Luxemburg norms over a vector of Orlicz functions.
//! * [`combinat`]: permutation averages and rearrangement bounds.
//! * [`generation`]: matrix to functions and back, ball inclusion witnesses,
//!   sandwich verification.
//! * [`approx`]: the composition-maximum norm and its factor-2 equivalence.
//! * [`instance`]: reproducible random instances and report records.
//!
//! With the default `parallel` feature the heavy loops run on rayon; without
//! it every [`par::Execution`] falls back to a sequential loop. Results are
//! bit-identical either way.

// `!(a > b)` is used on purpose to reject NaN alongside the failing case.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bisect;
pub mod combinat;
mod error;
pub mod generation;
pub mod instance;
pub mod matrix;
pub mod musielak;
pub mod orlicz;
pub mod par;
pub mod report;

pub use error::{Error, Result};
pub use matrix::WeightMatrix;

/// Absolute tolerance for breakpoint and modular comparisons.
pub const EPS: f64 = 1e-12;
