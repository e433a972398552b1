//! Selberg-type central limit expansions for random Euler products.
//!
//! The crate computes the coefficient table `b_{k,l}` of the Hermite
//! expansion for the joint law of `(log|L_j|, arg L_j)` just right of the
//! critical line, evaluates the resulting density and rectangle
//! probabilities, and ships two independent checks: Monte Carlo sampling of
//! the random model and empirical sampling of `ζ(σ_T + it)`.
//!
//! All large-`T` quantities are parameterised by `log T`; `T` itself never
//! appears as a float.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the formulas over `j`, `k`, `l`.
#![allow(clippy::needless_range_loop)]

pub mod distribution;
pub mod error;
pub mod expansion;
pub mod hermite;
pub mod lfunction;
pub mod local;
pub mod montecarlo;
pub mod parallel;
pub mod primes;
pub mod quad;
pub mod rng;
pub mod series;
pub mod special;
pub mod stats;
pub mod sum;
pub mod zeta;

pub use distribution::{char_function, density, gaussian_leading, probability, Rectangle};
pub use error::{Error, Result};
pub use expansion::{b_table, CoeffTable, ExpansionConfig, PrimeTail, SigmaMode};
pub use lfunction::{LFunctionSpec, ScaleParams};
pub use num_complex::Complex64;
pub use series::{Monomial, TruncatedSeries};
