//! Exact asymptotic analysis of the input and output sums of complete,
//! subsequential, finally connected and finally aperiodic transducers fed
//! with uniformly random input words.
//!
//! The five asymptotic constants (`e1`, `e2`, `v1`, `v2`, `c`) are computed
//! two independent ways:
//!
//! * algebraically, from the second-order Taylor jet of the characteristic
//!   determinant `det(I - (z/K) sum_eps x^eps M_eps(y))` at `(1, 1, 1)`
//!   (see [`moments`] and [`jet`]);
//! * combinatorially, from weighted sums over spanning functional digraphs
//!   of the final component (see [`combinatorics`]).
//!
//! Cycle certificates decide bounded variance, quasi-determinism and the
//! rank of the asymptotic variance-covariance matrix, and [`oracle`] supplies
//! exact finite-length moments for cross-checking.
//!
//! All arithmetic is exact over arbitrary-precision rationals.

pub mod builtins;
pub mod combinatorics;
pub mod corpus;
mod error;
pub mod exec;
pub mod jet;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{FinalComponent, StateId, Transducer, Transition};
pub use moments::{Classification, LimitLaw, Moments};
pub use rational::Rational;
