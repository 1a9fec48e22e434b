//! Exact symbolic certificates on polynomial rings over the rationals.
//!
//! The crate provides sparse multivariate polynomial arithmetic with
//! optional degree truncation, derivations with bounded nilpotency and
//! local-finiteness certificates, integer gradings with weight-polytope
//! analysis, Jordan decomposition of locally finite derivations, polynomial
//! endomorphisms built by exponentiating derivations, and ladder-style
//! certificates that specific composed automorphisms are not algebraic.
//! Everything is computed over arbitrary-precision rationals; no floating
//! point enters any verdict.

pub mod error;
pub mod poly;
pub mod parse;
pub mod linalg;
pub mod derivation;
pub mod grading;
pub mod jordan;
pub mod endo;
pub mod certify;
pub mod scenario;
