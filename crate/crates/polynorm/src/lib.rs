//! Norm machinery for complex homogeneous polynomials in many variables.
//!
//! The crate provides:
//!
//! * [`polycore`]: sparse multi-index polynomials, coefficient norms
//!   (plain `|P|_r`, Bombieri `[P]_r`, symmetric-form `|T|_r`) and a text format;
//! * [`supnorm`]: certified two-sided estimation of the sup-norm of `P`
//!   on the unit ball of `ℓ_p^n`, with exact formulas for special families;
//! * [`construct`]: extremal witness families: spread polynomials, all-ones
//!   polynomials, random unimodular polynomials and Steiner polynomials over
//!   greedily built partial Steiner systems;
//! * [`constants`]: region classification and growth-exponent prediction for
//!   the equivalence constants `A_{p,r}^m(n)` and `B_{r,p}^m(n)`, certified and
//!   empirical estimation, parameter sweeps and log-log exponent fitting;
//! * [`uncond`]: mixed `(p,q)`-unconditionality of the monomial basis:
//!   sign-flip ratio estimation, region predictions, a `χ ≤ B·A` bridge bound,
//!   and a Monte Carlo check of the `L¹(T^n)` coefficient inequality;
//! * [`vonneumann`]: commuting operator tuples, the `(Ip)`/`(IIp)`
//!   normalizations and empirical polynomial von Neumann ratio experiments.
//!
//! Everything is deterministic for a fixed seed: parallel reductions are
//! order-independent, so results do not depend on the number of worker threads.

pub mod constants;
pub mod construct;
mod error;
pub mod polycore;
pub mod supnorm;
#[cfg(test)]
pub(crate) mod testutil;
pub mod uncond;
pub(crate) mod util;
pub mod vonneumann;

pub use error::{Error, Result};

/// Default cap on the number of monomials a single construction may
/// materialize. Override per call with the `*_capped` variants, or through
/// `POLYNORM_CAP` in the CLI.
pub const DEFAULT_CAP: u64 = 10_000_000;
