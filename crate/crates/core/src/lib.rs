//! Upper-tail deviations for the largest particle of unitary-invariant
//! determinantal ensembles with a convex polynomial external field.
//!
//! The crate has two independent halves:
//!
//! * the asymptotic side ([`equilibrium`], [`tails`]) computes the equilibrium
//!   measure of the log-gas, its rate function and the closed-form tail
//!   approximation together with its moderate-deviation expansions;
//! * the exact side ([`oracle`]) builds orthonormal polynomials for the weight
//!   `exp(-N V)`, the Christoffel-Darboux kernel and finite-rank Fredholm
//!   determinants for the gap probability of the largest particle.
//!
//! [`cli`] ties both together into comparison tables.

// `!(x > y)` is used on purpose so NaN falls into the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod quadrature;
pub mod tails;

pub use equilibrium::{energy, DiscreteMeasure, Equilibrium, EquilibriumData, MrsOptions};
pub use error::{Error, Result};
pub use oracle::{gap_probability, hadamard_check, GapResult, OrthoBasis};
pub use potential::{Potential, PotentialSpec, ValidationReport};
pub use tails::{
    alpha, regime_classify, tw_tail_asymptotic, DeviationPoint, DeviationStatistics, Regime,
    TailModel, TailValue,
};
