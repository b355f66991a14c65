//! Linearization of nonlinear autonomous ODEs by lifting to linear systems.
//!
//! Two lifts are provided:
//!
//! * a Koopman spectral lift ([`koopman`]): the Koopman generator is
//!   discretized with Chebyshev differentiation matrices on a
//!   Gauss–Lobatto tensor grid centered at the initial state, and an
//!   observable is read off the middle entry of `exp(K t) vec(g(grid))`;
//! * a truncated Carleman lift ([`carleman`]) on tensor powers of the state.
//!
//! [`experiments`] reproduces order sweeps, radius sweeps and method
//! comparisons on the benchmark systems in [`models`].

pub mod carleman;
pub mod chebdiff;
pub mod error;
pub mod evolve;
pub mod experiments;
pub mod grid;
pub mod koopman;
pub mod linalg;
pub mod models;
pub mod par;
pub mod reference;

pub use error::{Error, Result};
