//! Numerical core for the distribution of the positive sojourn time
//! `A_t = ∫_0^t 1{X_s > 0} ds` of a Lévy process.
//!
//! Four independent routes to the law of `A_t` live here:
//!
//! * path Monte Carlo ([`occupation`]),
//! * the Poisson point process representation of `A` at an independent
//!   exponential time ([`poisson_rep`]),
//! * the set-partition moment formula and Bell-polynomial persistence
//!   probabilities ([`moments`]),
//! * the double Laplace transform and its numerical inversion ([`laplace`]),
//!   including the closed-form law for the (1/2)-stable subordinator with
//!   negative drift ([`halfstable`]).
//!
//! The crate is `no_std` and only needs `alloc`. Threading, file formats and
//! the command line live in the `sojourn` crate; batch samplers here are
//! generic over an [`exec::Executor`] so that crate can plug in a parallel
//! one without changing any sample.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod exec;
pub mod halfstable;
pub mod laplace;
pub mod laws;
pub mod models;
pub mod moments;
pub mod occupation;
pub mod partitions;
pub mod poisson_rep;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use models::{ModelPositivity, Positivity, ProcessModel};
pub use rng::RandomStream;
pub use stats::{EcdfTable, KsReport};
