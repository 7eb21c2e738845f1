//! Closed-form solutions of three Bogomolny-type Cauchy problems together with
//! the numerical machinery that checks them independently:
//!
//! * [`oscillator`]: dual first-order system of the harmonic oscillator,
//! * [`heisenberg`]: Cauchy-Riemann fields of the Heisenberg model from boundary data,
//! * [`skyrme`]: Lambert-W radial profile of the restricted baby Skyrme model.
//!
//! [`oracle`] holds the integrators, finite differences and residual reports,
//! [`special`] the Lambert function, and [`export`] the CSV writers.

// NaN must fall into the rejecting branch of every domain check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod heisenberg;
pub mod oracle;
pub mod oscillator;
pub mod skyrme;
pub mod special;

pub use error::{Error, Result};
pub use oracle::ResidualReport;
