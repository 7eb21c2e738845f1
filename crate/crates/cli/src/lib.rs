//! Command-line front end: argument parsing into a [`RunConfig`] and execution
//! of the requested model action.

// NaN must fall into the rejecting branch of every domain check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;

pub use config::{parse_config, Action, Model, RunConfig};
pub use run::{execute, run, CliError, RunReport};
