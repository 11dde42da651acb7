//! Formats and command-line front end for `rtn-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod formats;
pub mod grid;
pub mod output;

pub use commands::{run, Report, RunError};
