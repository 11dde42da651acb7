//! Anticoncentration and design diagnostics of random tensor network
//! states.
//!
//! Three independent routes to the same numbers:
//!
//! * [`closed_form`] evaluates exact expressions for Haar, random MPS and
//!   random product state moments;
//! * [`contraction`] replaces every Haar unitary by its replica average
//!   and contracts the resulting network over `S_k` exactly;
//! * [`sampler`] draws states and estimates the same moments by Monte
//!   Carlo.
//!
//! [`distributions`] holds the reference laws for the overlap variable and
//! [`replica_algebra`] the symmetric-group combinatorics underneath.
//!
//! The crate is `no_std` with `alloc` when built without the default `std`
//! feature. The `parallel` feature spreads Monte Carlo samples over rayon.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod closed_form;
pub mod contraction;
pub mod distributions;
mod error;
pub mod layout;
mod network;
pub mod replica_algebra;
pub mod sampler;
pub mod special;

pub use error::{Error, Result};
