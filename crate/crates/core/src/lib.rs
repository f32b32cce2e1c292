//! Exact information-theoretic tools for studying word order: placement of
//! a target among its context, dependency-length costs, the conflict
//! between the two, the ring of S/V/O permutations, entropy-rate
//! diagnostics of token sequences and optimal code lengths.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coding;
pub mod conflict;
pub mod deplen;
pub mod distributions;
pub mod error;
pub mod infotheory;
pub mod rate;
pub mod ring;
pub mod rng;
pub mod transducer;

pub use error::{Error, Result};
