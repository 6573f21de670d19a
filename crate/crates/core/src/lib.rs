//! The parity-perturbed Hofstadter sequence
//! Q~(n) = Q~(n - Q~(n-1)) + Q~(n - Q~(n-2)) + (-1)^n, Q~(1) = Q~(2) = 1,
//! its parity tracks, arch decomposition, interleave transducers, frequency
//! tables and amplitude analytics, with exact verification of the identities
//! relating them.

pub mod amplitude;
pub mod arches;
pub mod binomial;
pub mod cli;
pub mod compare;
pub mod error;
pub mod frequency;
pub mod pipeline;
pub mod report;
pub mod sequences;
pub mod words;

pub use error::{Error, Result};
