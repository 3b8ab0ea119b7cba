//! Statistical-mechanics analysis of random joint source-channel codes.
//!
//! The crate computes entropy functions and their Legendre transforms,
//! classifies the phase of the posterior (ordered, paramagnetic, glassy),
//! evaluates the asymptotic mutual-information rate, and cross-checks it
//! against exhaustive enumeration over concrete random codebooks.

pub mod apps;
pub mod ensemble;
pub mod error;
pub mod info;
pub mod oracle;
pub mod phase;
pub mod spec_file;
pub mod thermo;

pub use error::{Endpoint, Error, Result};
