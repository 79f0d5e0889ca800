//! Construction and numerical certification of spectra for infinite
//! convolutions generated by finitely many Hadamard triples on the line.
//!
//! The crate is organised bottom-up:
//!
//! - [`triples`]: validation and algebra of Hadamard triples.
//! - [`convolution`]: exact finite-level measures, mask products and tails.
//! - [`zeros`]: zero sets of masks and probes of integral periodic zeros.
//! - [`equipos`]: grid certificates of equi-positivity for tail families.
//! - [`spectrum`]: the level-by-level spectrum construction.
//! - [`verify`]: Gram and completeness-function checks.
//! - [`cli`]: command-line front end and presets.

pub mod cli;
pub mod convolution;
pub mod equipos;
pub mod error;
pub mod numfmt;
pub mod spectrum;
pub mod triples;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
