//! Perturbative back-action and correlation terms of quantum electro-optic
//! sampling, with a truncated Fock-space cross-check.
//!
//! All internal frequencies are angular frequencies in rad/ps and all lengths
//! are in µm. Linear frequencies at the API boundary are in THz.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod checks;
pub mod error;
pub mod fock;
pub mod kernels;
pub mod math;
pub mod mir;
pub mod params;
pub mod quad;
pub mod single_channel;
pub mod two_channel;

pub use error::{Error, Result};
pub use num_complex::Complex64;
