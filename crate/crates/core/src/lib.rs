//! Exact chain-level computations for Hochschild and cyclic complexes of
//! group algebras `ℂ[π]`, growth-filtered group cochains and the cyclic
//! cocycle pairing.

pub mod algebra;
pub mod analysis;
pub mod complexes;
pub mod error;
pub mod groups;
pub mod pairing;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};

/// Crate version, part of every cache key.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
