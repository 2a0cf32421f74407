//! Private set operations over digitized genomes.
//!
//! This crate implements the building blocks for privacy-preserving genetic
//! tests between two parties: prime-order group and RSA arithmetic with
//! hash-to-group maps ([`groups`]), the PSI / PSI-CA / APSI protocol state
//! machines ([`suite`]), private equality testing over homomorphic
//! ciphertext vectors ([`pet`]), genome representation and synthesis
//! ([`genome`]), restriction-digest emulation ([`rflp`]), the end-to-end
//! tests built from those pieces ([`apps`]), and the binary wire framing
//! shared with the network runners ([`wire`]).
//!
//! Batch group operations run data-parallel via rayon when the `parallel`
//! feature (default) is enabled; disabling it falls back to sequential
//! loops with identical results.

pub mod apps;
pub mod error;
pub mod genome;
pub mod groups;
pub mod par;
pub mod pet;
pub mod rflp;
pub mod suite;
pub mod wire;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
