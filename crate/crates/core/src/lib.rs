//! Exact eigenvalues and eigenfunctions of N-body quantum systems with
//! quadratic pair potentials, with built-in brute-force verification.

pub mod error;
pub mod jacobi;
pub mod oracle;
pub mod scalar;
pub mod spectrum;
pub mod sympoly;
pub mod system;
pub mod verify;
pub mod wavefn;

pub use error::{Error, Result};
pub use spectrum::{ShellStructure, SpectrumLine};
pub use system::{Configuration, Permutation, Statistics, SystemParams};
pub use wavefn::{LogValue, WavefunctionDescriptor};
