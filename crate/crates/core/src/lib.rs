//! Security-bound calculator for a round-robin differential phase shift QKD
//! scheme on d-dimensional qudits.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: dense complex linear algebra, eigendecomposition, entropies
//! - [`protocol`]: pulse-train states, sender/receiver POVMs, symmetrization
//! - [`attack`]: the noise-constrained ancilla-coupling family of the
//!   eavesdropper and everything derived from it (spectra, purification,
//!   conditional ancilla states, the receiver-side isometry)
//! - [`bounds`]: closed-form leakage measures, saturation points, key-rate
//!   and privacy-amplification arithmetic, prior-work comparison curves
//! - [`oracle`]: independent brute-force verification of every closed form
//!   (grid optimization, hashing identity, Holevo test, Monte-Carlo rounds)
//! - [`sweep`]: CSV-oriented parameter sweeps used by the CLI
//!
//! All logarithms and entropies are base 2; leakages are bits per round.

pub mod attack;
pub mod bounds;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod protocol;
pub mod sweep;

pub use error::{Error, Result};
pub use numerics::{CMatrix, CVector, Complex64, DensityOperator, HermitianEigensystem, Tolerances};
