//! Entanglement generation between non-interacting subsystems through
//! repeated projective measurement of a mediating subsystem.
//!
//! A coupled system `H` on `A ⊗ B` with measurement state `|φ⟩` on `A`
//! induces the effective operator `V_B(τ) = ⟨φ|e^{−iτH}|φ⟩` on `B`. Its
//! powers drive the conditional state of `B`, and its dominant eigenvectors
//! predict where that state ends up.

pub mod entanglement;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod models;
pub mod protocol;
pub mod runner;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SpectralReport, C64};
