//! Clifford spectra of tuples of Hermitian matrices via the spectral localizer.
//!
//! For Hermitian `A_1, …, A_d` and a representation `γ_1, …, γ_d` of the
//! Clifford relations, the localizer at `λ ∈ R^d` is
//! `L_λ = Σ_j (A_j - λ_j I) ⊗ γ_j`. Its smallest |eigenvalue| (the gap)
//! vanishes exactly on the Clifford spectrum, and half its signature is a
//! locally constant integer index away from it.

pub mod clifford;
pub mod config;
pub mod error;
pub mod linalg;
pub mod localizer;
pub mod models;
pub mod sampling;
pub mod spectrum;
pub mod tuple;
pub mod verify;

pub use clifford::{build_rep, gamma5_explicit, pauli_rep, rotate_rep, CliffordRep};
pub use error::{Error, Result};
pub use linalg::{c64, CsrMatrix};
pub use localizer::{Localizer, LocalizerConfig, LocalizerReport};
pub use tuple::{HermitianTuple, ProbePoint};
