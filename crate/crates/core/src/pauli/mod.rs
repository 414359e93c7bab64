//! Pauli strings and real-weighted Pauli sums.

mod dense;
mod hamiltonian;
mod json;
mod string;

pub use dense::{NormMode, DEFAULT_DENSE_CAP};
pub use hamiltonian::{square_half_difference, Hamiltonian, PauliTerm};
pub use string::{Axis, PauliString, Phase};
