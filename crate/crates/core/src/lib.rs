//! Lowering of quantum circuits and k-local Hamiltonians to 2-local lattice
//! Hamiltonians through perturbative gadgets, with numerical certification.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod adiabatic;
pub mod clock;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod lattice;
pub mod pauli;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Hamiltonian = pauli::Hamiltonian<f64>;
pub type PauliTerm = pauli::PauliTerm<f64>;
pub type Spectrum = spectral::Spectrum<f64>;
pub type InteractionGraph = graph::InteractionGraph<f64>;
pub type GadgetApplication = gadget::GadgetApplication<f64>;
pub type ReductionPlan = gadget::ReductionPlan<f64>;
pub type CircuitIR = clock::CircuitIR<f64>;
pub type ClockLayout = clock::ClockLayout<f64>;
pub type PolyPath = adiabatic::PolyPath<f64>;
