//! Spectral laboratory: eigensolvers, self-energy, and the perturbation bound checkers.

mod bounds;
mod eigen;
mod lanczos;
mod system;
mod verify;

pub use bounds::{
    check_lemma3, check_theorem4, check_theorem5, disk_samples, evaluate_self_energy, sup_self_energy_error,
    BoundCheck, SelfEnergyEval,
};
pub use eigen::{
    dense_eigenvalues, eigensolve, hermitian_eigenvalues, hermitian_eigh, sectored_lowest, EigenMode,
    EigenRequest, Spectrum,
};
pub use lanczos::{lanczos, LanczosOptions};
pub use system::{hamiltonian_distance, operator_distance, SplitSystem};
pub use verify::{verify_gadget, VerifyOptions};
