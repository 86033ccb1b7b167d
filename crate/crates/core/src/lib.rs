//! Active-space DUCC downfolding and a simulated variational quantum
//! eigensolver.
//!
//! The pipeline runs integrals -> second-quantized Hamiltonian ->
//! (optionally) downfolded effective Hamiltonian -> Jordan-Wigner qubit
//! operator -> Trotterized UCCSD circuit -> state-vector VQE, with exact
//! diagonalization available at every stage as a cross-check.

pub mod amplitudes;
pub mod ansatz;
pub mod cobyla;
pub mod ducc;
pub mod error;
pub mod fermion;
pub mod integrals;
pub mod mapping;
pub mod simulator;
pub mod vqe;

pub use error::{Error, Result};
