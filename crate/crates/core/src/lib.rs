//! Band-diagonal neutron-nucleus Hamiltonians in a harmonic-oscillator basis,
//! their qubit encodings, Pauli-term grouping with measurement circuits, and a
//! small VQE stack (statevector, shot sampling, density-matrix noise).
//!
//! Qubit 0 is always the leftmost printed character of a Pauli string or
//! bitstring and the most significant bit of a basis-state index.

pub mod ansatz;
pub mod circuit;
pub mod eigen;
pub mod encoding;
pub mod grouping;
pub mod hamiltonian;
pub mod pauli;
pub mod sim;
pub mod vqe;

mod error;

pub use error::{Error, Result};
