//! Pauli-string Hamiltonians, Trotter orderings and their errors.

pub mod dense;
pub mod error_op;
pub mod graph;
pub mod hamiltonian;
pub mod ordering;
pub mod pauli;
pub mod sim;
