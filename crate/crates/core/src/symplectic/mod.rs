//! Pauli strings, binary symplectic matrices and coset minimization.

pub mod bits;
mod coset;
mod matrix;
mod pauli;

pub use coset::{min_weight_coset_element, min_weight_coset_element_with_cap, DEFAULT_COSET_CAP};
pub use matrix::{rref, SymplecticMatrix, XorBasis};
pub use pauli::{Pauli, PauliString};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymplecticError {
    #[error("length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },
    #[error("composition produced an imaginary phase")]
    ImaginaryPhase,
    #[error("cannot parse Pauli string: {0}")]
    Parse(String),
    #[error("column order is not a permutation of 0..2n")]
    InvalidColumnOrder,
    #[error("coset has {free} free generators, above the cap of {cap}")]
    CosetTooLarge { free: usize, cap: usize },
}
