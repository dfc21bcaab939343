//! One-way quantum computation on d-level systems (d an odd prime).
//!
//! The crate provides exact generalized Pauli/Clifford algebra over `Z_d`,
//! a dense state-vector simulator used as the ground-truth oracle, symplectic
//! tableaux, constructive Clifford synthesis from `{C_X, F, S}`, valence-bond
//! cluster-state construction, teleportation gate gadgets, and a compiler
//! from `{U(c), C_Z}` circuits to adaptive one-qudit measurement patterns
//! with Pauli-frame tracking.
//!
//! Wire convention: wires are 0-indexed internally, and wire 0 is the most
//! significant base-`d` digit of a state-vector index. All randomized entry
//! points take explicit seeds; everything else is deterministic.

pub mod algebra;
pub mod circuit;
pub mod compiler;
pub mod error;
pub mod sim;
pub mod synthesis;
pub mod tableau;
pub mod teleport;
pub mod universality;
pub mod vbs;

pub use algebra::{Modulus, PauliWord};
pub use circuit::{GateAtom, GateCircuit, PhaseVec, Turn};
pub use error::{Error, Result};
pub use sim::StateVector;
pub use tableau::SymplecticTableau;

/// Global numeric tolerance for all dense-oracle comparisons.
pub const TOL: f64 = 1e-9;
