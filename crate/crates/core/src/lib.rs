//! Complex-valued normal (Forney) factor graphs whose marginals are
//! quantum-mechanical probabilities.
//!
//! The crate is organized bottom-up:
//!
//! - [`tensor`]: dense complex tensors over finite alphabets, contraction and
//!   the matrix predicates (unitary, Hermitian, PSD) everything else relies on.
//! - [`graph`]: factor graphs with variables as edges, closing-the-box
//!   contraction, and a brute-force enumeration oracle.
//! - [`gates`]: equality constraints, mod-M adders, Pauli matrices, Hadamard,
//!   CNOT and friends.
//! - [`quantum`]: quantum timelines (initial state, unitaries, measurements)
//!   compiled into conjugate-pair factor graphs, density matrices, Kraus
//!   channels and partial traces.
//! - [`qec`]: repetition-code and Shor-code effective channels and recovery.
//! - [`montecarlo`]: Monte Carlo estimation of complex partition sums.
//!
//! # Index conventions
//!
//! A matrix whose rows and columns are indexed by tuples of variables is
//! flattened with the row group before the column group, and within a group
//! the earlier-listed variable is the most significant digit. For example
//! `kron(A, B)` has rows indexed by `(row_a, row_b)` with `row_a` major.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod gates;
pub mod graph;
pub mod linalg;
pub mod montecarlo;
pub mod qec;
pub mod quantum;
pub mod random;
pub mod tensor;

pub use error::{Error, Result};
pub use graph::{BoxRegion, FactorGraph, FactorId, VariableId};
pub use tensor::{ComplexTensor, Tolerance};

/// Double-precision complex number used throughout.
pub type C64 = num_complex::Complex64;

pub(crate) fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
