//! Decoherence of a system coupled to a squeezed thermal bath through a
//! quantum non-demolition interaction: bath kernels, reduced dynamics,
//! phase-space pictures and independent numerical oracles.

// `!(x > 0.0)` is used throughout so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod bloch;
pub mod composite;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod oracle;
pub mod phase_space;
pub mod qnd;
pub mod quadrature;
pub mod scenario;
pub mod spin_bath;
pub mod verify;

pub use error::{Error, Result};
