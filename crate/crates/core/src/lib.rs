//! Symmetry projectors for fermionic qubit registers.
//!
//! Builds particle-number, spin-projection and total-spin projectors as
//! LCU, GQSP and GQSVT circuits, simulates them on dense statevectors and
//! estimates their fault-tolerant cost.
//!
//! Basis order is little-endian throughout: qubit `q` is bit `q` of a basis
//! index.

pub mod amp;
pub mod cost;
pub mod error;
pub mod gqsp;
pub mod gqsvt;
pub mod lcu;
pub mod oracle;
pub mod qop;
pub mod quad;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use lcu::BlockEncoding;
pub use qop::{Pauli, PauliString, PauliSum, Symmetry};
pub use scalar::Scalar;
pub use sim::{Circuit, Gate, GateKind, Statevector};

/// Double-precision statevector, the default for verification work.
pub type State = Statevector<f64>;
/// Single-precision statevector for memory-bound sweeps.
pub type State32 = Statevector<f32>;
