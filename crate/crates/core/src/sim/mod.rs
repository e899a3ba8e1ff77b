//! Circuit representation, statevector simulation, angle rounding and
//! lowering to a Clifford+T+rotation gate set.

mod circuit;
mod gate;
pub mod lower;
mod quantize;
mod state;

pub use circuit::{Circuit, Register};
pub use gate::{clifford_t_count, is_clifford_t_angle, wrap_angle, Control, Gate, GateKind, Role};
pub use quantize::{quantize_angle, quantize_angles};
pub use state::Statevector;

use crate::error::Result;
use crate::scalar::Scalar;

/// Applies `circuit` to a copy of `state`.
pub fn apply<T: Scalar>(circuit: &Circuit, state: &Statevector<T>) -> Result<Statevector<T>> {
    let mut s = state.clone();
    s.apply(circuit)?;
    Ok(s)
}
