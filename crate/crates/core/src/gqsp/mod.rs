//! Generalized quantum signal processing: polynomials of a single unitary
//! with one signal qubit.

pub mod complement;
pub mod phases;
pub mod poly;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use complement::{complementary_poly, unitarity_error, PRESCALE};
pub use phases::{find_phases, reconstruct, rotation_matrix, PhaseSequence};
pub use poly::{projector_poly, ComplexPoly};

use crate::error::Result;
use crate::lcu::{exp_n_circuit, exp_sz_circuit, BlockEncoding};
use crate::quad;
use crate::sim::{Circuit, Control, Gate, Role};

/// Gates for `R̃(θ, φ, λ)` on `q`, in time order.
pub fn rotation_gates(theta: f64, phi: f64, lambda: f64, q: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    let diag = |a: f64, out: &mut Vec<Gate>| {
        if a != 0.0 {
            out.push(Gate::phase(q, -a));
            out.push(Gate::global_phase(a));
        }
    };
    diag(lambda, &mut out);
    out.push(Gate::z(q));
    if theta != 0.0 {
        out.push(Gate::ry(q, 2.0 * theta));
    }
    diag(phi, &mut out);
    out.into_iter().map(|g| g.with_role(Role::Processing)).collect()
}

/// Interleaves the rotations of `phases` with `d` copies of `controlled`,
/// which must act as `|0⟩⟨0|⊗U + |1⟩⟨1|⊗I` with `signal` as the control.
pub fn assemble_sequence(phases: &PhaseSequence, controlled: &Circuit, signal: usize) -> Result<Circuit> {
    let mut c = Circuit::new(controlled.width());
    for g in rotation_gates(phases.thetas[0], phases.phis[0], phases.lambda, signal) {
        c.push(g)?;
    }
    for k in 1..phases.thetas.len() {
        c.append(controlled)?;
        for g in rotation_gates(phases.thetas[k], phases.phis[k], 0.0, signal) {
            c.push(g)?;
        }
    }
    Ok(c)
}

/// One-ancilla block encoding of `Poly(U)`; the signal qubit sits right
/// after the system register.
pub fn assemble_gqsp(phases: &PhaseSequence, signal_unitary: &Circuit) -> Result<BlockEncoding> {
    let n = signal_unitary.width();
    let mut u = signal_unitary.clone();
    u.widen(n + 1);
    let cu = u.with_role(Role::Select).controlled(&[Control::off(n)])?;
    let mut circuit = assemble_sequence(phases, &cu, n)?;
    circuit.add_register("system", n)?;
    circuit.add_register("signal", 1)?;
    Ok(BlockEncoding { circuit, alpha: 1.0, n_system: n, flags: vec![n], approximate: false })
}

/// Phases of the prescaled uniform Fourier projector onto eigenvalue
/// `target`, for the signal `e^{−i2πÔ/N_φ}`.
pub fn projector_phases(target: f64, n_phi: usize) -> Result<PhaseSequence> {
    let p = projector_poly(target, n_phi)?.scale(Complex64::new(PRESCALE, 0.0));
    let q = complementary_poly(&p)?;
    find_phases(&p, &q)
}

/// Spin-projection projector as GQSP over `U = e^{−i2πŜz/N_φ}`.
pub fn build_pms_gqsp(n_so: usize, m_s: f64, n_phi: usize) -> Result<BlockEncoding> {
    let min = quad::min_nodes_sz(n_so, m_s)?;
    let u = exp_sz_circuit(2.0 * PI / n_phi.max(1) as f64, n_so, 0.0)?;
    let mut be = assemble_gqsp(&projector_phases(m_s, n_phi)?, &u)?;
    be.approximate = n_phi < min;
    Ok(be)
}

/// Particle-number projector as GQSP over `U = e^{−i2πN̂/N_φ}`.
pub fn build_pn_gqsp(n_so: usize, n_elec: usize, n_phi: usize) -> Result<BlockEncoding> {
    let min = quad::min_nodes_n(n_so, n_elec)?;
    let u = exp_n_circuit(2.0 * PI / n_phi.max(1) as f64, n_so, 0)?;
    let mut be = assemble_gqsp(&projector_phases(n_elec as f64, n_phi)?, &u)?;
    be.approximate = n_phi < min;
    Ok(be)
}
