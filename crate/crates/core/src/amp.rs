//! Success probabilities and amplitude amplification of projector block
//! encodings.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lcu::BlockEncoding;
use crate::sim::{Circuit, Control, Gate, Statevector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmplificationPlan {
    pub p: f64,
    pub theta: f64,
    pub m: usize,
    pub queries: usize,
    pub amplified_p: f64,
}

/// `m = ⌊π/(4θ) − 1/2⌋` rounds with `θ = arcsin √p`, never negative.
pub fn plan(p: f64) -> Result<AmplificationPlan> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("success probability must lie in (0, 1], got {p}")));
    }
    let theta = p.sqrt().asin();
    let m = (PI / (4.0 * theta) - 0.5).floor().max(0.0) as usize;
    let amplified_p = ((2 * m + 1) as f64 * theta).sin().powi(2);
    Ok(AmplificationPlan { p, theta, m, queries: 2 * m + 1, amplified_p })
}

/// `‖block·|ψ⟩‖²` by simulation.
pub fn success_probability(be: &BlockEncoding, state: &Statevector<f64>) -> Result<f64> {
    Ok(be.apply(state)?.1)
}

/// `C(n, k)` in floating point.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weight of the `n_elec` sector in the uniform superposition over all
/// occupations.
pub fn uniform_overlap(n_so: usize, n_elec: usize) -> Result<f64> {
    if n_elec > n_so {
        return Err(invalid(format!("{n_elec} electrons do not fit {n_so} spin-orbitals")));
    }
    // Halve in steps to stay in range for large registers.
    let mut v = binomial(n_so as u64, n_elec as u64);
    for _ in 0..n_so {
        v *= 0.5;
    }
    Ok(v)
}

/// `A = block · (init ⊗ I)` followed by `m` Grover rounds
/// `−A·S₀·A†·S_good`, where `S_good` flips the sign of flag-all-zero states
/// and `S₀` that of the all-zero input.
pub fn build_aa_circuit(be: &BlockEncoding, init: &Circuit, m: usize) -> Result<Circuit> {
    if init.width() != be.n_system {
        return Err(Error::SizeMismatch { expected: be.n_system, found: init.width() });
    }
    let width = be.circuit.width();
    let mut a = Circuit::new(width);
    a.append(init)?;
    a.append(&be.circuit)?;
    let a_inv = a.inverse();
    let mut c = a.clone();
    let good: Vec<Control> = be.flags.iter().map(|&q| Control::off(q)).collect();
    let zero: Vec<Control> = (0..width).map(Control::off).collect();
    for _ in 0..m {
        c.push(Gate::global_phase(PI).with_controls(good.iter().copied()))?;
        c.append(&a_inv)?;
        c.push(Gate::global_phase(PI).with_controls(zero.iter().copied()))?;
        c.append(&a)?;
        c.push(Gate::global_phase(PI))?;
    }
    Ok(c)
}

/// Simulated success probability after `m` rounds, with the post-selected
/// system state.
pub fn simulate_aa(be: &BlockEncoding, init: &Circuit, m: usize) -> Result<(Statevector<f64>, f64)> {
    let c = build_aa_circuit(be, init, m)?;
    let mut s = Statevector::<f64>::zero(c.width());
    s.apply(&c)?;
    let (post, p) = s.postselect(&be.flags)?;
    Ok((post.truncate(be.n_system, 1e-9)?, p))
}
