//! LCU block encodings: state preparation, SELECT, the exponential
//! building blocks and the symmetry-projector families.
//!
//! Layout of every block encoding: system qubits `0..n_system`, then the
//! ancilla registers. Success means all flag qubits read `|0⟩`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::qop::{Pauli, PauliSum};
use crate::quad::{self, HalfInt};
use crate::sim::{Circuit, Control, Gate, GateKind, Role, Statevector};

/// Circuit whose `|0⟩`-ancilla block equals `A/α`.
#[derive(Clone, Debug)]
pub struct BlockEncoding {
    pub circuit: Circuit,
    pub alpha: f64,
    pub n_system: usize,
    /// Qubits that must read `|0⟩` on success.
    pub flags: Vec<usize>,
    /// Built below the node count that makes the discretization exact.
    pub approximate: bool,
}

impl BlockEncoding {
    pub fn n_ancilla(&self) -> usize {
        self.circuit.width() - self.n_system
    }

    /// Runs the circuit on `state ⊗ |0…0⟩`, post-selects the flags and
    /// returns the normalized system state with the success probability.
    pub fn apply(&self, state: &Statevector<f64>) -> Result<(Statevector<f64>, f64)> {
        if state.n_qubits() != self.n_system {
            return Err(Error::SizeMismatch { expected: self.n_system, found: state.n_qubits() });
        }
        let mut s = state.extend(self.n_ancilla());
        s.apply(&self.circuit)?;
        let (post, p) = s.postselect(&self.flags)?;
        Ok((post.truncate(self.n_system, 1e-9)?, p))
    }

    /// Sequential product: `second · first`, each keeping its own ancillas.
    pub fn then(&self, second: &BlockEncoding) -> Result<BlockEncoding> {
        if self.n_system != second.n_system {
            return Err(Error::SizeMismatch { expected: self.n_system, found: second.n_system });
        }
        let n = self.n_system;
        let (a1, a2) = (self.n_ancilla(), second.n_ancilla());
        let mut c = Circuit::new(n + a1 + a2);
        c.add_register("system", n)?;
        c.add_register("ancilla-0", a1)?;
        c.add_register("ancilla-1", a2)?;
        c.append(&self.circuit)?;
        let map: Vec<usize> = (0..n).chain(n + a1..n + a1 + a2).collect();
        c.append_mapped(&second.circuit, &map)?;
        let flags = self.flags.iter().copied().chain(second.flags.iter().map(|&f| map[f])).collect();
        Ok(BlockEncoding {
            circuit: c,
            alpha: self.alpha * second.alpha,
            n_system: n,
            flags,
            approximate: self.approximate || second.approximate,
        })
    }
}

#[derive(Clone, Debug)]
pub struct LcuTerm {
    pub weight: Complex64,
    pub unitary: Circuit,
}

fn check_n_so(n_so: usize) -> Result<()> {
    if n_so == 0 || !n_so.is_multiple_of(2) {
        return Err(invalid(format!("number of spin-orbitals must be even and positive, got {n_so}")));
    }
    Ok(())
}

/// `e^{iφ(N_elec − N̂)}`.
pub fn exp_n_circuit(phi: f64, n_so: usize, n_elec: usize) -> Result<Circuit> {
    check_n_so(n_so)?;
    let mut c = Circuit::new(n_so);
    let g = phi * (n_elec as f64 - n_so as f64 / 2.0);
    if g != 0.0 {
        c.push_unchecked(Gate::global_phase(g));
    }
    for q in 0..n_so {
        c.push_unchecked(Gate::rz(q, -phi));
    }
    Ok(c)
}

/// `e^{iφ(M_S − Ŝz)}`.
pub fn exp_sz_circuit(phi: f64, n_so: usize, m_s: f64) -> Result<Circuit> {
    check_n_so(n_so)?;
    let mut c = Circuit::new(n_so);
    if phi * m_s != 0.0 {
        c.push_unchecked(Gate::global_phase(phi * m_s));
    }
    for q in 0..n_so {
        let a = if q % 2 == 0 { -phi / 2.0 } else { phi / 2.0 };
        c.push_unchecked(Gate::rz(q, a));
    }
    Ok(c)
}

/// `e^{-iβŜy}`, one two-qubit fragment per spatial orbital.
pub fn exp_sy_circuit(beta: f64, n_so: usize) -> Result<Circuit> {
    check_n_so(n_so)?;
    let mut c = Circuit::new(n_so);
    for p in 0..n_so / 2 {
        let (up, dn) = (2 * p, 2 * p + 1);
        let basis = |c: &mut Circuit, g: Gate| c.push_unchecked(g.conjugating());
        // Y_up X_dn part
        basis(&mut c, Gate::rx(up, FRAC_PI_2));
        basis(&mut c, Gate::h(dn));
        basis(&mut c, Gate::cnot(dn, up));
        c.push_unchecked(Gate::rz(up, -beta / 2.0));
        basis(&mut c, Gate::cnot(dn, up));
        basis(&mut c, Gate::rx(up, -FRAC_PI_2));
        basis(&mut c, Gate::h(dn));
        // X_up Y_dn part
        basis(&mut c, Gate::h(up));
        basis(&mut c, Gate::rx(dn, FRAC_PI_2));
        basis(&mut c, Gate::cnot(dn, up));
        c.push_unchecked(Gate::rz(up, beta / 2.0));
        basis(&mut c, Gate::cnot(dn, up));
        basis(&mut c, Gate::h(up));
        basis(&mut c, Gate::rx(dn, -FRAC_PI_2));
    }
    Ok(c)
}

/// `R(α, β, γ) = e^{-iαŜz} e^{-iβŜy} e^{-iγŜz}`.
pub fn rotation_circuit(alpha: f64, beta: f64, gamma: f64, n_so: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n_so);
    if gamma != 0.0 {
        c.append(&exp_sz_circuit(gamma, n_so, 0.0)?)?;
    }
    if beta != 0.0 {
        c.append(&exp_sy_circuit(beta, n_so)?)?;
    }
    if alpha != 0.0 {
        c.append(&exp_sz_circuit(alpha, n_so, 0.0)?)?;
    }
    Ok(c)
}

/// Index qubits needed for `l` terms.
pub fn index_qubits(l: usize) -> usize {
    if l <= 1 {
        0
    } else {
        (usize::BITS - (l - 1).leading_zeros()) as usize
    }
}

/// Uniformly controlled `RY` on `target`: angle `angles[v]` where `v` packs
/// the control bits (`controls[i]` is bit `i`). CNOT/RY recursion, no
/// multi-controlled gates.
fn ucry(c: &mut Circuit, target: usize, controls: &[usize], angles: &[f64]) {
    if angles.iter().all(|a| (a - angles[0]).abs() < 1e-15) {
        if angles[0] != 0.0 {
            c.push_unchecked(Gate::ry(target, angles[0]).with_role(Role::Prep));
        }
        return;
    }
    let (&last, rest) = controls.split_last().expect("distinct angles need a control");
    let half = angles.len() / 2;
    let (a, b) = angles.split_at(half);
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) / 2.0).collect();
    let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect();
    c.push_unchecked(Gate::cnot(last, target).with_role(Role::Prep));
    ucry(c, target, rest, &diff);
    c.push_unchecked(Gate::cnot(last, target).with_role(Role::Prep));
    ucry(c, target, rest, &sum);
}

/// Maps `|0…0⟩` to `Σ_k √(w_k/Σw)|k⟩` on `⌈log₂ L⌉` qubits.
pub fn prep_binary_tree(weights: &[f64]) -> Result<Circuit> {
    if weights.is_empty() {
        return Err(invalid("PREP needs at least one weight"));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(invalid("PREP weights must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(invalid("PREP weights are all zero"));
    }
    let a = index_qubits(weights.len());
    let mut c = Circuit::new(a);
    let uniform = weights.iter().all(|w| (w - weights[0]).abs() <= 1e-15 * total);
    if uniform && weights.len() == 1 << a {
        for q in 0..a {
            c.push_unchecked(Gate::h(q).with_role(Role::Prep));
        }
        return Ok(c);
    }
    let mut w = weights.to_vec();
    w.resize(1 << a, 0.0);
    for level in 0..a {
        let q = a - 1 - level;
        let block = 1usize << (q + 1);
        let angles: Vec<f64> = w
            .chunks(block)
            .map(|chunk| {
                let tot: f64 = chunk.iter().sum();
                let low: f64 = chunk[..block / 2].iter().sum();
                if tot <= 0.0 {
                    0.0
                } else {
                    2.0 * (low / tot).clamp(0.0, 1.0).sqrt().acos()
                }
            })
            .collect();
        let controls: Vec<usize> = (q + 1..a).collect();
        ucry(&mut c, q, &controls, &angles);
    }
    Ok(c)
}

/// `|k⟩|ψ⟩ → |k⟩ e^{i arg w_k} U_k|ψ⟩` on `n_system + n_index` qubits, with
/// `extra` controls (e.g. a signal qubit) prepended to every branch.
pub fn build_select_on(terms: &[LcuTerm], n_system: usize, n_index: usize, extra: &[Control], width: usize) -> Result<Circuit> {
    if terms.len() > 1usize << n_index {
        return Err(Error::IndexOverflow { terms: terms.len(), capacity: 1 << n_index });
    }
    let mut c = Circuit::new(width);
    for (k, term) in terms.iter().enumerate() {
        if term.unitary.width() != n_system {
            return Err(Error::SizeMismatch { expected: n_system, found: term.unitary.width() });
        }
        let mut ctl: Vec<Control> = extra.to_vec();
        for j in (0..n_index).rev() {
            ctl.push(Control { qubit: n_system + j, on: (k >> j) & 1 == 1 });
        }
        let phase = term.weight.arg();
        if phase.abs() > 1e-15 {
            c.push(Gate::global_phase(phase).with_controls(ctl.iter().copied()).with_role(Role::Select))?;
        }
        for g in term.unitary.gates() {
            let mut g = g.clone().with_role(Role::Select);
            if !g.conjugating {
                g.controls.extend_from_slice(&ctl);
            }
            c.push(g)?;
        }
    }
    Ok(c)
}

pub fn build_select(terms: &[LcuTerm], n_system: usize) -> Result<Circuit> {
    let a = index_qubits(terms.len());
    build_select_on(terms, n_system, a, &[], n_system + a)
}

/// A linear combination `Σ_k w_k U_k` on `n_system` qubits.
#[derive(Clone, Debug)]
pub struct Lcu {
    pub terms: Vec<LcuTerm>,
    pub n_system: usize,
}

impl Lcu {
    pub fn new(terms: Vec<LcuTerm>, n_system: usize) -> Result<Self> {
        if terms.is_empty() {
            return Err(invalid("LCU needs at least one term"));
        }
        Ok(Self { terms, n_system })
    }

    pub fn n_index(&self) -> usize {
        index_qubits(self.terms.len())
    }

    pub fn alpha(&self) -> f64 {
        self.terms.iter().map(|t| t.weight.norm()).sum()
    }

    pub fn prep(&self) -> Result<Circuit> {
        prep_binary_tree(&self.terms.iter().map(|t| t.weight.norm()).collect::<Vec<_>>())
    }

    /// PREP · SELECT · PREP† as a block encoding.
    pub fn block_encoding(&self, approximate: bool) -> Result<BlockEncoding> {
        let (n, a) = (self.n_system, self.n_index());
        let mut c = Circuit::new(n + a);
        c.add_register("system", n)?;
        let idx = c.add_register("index", a)?;
        let map: Vec<usize> = idx.clone().collect();
        let prep = self.prep()?;
        c.append_mapped(&prep, &map)?;
        c.append(&build_select_on(&self.terms, n, a, &[], n + a)?)?;
        c.append_mapped(&prep.inverse(), &map)?;
        Ok(BlockEncoding { circuit: c, alpha: self.alpha(), n_system: n, flags: idx.collect(), approximate })
    }
}

/// Pauli-string LCU of a Hermitian sum; negative coefficients become a π
/// phase on the branch.
pub fn pauli_lcu(op: &PauliSum) -> Result<Lcu> {
    if !op.is_hermitian(1e-12) {
        return Err(invalid("operator has complex coefficients"));
    }
    let n = op.n_qubits();
    let mut terms = Vec::with_capacity(op.len());
    for (c, p) in op.terms() {
        let mut u = Circuit::new(n);
        for (q, axis) in p.ops() {
            let kind = match axis {
                Pauli::X => GateKind::X,
                Pauli::Y => GateKind::Y,
                Pauli::Z => GateKind::Z,
            };
            u.push(Gate::new(kind, q))?;
        }
        terms.push(LcuTerm { weight: Complex64::new(c.re, 0.0), unitary: u });
    }
    Lcu::new(terms, n)
}

fn fourier_terms(n_phi: usize, mut unitary: impl FnMut(f64) -> Result<Circuit>) -> Result<Vec<LcuTerm>> {
    let grid = quad::FourierGrid::new(n_phi)?;
    grid.nodes
        .iter()
        .map(|&phi| Ok(LcuTerm { weight: Complex64::new(1.0 / n_phi as f64, 0.0), unitary: unitary(phi)? }))
        .collect()
}

/// Particle-number projector from the uniform Fourier sum.
pub fn build_pn_lcu(n_so: usize, n_elec: usize, n_phi: usize) -> Result<BlockEncoding> {
    let min = quad::min_nodes_n(n_so, n_elec)?;
    let terms = fourier_terms(n_phi, |phi| exp_n_circuit(phi, n_so, n_elec))?;
    Lcu::new(terms, n_so)?.block_encoding(n_phi < min)
}

/// Spin-projection projector from the uniform Fourier sum.
pub fn build_pms_lcu(n_so: usize, m_s: f64, n_phi: usize) -> Result<BlockEncoding> {
    let min = quad::min_nodes_sz(n_so, m_s)?;
    let terms = fourier_terms(n_phi, |phi| exp_sz_circuit(phi, n_so, m_s))?;
    Lcu::new(terms, n_so)?.block_encoding(n_phi < min)
}

/// β-integral of the total-spin projector. Valid on inputs that already
/// have `Ŝz = m_s`; see [`build_psms_composite`] otherwise.
pub fn build_ps_lcu(n_so: usize, s: f64, m_s: f64, n_beta: usize) -> Result<BlockEncoding> {
    check_n_so(n_so)?;
    let (sh, mh) = (HalfInt::from_f64(s)?, HalfInt::from_f64(m_s)?);
    let (betas, ws) = quad::su2_beta_weights(sh, mh, n_beta)?;
    let terms = betas
        .iter()
        .zip(&ws)
        .map(|(&b, &w)| Ok(LcuTerm { weight: Complex64::new(w, 0.0), unitary: exp_sy_circuit(b, n_so)? }))
        .collect::<Result<Vec<_>>>()?;
    let approximate = (n_beta as f64) < s + 1.0;
    Lcu::new(terms, n_so)?.block_encoding(approximate)
}

/// `P̂_{M_S} · P̂_S · P̂_{M_S}`, each factor with its own ancillas.
pub fn build_psms_composite(n_so: usize, s: f64, m_s: f64, n_beta: usize, n_phi: usize) -> Result<BlockEncoding> {
    let pm = build_pms_lcu(n_so, m_s, n_phi)?;
    let ps = build_ps_lcu(n_so, s, m_s, n_beta)?;
    pm.then(&ps)?.then(&pm)
}

/// One LCU over the full Euler-angle grid.
pub fn build_psms_lcu_full(n_so: usize, s: f64, m_s: f64, n_alpha: usize, n_beta: usize, n_gamma: usize) -> Result<BlockEncoding> {
    check_n_so(n_so)?;
    let grid = quad::su2_weights(s, m_s, n_alpha, n_beta, n_gamma)?;
    let mut terms = Vec::with_capacity(grid.weights.len());
    for b in 0..n_beta {
        for a in 0..n_alpha {
            for g in 0..n_gamma {
                let w = grid.weights[grid.index(b, a, g)];
                terms.push(LcuTerm { weight: w, unitary: rotation_circuit(grid.alphas[a], grid.betas[b], grid.gammas[g], n_so)? });
            }
        }
    }
    let min = quad::min_nodes_sz(n_so, m_s)?;
    let approximate = n_alpha < min || n_gamma < min || (n_beta as f64) < s + 1.0;
    Lcu::new(terms, n_so)?.block_encoding(approximate)
}
