//! Lagrange projector polynomials realized by GQSP over a qubitized LCU
//! walk.
//!
//! With a Hermitian `V_A` (Pauli LCU, real weights), the walk
//! `Q_A = (2|0⟩⟨0| − I)·V_A` satisfies `⟨0|Q_A^k|0⟩ = T_k(A/α)` on the index
//! register. A GQSP sequence of `F(z) = Σ f_k z^k` over controlled-`Q_A`
//! therefore has block `Σ f_k T_k(A/α)`; taking `f_k` as the Chebyshev
//! coefficients of `x ↦ P(αx)` gives `P(A)` with `d` walk calls.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::gqsp::{assemble_sequence, complementary_poly, find_phases, ComplexPoly, PhaseSequence, PRESCALE};
use crate::lcu::{build_select_on, pauli_lcu, BlockEncoding, Lcu};
use crate::qop::{PauliSum, Symmetry};
use crate::sim::{Circuit, Control, Gate, Role};

/// `Π_{j≠i}(x − o_j)/(o_i − o_j)` over a discrete spectrum.
#[derive(Clone, Debug)]
pub struct LagrangePoly {
    /// Monomial coefficients in the eigenvalue variable, lowest first.
    pub coeffs: Vec<f64>,
    pub spectrum: Vec<f64>,
    pub target: f64,
    /// Block normalization: the circuit realizes `rescale · P(A)`.
    pub rescale: f64,
}

impl LagrangePoly {
    pub fn degree(&self) -> usize {
        self.spectrum.len() - 1
    }

    /// Product-form evaluation, stable where the monomial form is not.
    pub fn eval(&self, x: f64) -> f64 {
        self.spectrum.iter().filter(|&&o| o != self.target).map(|&o| (x - o) / (self.target - o)).product()
    }
}

pub fn lagrange_coeffs(spectrum: &[f64], target: f64) -> Result<LagrangePoly> {
    let mut spec = spectrum.to_vec();
    spec.sort_by(|a, b| a.total_cmp(b));
    if spec.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-12) {
        return Err(invalid("spectrum has duplicate points"));
    }
    let Some(&t) = spec.iter().find(|&&o| (o - target).abs() < 1e-9) else {
        return Err(Error::NoEigenvalue(target));
    };
    let mut coeffs = vec![1.0];
    for &o in spec.iter().filter(|&&o| o != t) {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c / (t - o);
            next[k] -= c * o / (t - o);
        }
        coeffs = next;
    }
    Ok(LagrangePoly { coeffs, spectrum: spec, target: t, rescale: 1.0 })
}

/// Chebyshev coefficients of `x ↦ P(αx)` as a polynomial in `z`, so that
/// `Re F(e^{iθ}) = P(α cos θ)`.
pub fn chebyshev_map(poly: &LagrangePoly, alpha: f64) -> Result<ComplexPoly> {
    if !(alpha > 0.0) {
        return Err(invalid(format!("block-encoding normalization must be positive, got {alpha}")));
    }
    let d = poly.degree();
    if d > 512 {
        return Err(invalid(format!("degree {d} exceeds the supported 512")));
    }
    // Discrete Chebyshev transform on d+1 Gauss–Chebyshev nodes is exact
    // for degree ≤ d.
    let m = d + 1;
    let nodes: Vec<f64> = (0..m).map(|j| PI * (j as f64 + 0.5) / m as f64).collect();
    let vals: Vec<f64> = nodes.iter().map(|t| poly.eval(alpha * t.cos())).collect();
    let coeffs = (0..=d)
        .map(|k| {
            let s: f64 = nodes.iter().zip(&vals).map(|(t, v)| v * (k as f64 * t).cos()).sum();
            let f = if k == 0 { 1.0 } else { 2.0 };
            Complex64::new(f * s / m as f64, 0.0)
        })
        .collect();
    Ok(ComplexPoly::new(coeffs))
}

/// Maximum of `|F|` on the unit circle: dense sampling then golden-section
/// refinement around the best sample.
fn circle_max(f: &ComplexPoly) -> f64 {
    let n = 64 * (f.degree() + 1).max(16);
    let at = |t: f64| f.eval(Complex64::from_polar(1.0, t)).norm();
    let step = 2.0 * PI / n as f64;
    let (mut best_t, mut best) = (0.0, 0.0);
    for j in 0..n {
        let v = at(j as f64 * step);
        if v > best {
            best = v;
            best_t = j as f64 * step;
        }
    }
    let (mut a, mut b) = (best_t - step, best_t + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if at(x1) > at(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.max(at(0.5 * (a + b)))
}

/// Walk operator `(2|0⟩⟨0| − I)·V_A` on `n_system + n_index` qubits.
#[derive(Clone, Debug)]
pub struct QubitizationOp {
    pub circuit: Circuit,
    pub alpha: f64,
    pub n_system: usize,
}

/// Walk gates with `extra` controls on everything that must switch off with
/// the signal. PREP and PREP† stay uncontrolled: they cancel when SELECT and
/// the reflection are off.
fn walk_circuit(lcu: &Lcu, extra: &[Control], width: usize) -> Result<Circuit> {
    let (n, a) = (lcu.n_system, lcu.n_index());
    let idx: Vec<usize> = (n..n + a).collect();
    let prep = lcu.prep()?;
    let mut c = Circuit::new(width);
    c.append_mapped(&prep, &idx)?;
    c.append(&build_select_on(&lcu.terms, n, a, extra, width)?)?;
    c.append_mapped(&prep.inverse(), &idx)?;
    // −(I − 2|0⟩⟨0|): phase π on index |0…0⟩, then a global −1.
    let zero: Vec<Control> = extra.iter().copied().chain(idx.iter().map(|&q| Control::off(q))).collect();
    c.push(Gate::global_phase(PI).with_controls(zero).with_role(Role::Select))?;
    c.push(Gate::global_phase(PI).with_controls(extra.iter().copied()).with_role(Role::Select))?;
    Ok(c)
}

pub fn qubitize(lcu: &Lcu) -> Result<QubitizationOp> {
    if lcu.terms.iter().any(|t| t.weight.im.abs() > 1e-12) {
        return Err(invalid("qubitization needs real LCU weights"));
    }
    let width = lcu.n_system + lcu.n_index();
    Ok(QubitizationOp { circuit: walk_circuit(lcu, &[], width)?, alpha: lcu.alpha(), n_system: lcu.n_system })
}

/// Projector onto the `target` eigenspace of a Hermitian `op` whose distinct
/// eigenvalues are `spectrum`. Block = `rescale · P̂`, `alpha = 1/rescale`.
pub fn build_projector_gqsvt(op: &PauliSum, spectrum: &[f64], target: f64) -> Result<(BlockEncoding, LagrangePoly, PhaseSequence)> {
    let lcu = pauli_lcu(op)?;
    let alpha = lcu.alpha();
    let mut poly = lagrange_coeffs(spectrum, target)?;
    let f = chebyshev_map(&poly, alpha)?;
    let rescale = PRESCALE / circle_max(&f);
    poly.rescale = rescale;
    let f = f.scale(Complex64::new(rescale, 0.0));
    let g = complementary_poly(&f)?;
    let phases = find_phases(&f, &g)?;
    let be = assemble_gqsvt(&lcu, &phases, 1.0 / rescale)?;
    Ok((be, poly, phases))
}

/// Phase sequence interleaved with the signal-controlled walk of `lcu`.
/// Layout: system, index register, then the signal qubit.
pub fn assemble_gqsvt(lcu: &Lcu, phases: &PhaseSequence, alpha: f64) -> Result<BlockEncoding> {
    let (n, a) = (lcu.n_system, lcu.n_index());
    let signal = n + a;
    let cq = walk_circuit(lcu, &[Control::off(signal)], n + a + 1)?;
    let mut circuit = assemble_sequence(phases, &cq, signal)?;
    circuit.add_register("system", n)?;
    circuit.add_register("index", a)?;
    circuit.add_register("signal", 1)?;
    let flags = (n..=signal).collect();
    Ok(BlockEncoding { circuit, alpha, n_system: n, flags, approximate: false })
}

/// [`build_projector_gqsvt`] for one of the three symmetry operators, using
/// its analytic spectrum.
pub fn build_symmetry_gqsvt(sym: Symmetry, n_so: usize, target: f64) -> Result<BlockEncoding> {
    let op = sym.operator(n_so)?;
    Ok(build_projector_gqsvt(&op, &sym.spectrum(n_so), target)?.0)
}
