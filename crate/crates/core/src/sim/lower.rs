//! Lowering to CNOT, Toffoli, single-qubit Clifford+T gates and arbitrary
//! single-qubit rotations.
//!
//! Multi-controlled gates go through a clean-ancilla AND ladder. The ladder
//! stays computed between consecutive gates so that terms sharing a control
//! prefix (neighbouring SELECT branches) only pay for the differing tail.
//! Controlled `RZ`/`Phase` leave a diagonal remainder on their target which
//! is accumulated and emitted only when something non-diagonal touches the
//! qubit.

use super::circuit::Circuit;
use super::gate::{wrap_angle, Control, Gate, GateKind, Role};

/// How the AND ladder is reused between consecutive multi-controlled gates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ladder {
    /// Keep the longest common control prefix computed.
    #[default]
    Shared,
    /// Recompute from scratch whenever the control set changes: the plain
    /// one-ladder-per-branch SELECT.
    PerBranch,
}

pub trait Sink {
    fn emit(&mut self, g: Gate);
}

impl Sink for Vec<Gate> {
    fn emit(&mut self, g: Gate) {
        self.push(g);
    }
}

struct Lowerer<'s, S: Sink> {
    sink: &'s mut S,
    width: usize,
    /// Controls folded into the ladder; work qubit `j` holds the AND of
    /// `stack[..=j+1]`.
    stack: Vec<Control>,
    max_work: usize,
    pending: Vec<f64>,
    global: f64,
    role: Role,
    policy: Ladder,
}

impl<'s, S: Sink> Lowerer<'s, S> {
    fn work(&self, j: usize) -> usize {
        self.width + j
    }

    fn pending_slot(&mut self, q: usize) -> &mut f64 {
        if q >= self.pending.len() {
            self.pending.resize(q + 1, 0.0);
        }
        &mut self.pending[q]
    }

    fn flush(&mut self, q: usize) {
        let a = std::mem::take(self.pending_slot(q));
        if wrap_angle(a).abs() > 1e-15 {
            self.out(Gate::phase(q, a));
        }
    }

    fn out(&mut self, g: Gate) {
        let g = g.with_role(self.role);
        self.sink.emit(g);
    }

    /// Emits a primitive, flushing the remainder on qubits it touches
    /// non-diagonally.
    fn prim(&mut self, g: Gate) {
        if !g.kind.is_diagonal() {
            if let Some(t) = g.target {
                self.flush(t);
            }
        }
        self.out(g);
    }

    fn x(&mut self, q: usize) {
        self.prim(Gate::x(q));
    }

    fn cx(&mut self, c: usize, t: usize) {
        self.prim(Gate::cnot(c, t));
    }

    fn toffoli(&mut self, a: Control, b: Control, t: usize) {
        for c in [a, b] {
            if !c.on {
                self.x(c.qubit);
            }
        }
        self.prim(Gate::toffoli(a.qubit, b.qubit, t));
        for c in [a, b] {
            if !c.on {
                self.x(c.qubit);
            }
        }
    }

    fn ladder_step(&mut self, j: usize) {
        let a = if j == 0 { self.stack[0] } else { Control::on(self.work(j - 1)) };
        let b = self.stack[j + 1];
        let w = self.work(j);
        self.max_work = self.max_work.max(j + 1);
        self.toffoli(a, b, w);
    }

    /// Shrinks the ladder to `keep` stacked controls (0 or ≥ 2).
    fn truncate(&mut self, keep: usize) {
        let keep = if keep < 2 { 0 } else { keep };
        while self.stack.len() > keep.max(1) && self.stack.len() >= 2 {
            let j = self.stack.len() - 2;
            self.ladder_step(j);
            self.stack.pop();
        }
        if keep == 0 {
            self.stack.clear();
        }
    }

    /// Computes the AND of `controls` (length ≥ 2) and returns the work qubit
    /// holding it.
    fn ensure(&mut self, controls: &[Control]) -> usize {
        let common = match self.policy {
            Ladder::PerBranch if self.stack.as_slice() != controls => 0,
            _ => self.stack.iter().zip(controls).take_while(|(a, b)| a == b).count(),
        };
        self.truncate(common);
        if self.stack.is_empty() {
            self.stack.push(controls[0]);
        }
        while self.stack.len() < controls.len() {
            self.stack.push(controls[self.stack.len()]);
            let j = self.stack.len() - 2;
            self.ladder_step(j);
        }
        self.work(controls.len() - 2)
    }

    fn release_target(&mut self, g: &Gate) {
        if g.kind.is_diagonal() {
            return;
        }
        if let Some(t) = g.target {
            if let Some(i) = self.stack.iter().position(|c| c.qubit == t) {
                self.truncate(i);
            }
        }
    }

    fn gate(&mut self, g: &Gate) {
        self.role = g.role;
        self.release_target(g);
        let k = g.controls.len();
        if k == 0 {
            return self.uncontrolled(g);
        }
        let direct_toffoli = g.kind == GateKind::X
            && k == 2
            && !(self.stack.len() >= 2 && self.stack[..2] == g.controls[..]);
        if direct_toffoli {
            return self.toffoli(g.controls[0], g.controls[1], g.target.expect("X has a target"));
        }
        let ctl = if k == 1 { g.controls[0] } else { Control::on(self.ensure(&g.controls)) };
        self.single_controlled(g.kind, g.target, ctl);
    }

    fn uncontrolled(&mut self, g: &Gate) {
        match (g.kind, g.target) {
            (GateKind::GlobalPhase(a), _) => self.global += a,
            (GateKind::RZ(a), Some(t)) => {
                *self.pending_slot(t) += a;
                self.global -= a / 2.0;
            }
            (GateKind::Phase(a), Some(t)) => *self.pending_slot(t) += a,
            _ => self.prim(g.clone()),
        }
    }

    fn single_controlled(&mut self, kind: GateKind, target: Option<usize>, ctl: Control) {
        use GateKind::*;
        let c = ctl.qubit;
        // Diagonal phases with an open control need no X conjugation.
        if let (GlobalPhase(a), false) = (kind, ctl.on) {
            self.global += a;
            *self.pending_slot(c) -= a;
            return;
        }
        if !ctl.on {
            self.x(c);
        }
        match (kind, target) {
            (GlobalPhase(a), _) => *self.pending_slot(c) += a,
            (X, Some(t)) => self.cx(c, t),
            (Y, Some(t)) => {
                self.prim(Gate::new(Sdg, t));
                self.cx(c, t);
                self.prim(Gate::new(S, t));
            }
            (Z, Some(t)) => {
                self.prim(Gate::h(t));
                self.cx(c, t);
                self.prim(Gate::h(t));
            }
            (H, Some(t)) => {
                for k in [Sdg, H, Tdg, H, S, H] {
                    self.prim(Gate::new(k, t));
                }
                self.cx(c, t);
                for k in [H, Sdg, H, T, H, S] {
                    self.prim(Gate::new(k, t));
                }
            }
            (S | Sdg | T | Tdg | Phase(_), Some(t)) => {
                let a = match kind {
                    S => std::f64::consts::FRAC_PI_2,
                    Sdg => -std::f64::consts::FRAC_PI_2,
                    T => std::f64::consts::FRAC_PI_4,
                    Tdg => -std::f64::consts::FRAC_PI_4,
                    Phase(a) => a,
                    _ => unreachable!(),
                };
                self.zz(c, t, a);
                *self.pending_slot(c) += a / 2.0;
                *self.pending_slot(t) += a / 2.0;
                self.global -= a / 4.0;
            }
            (RZ(a), Some(t)) => {
                self.zz(c, t, a);
                *self.pending_slot(t) += a / 2.0;
                self.global -= a / 4.0;
            }
            (RY(a), Some(t)) => {
                self.cx(c, t);
                self.prim(Gate::ry(t, -a / 2.0));
                self.cx(c, t);
                self.prim(Gate::ry(t, a / 2.0));
            }
            (RX(a), Some(t)) => {
                self.prim(Gate::h(t));
                self.single_controlled(RZ(a), Some(t), Control::on(c));
                self.prim(Gate::h(t));
            }
            (_, None) => unreachable!("only GlobalPhase lacks a target"),
        }
        if !ctl.on {
            self.x(c);
        }
    }

    /// `e^{iaZ_cZ_t/4}` via a CNOT pair onto `c`.
    fn zz(&mut self, c: usize, t: usize, a: f64) {
        self.cx(t, c);
        self.prim(Gate::phase(c, -a / 2.0));
        self.global += a / 4.0;
        self.cx(t, c);
    }

    fn finish(&mut self) {
        self.truncate(0);
        for q in 0..self.pending.len() {
            self.flush(q);
        }
        if wrap_angle(self.global).abs() > 1e-15 {
            self.out(Gate::global_phase(self.global));
        }
    }
}

/// Streams the lowered form of `circuit` into `sink` and returns the number
/// of work qubits used (indexed from `circuit.width()`).
pub fn lower_into<S: Sink>(circuit: &Circuit, sink: &mut S) -> usize {
    lower_into_with(circuit, sink, Ladder::Shared)
}

pub fn lower_into_with<S: Sink>(circuit: &Circuit, sink: &mut S, policy: Ladder) -> usize {
    let mut l = Lowerer { sink, width: circuit.width(), stack: Vec::new(), max_work: 0, pending: Vec::new(), global: 0.0, role: Role::Other, policy };
    for g in circuit.gates() {
        l.gate(g);
    }
    l.finish();
    l.max_work
}

/// Lowered circuit; the width grows by the work qubits, which start and end
/// in `|0⟩`.
pub fn lower(circuit: &Circuit) -> Circuit {
    lower_with(circuit, Ladder::Shared)
}

pub fn lower_with(circuit: &Circuit, policy: Ladder) -> Circuit {
    let mut gates = Vec::new();
    let work = lower_into_with(circuit, &mut gates, policy);
    let mut out = Circuit::new(circuit.width() + work);
    for g in gates {
        out.push_unchecked(g);
    }
    out
}

/// Expands each Toffoli into 6 CNOTs and 7 T/T† gates.
pub fn lower_toffoli(circuit: &Circuit) -> Circuit {
    use GateKind::{Tdg, H, T};
    let mut out = Circuit::new(circuit.width());
    for g in circuit.gates() {
        if !g.is_toffoli() {
            out.push_unchecked(g.clone());
            continue;
        }
        let (a, b, t) = (g.controls[0].qubit, g.controls[1].qubit, g.target.expect("toffoli target"));
        let seq = [
            Gate::new(H, t),
            Gate::cnot(b, t),
            Gate::new(Tdg, t),
            Gate::cnot(a, t),
            Gate::new(T, t),
            Gate::cnot(b, t),
            Gate::new(Tdg, t),
            Gate::cnot(a, t),
            Gate::new(T, b),
            Gate::new(T, t),
            Gate::new(H, t),
            Gate::cnot(a, b),
            Gate::new(T, a),
            Gate::new(Tdg, b),
            Gate::cnot(a, b),
        ];
        for s in seq {
            out.push_unchecked(s.with_role(g.role));
        }
    }
    out
}
