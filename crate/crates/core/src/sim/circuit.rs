use std::fmt;
use std::ops::Range;

use crate::error::{invalid, Error, Result};

use super::gate::{Control, Gate, Role};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub qubits: Range<usize>,
}

/// Ordered gate list over a fixed-width register.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    width: usize,
    registers: Vec<Register>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self { width, registers: Vec::new(), gates: Vec::new() }
    }

    /// Appends a named register of `len` qubits to the layout and returns its
    /// range. The layout must stay within the width.
    pub fn add_register(&mut self, name: &str, len: usize) -> Result<Range<usize>> {
        let start = self.registers.last().map_or(0, |r| r.qubits.end);
        if start + len > self.width {
            return Err(invalid(format!("register `{name}` overflows width {}", self.width)));
        }
        let r = start..start + len;
        self.registers.push(Register { name: name.to_string(), qubits: r.clone() });
        Ok(r)
    }

    pub fn register(&self, name: &str) -> Option<Range<usize>> {
        self.registers.iter().find(|r| r.name == name).map(|r| r.qubits.clone())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Grows the width; existing gates are unaffected.
    pub fn widen(&mut self, width: usize) {
        self.width = self.width.max(width);
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        check_gate(&g, self.width)?;
        self.gates.push(g);
        Ok(())
    }

    /// Pushes a gate the caller has already validated; used by builders whose
    /// indices are correct by construction.
    pub(crate) fn push_unchecked(&mut self, g: Gate) {
        debug_assert!(check_gate(&g, self.width).is_ok(), "bad gate {g}");
        self.gates.push(g);
    }

    /// Appends all gates of `other`, which must not be wider.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.width > self.width {
            return Err(Error::SizeMismatch { expected: self.width, found: other.width });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Appends `other` with qubit `q` relabelled to `map[q]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() < other.width {
            return Err(Error::SizeMismatch { expected: other.width, found: map.len() });
        }
        for g in &other.gates {
            let mut g = g.clone();
            g.target = g.target.map(|t| map[t]);
            for c in &mut g.controls {
                c.qubit = map[c.qubit];
            }
            self.push(g)?;
        }
        Ok(())
    }

    /// Adjoint: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            registers: self.registers.clone(),
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Adds `controls` to every gate except conjugating basis changes.
    pub fn controlled(&self, controls: &[Control]) -> Result<Circuit> {
        let mut out = Circuit { width: self.width, registers: self.registers.clone(), gates: Vec::new() };
        for g in &self.gates {
            let mut g = g.clone();
            if !g.conjugating {
                g.controls.extend_from_slice(controls);
            }
            out.push(g)?;
        }
        Ok(out)
    }

    pub fn with_role(mut self, role: Role) -> Circuit {
        for g in &mut self.gates {
            g.role = role;
        }
        self
    }

    pub fn map_gates(&self, mut f: impl FnMut(&Gate) -> Gate) -> Circuit {
        Circuit { width: self.width, registers: self.registers.clone(), gates: self.gates.iter().map(&mut f).collect() }
    }

    /// One gate per line, `KIND target [controls...] [angle]`; open controls
    /// are written `~q`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }
}

fn check_gate(g: &Gate, width: usize) -> Result<()> {
    if let Some(t) = g.target {
        if t >= width {
            return Err(invalid(format!("gate {g}: target {t} outside width {width}")));
        }
        if g.controls.iter().any(|c| c.qubit == t) {
            return Err(invalid(format!("gate {g}: target doubles as control")));
        }
    } else if !matches!(g.kind, super::GateKind::GlobalPhase(_)) {
        return Err(invalid(format!("gate {g} needs a target")));
    }
    for (i, c) in g.controls.iter().enumerate() {
        if c.qubit >= width {
            return Err(invalid(format!("gate {g}: control {} outside width {width}", c.qubit)));
        }
        if g.controls[..i].iter().any(|d| d.qubit == c.qubit) {
            return Err(invalid(format!("gate {g}: repeated control {}", c.qubit)));
        }
    }
    Ok(())
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
