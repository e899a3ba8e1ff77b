use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    RX(f64),
    RY(f64),
    RZ(f64),
    /// `diag(1, e^{iθ})`.
    Phase(f64),
    /// Scalar `e^{iθ}`; a relative phase once controls are attached.
    GlobalPhase(f64),
}

impl GateKind {
    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::RX(a) | GateKind::RY(a) | GateKind::RZ(a) | GateKind::Phase(a) | GateKind::GlobalPhase(a) => {
                Some(a)
            }
            _ => None,
        }
    }

    pub fn with_angle(&self, a: f64) -> GateKind {
        match self {
            GateKind::RX(_) => GateKind::RX(a),
            GateKind::RY(_) => GateKind::RY(a),
            GateKind::RZ(_) => GateKind::RZ(a),
            GateKind::Phase(_) => GateKind::Phase(a),
            GateKind::GlobalPhase(_) => GateKind::GlobalPhase(a),
            k => *k,
        }
    }

    pub fn inverse(&self) -> GateKind {
        use GateKind::*;
        match *self {
            S => Sdg,
            Sdg => S,
            T => Tdg,
            Tdg => T,
            RX(a) => RX(-a),
            RY(a) => RY(-a),
            RZ(a) => RZ(-a),
            Phase(a) => Phase(-a),
            GlobalPhase(a) => GlobalPhase(-a),
            k => k,
        }
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        use GateKind::*;
        matches!(self, Z | S | Sdg | T | Tdg | RZ(_) | Phase(_) | GlobalPhase(_))
    }

    pub fn name(&self) -> &'static str {
        use GateKind::*;
        match self {
            H => "H",
            X => "X",
            Y => "Y",
            Z => "Z",
            S => "S",
            Sdg => "SDG",
            T => "T",
            Tdg => "TDG",
            RX(_) => "RX",
            RY(_) => "RY",
            RZ(_) => "RZ",
            Phase(_) => "P",
            GlobalPhase(_) => "GPHASE",
        }
    }

    /// 2×2 matrix `[[m00, m01], [m10, m11]]`; for `GlobalPhase` the scalar
    /// sits on the diagonal.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        use GateKind::*;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        match *self {
            H => [[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]],
            X => [[o, l], [l, o]],
            Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
            Z => [[l, o], [o, -l]],
            S => [[l, o], [o, c(0.0, 1.0)]],
            Sdg => [[l, o], [o, c(0.0, -1.0)]],
            T => [[l, o], [o, Complex64::from_polar(1.0, FRAC_PI_4)]],
            Tdg => [[l, o], [o, Complex64::from_polar(1.0, -FRAC_PI_4)]],
            RX(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            RY(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            RZ(a) => [[Complex64::from_polar(1.0, -a / 2.0), o], [o, Complex64::from_polar(1.0, a / 2.0)]],
            Phase(a) => [[l, o], [o, Complex64::from_polar(1.0, a)]],
            GlobalPhase(a) => {
                let p = Complex64::from_polar(1.0, a);
                [[p, o], [o, p]]
            }
        }
    }
}

/// A control line; `on = false` is an open (|0⟩-conditioned) control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub on: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Self { qubit, on: true }
    }

    pub fn off(qubit: usize) -> Self {
        Self { qubit, on: false }
    }
}

/// Which part of a construction a gate belongs to. Drives the rounding scope
/// of [`crate::sim::quantize_angles`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Role {
    /// SELECT unitaries and GQSP signal operators.
    Select,
    /// State-preparation rotations.
    Prep,
    /// Signal-processing rotations of GQSP/GQSVT.
    Processing,
    #[default]
    Other,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// `None` only for an uncontrolled `GlobalPhase`.
    pub target: Option<usize>,
    pub controls: Vec<Control>,
    pub role: Role,
    /// Basis change that cancels against its partner; such gates stay
    /// uncontrolled when the surrounding fragment is controlled.
    pub conjugating: bool,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Self { kind, target: Some(target), controls: Vec::new(), role: Role::Other, conjugating: false }
    }

    pub fn global_phase(theta: f64) -> Self {
        Self { kind: GateKind::GlobalPhase(theta), target: None, controls: Vec::new(), role: Role::Other, conjugating: false }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, q)
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, q)
    }
    pub fn rx(q: usize, a: f64) -> Self {
        Self::new(GateKind::RX(a), q)
    }
    pub fn ry(q: usize, a: f64) -> Self {
        Self::new(GateKind::RY(a), q)
    }
    pub fn rz(q: usize, a: f64) -> Self {
        Self::new(GateKind::RZ(a), q)
    }
    pub fn phase(q: usize, a: f64) -> Self {
        Self::new(GateKind::Phase(a), q)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::X, target).with_controls([Control::on(control)])
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Self::new(GateKind::Z, target).with_controls([Control::on(control)])
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self::new(GateKind::X, target).with_controls([Control::on(c0), Control::on(c1)])
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn conjugating(mut self) -> Self {
        self.conjugating = true;
        self
    }

    pub fn inverse(&self) -> Gate {
        Gate { kind: self.kind.inverse(), ..self.clone() }
    }

    pub fn is_toffoli(&self) -> bool {
        self.kind == GateKind::X && self.controls.len() == 2 && self.controls.iter().all(|c| c.on)
    }

    pub fn is_cnot(&self) -> bool {
        self.kind == GateKind::X && self.controls.len() == 1 && self.controls[0].on
    }

    /// Every qubit the gate reads or writes.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.target.into_iter().chain(self.controls.iter().map(|c| c.qubit))
    }
}

/// True when `a` is an integer multiple of π/4 (up to float noise), i.e. the
/// rotation is exactly Clifford+T.
pub fn is_clifford_t_angle(a: f64) -> bool {
    let k = a / FRAC_PI_4;
    (k - k.round()).abs() < 1e-12
}

/// Number of T gates in the exact Clifford+T form of `Phase(a)`/`RZ(a)` when
/// [`is_clifford_t_angle`] holds.
pub fn clifford_t_count(a: f64) -> u64 {
    let k = (a / FRAC_PI_4).round() as i64;
    (k.rem_euclid(2)) as u64
}

/// Wraps into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        match self.target {
            Some(t) => write!(f, " {t}")?,
            None => write!(f, " -")?,
        }
        for c in &self.controls {
            if c.on {
                write!(f, " {}", c.qubit)?;
            } else {
                write!(f, " ~{}", c.qubit)?;
            }
        }
        if let Some(a) = self.kind.angle() {
            write!(f, " {a:.17e}")?;
        }
        Ok(())
    }
}
