use crate::error::{invalid, Result};

use super::circuit::Circuit;
use super::gate::{is_clifford_t_angle, GateKind, Role};

/// `2ε·⌊φ/(2ε) + 1/2⌋`; ties round up. A few ulps of slack keep decimal
/// ties such as `0.3/0.2` on the upper side.
pub fn quantize_angle(phi: f64, eps_r: f64) -> f64 {
    let x = phi / (2.0 * eps_r);
    2.0 * eps_r * (x + 0.5 + 4.0 * f64::EPSILON * x.abs().max(1.0)).floor()
}

/// Rounds every continuous rotation whose role is in `scope` to the grid of
/// spacing `2ε_r`.
///
/// Left untouched: basis-change gates, angles already exact in Clifford+T,
/// and uncontrolled global phases (unobservable).
pub fn quantize_angles(circuit: &Circuit, eps_r: f64, scope: &[Role]) -> Result<Circuit> {
    if !(eps_r > 0.0) {
        return Err(invalid(format!("rounding precision must be positive, got {eps_r}")));
    }
    Ok(circuit.map_gates(|g| {
        let mut g = g.clone();
        let Some(a) = g.kind.angle() else { return g };
        let free_phase = matches!(g.kind, GateKind::GlobalPhase(_)) && g.controls.is_empty();
        if g.conjugating || free_phase || !scope.contains(&g.role) || is_clifford_t_angle(a) {
            return g;
        }
        g.kind = g.kind.with_angle(quantize_angle(a, eps_r));
        g
    }))
}
