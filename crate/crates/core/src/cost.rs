//! Fault-tolerant gate accounting: census of lowered circuits, the
//! Clifford+T rotation-synthesis model, scaling fits and the
//! sector-overlap estimator.
//!
//! Counting streams the lowered gates into a tally, so nothing of size
//! `2^n` is ever allocated and widths of several hundred qubits are fine.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amp::{self, binomial};
use crate::error::{invalid, Result};
use crate::gqsp::{assemble_gqsp, build_pms_gqsp, build_pn_gqsp, PhaseSequence};
use crate::gqsvt::assemble_gqsvt;
use crate::lcu::{build_pms_lcu, build_pn_lcu, build_ps_lcu, exp_sz_circuit, pauli_lcu, BlockEncoding};
use crate::qop::Symmetry;
use crate::quad::{self, HalfInt};
use crate::sim::lower::{lower_into_with, Ladder, Sink};
use crate::sim::{clifford_t_count, is_clifford_t_angle, Circuit, Gate, GateKind};

/// Gate census. Toffolis are kept symbolic; `rotations` counts the
/// single-qubit rotations that need synthesis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cnot: u64,
    pub t: u64,
    pub toffoli: u64,
    pub rotations: u64,
    pub clifford: u64,
    pub ancilla: usize,
}

impl GateCounts {
    pub fn cnot_total(&self) -> u64 {
        self.cnot + 6 * self.toffoli
    }

    /// T count once every rotation is synthesized to `eps_r / rotations`.
    pub fn t_total(&self, eps_r: f64) -> u64 {
        let synth = if self.rotations == 0 { 0 } else { self.rotations * t_cost_rotation(eps_r / self.rotations as f64) };
        self.t + 7 * self.toffoli + synth
    }

    pub fn add(&self, o: &GateCounts) -> GateCounts {
        GateCounts {
            cnot: self.cnot + o.cnot,
            t: self.t + o.t,
            toffoli: self.toffoli + o.toffoli,
            rotations: self.rotations + o.rotations,
            clifford: self.clifford + o.clifford,
            ancilla: self.ancilla.max(o.ancilla),
        }
    }

    pub fn times(&self, k: u64) -> GateCounts {
        GateCounts {
            cnot: self.cnot * k,
            t: self.t * k,
            toffoli: self.toffoli * k,
            rotations: self.rotations * k,
            clifford: self.clifford * k,
            ancilla: self.ancilla,
        }
    }
}

#[derive(Default)]
struct Tally(GateCounts);

impl Tally {
    fn rotation(&mut self, a: f64) {
        if is_clifford_t_angle(a) {
            let t = clifford_t_count(a);
            self.0.t += t;
            self.0.clifford += 1 - t.min(1);
        } else {
            self.0.rotations += 1;
        }
    }
}

impl Sink for Tally {
    fn emit(&mut self, g: Gate) {
        use GateKind::*;
        let c = &mut self.0;
        match (g.controls.len(), g.kind) {
            (0, GlobalPhase(_)) => {}
            (0, T | Tdg) => c.t += 1,
            (0, RX(a) | RY(a) | RZ(a) | Phase(a)) => self.rotation(a),
            (0, _) => c.clifford += 1,
            (1, _) => c.cnot += 1,
            (2, X) => c.toffoli += 1,
            (k, kind) => unreachable!("lowering left a {k}-controlled {}", kind.name()),
        }
    }
}

/// Census of the lowered circuit. Multi-controlled gates pay a fresh AND
/// ladder per distinct control set; `ancilla` counts the ladder qubits.
pub fn count_gates(circuit: &Circuit) -> GateCounts {
    let mut tally = Tally::default();
    let work = lower_into_with(circuit, &mut tally, Ladder::PerBranch);
    tally.0.ancilla = work;
    tally.0
}

/// [`count_gates`] with the block-encoding ancillas added.
pub fn count_block_encoding(be: &BlockEncoding) -> GateCounts {
    let mut c = count_gates(&be.circuit);
    c.ancilla += be.n_ancilla();
    c
}

/// `⌈3·log₂(1/ε)⌉` T gates per synthesized rotation.
pub fn t_cost_rotation(eps: f64) -> u64 {
    (3.0 * (1.0 / eps).log2() - 1e-9).ceil().max(0.0) as u64
}

/// `⌈3·N·log₂(N/ε_r)⌉`, the uniform-split aggregate.
pub fn aggregate_t(n_rot: u64, eps_r: f64) -> u64 {
    if n_rot == 0 {
        return 0;
    }
    let n = n_rot as f64;
    (3.0 * n * (n / eps_r).log2() - 1e-9).ceil() as u64
}

/// Constant in front of `log₂(1/ε)` in the QROM state-preparation T count.
pub const QROM_LOG_CONSTANT: f64 = 1.0;

/// QROM-based PREP over `L` coefficients at precision `eps`.
pub fn qrom_prep_model(l: usize, eps: f64) -> Result<GateCounts> {
    if l == 0 {
        return Err(invalid("QROM model needs at least one coefficient"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("precision must lie in (0, 1), got {eps}")));
    }
    let mu = (1.0 / eps).log2().ceil() as usize;
    let log_l = (l as f64).log2().ceil() as usize;
    Ok(GateCounts {
        t: 4 * l as u64 + (QROM_LOG_CONSTANT * (1.0 / eps).log2()).ceil() as u64,
        ancilla: 1 + 2 * log_l + 2 * mu,
        ..Default::default()
    })
}

/// Unary-iteration SELECT scaffold over `L` branches.
pub fn select_scaffold_model(l: usize) -> Result<GateCounts> {
    if l == 0 {
        return Err(invalid("SELECT needs at least one branch"));
    }
    Ok(GateCounts { t: 4 * l as u64 - 4, ..Default::default() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lcu,
    Gqsp,
    Gqsvt,
}

impl FromStr for Method {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lcu" => Ok(Method::Lcu),
            "gqsp" => Ok(Method::Gqsp),
            "gqsvt" => Ok(Method::Gqsvt),
            _ => Err(invalid(format!("unknown method '{s}' (lcu, gqsp, gqsvt)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Lcu => "lcu",
            Method::Gqsp => "gqsp",
            Method::Gqsvt => "gqsvt",
        })
    }
}

/// Fourier node count used for the scaling tables: the aliasing minimum for
/// the half-filled `M_S = 0` sector.
pub fn scaling_n_phi(n_so: usize) -> usize {
    n_so / 2 + 1
}

/// Placeholder phases of the right degree; every angle is a generic
/// non-Clifford value so each processing rotation is counted.
fn generic_phases(degree: usize) -> PhaseSequence {
    PhaseSequence { thetas: vec![0.3; degree + 1], phis: vec![0.7; degree + 1], lambda: 0.1 }
}

/// Circuit for a projector at the half-filled, `M_S = 0`, singlet target,
/// built for counting only. GQSVT uses generic phases since the counts do
/// not depend on their values.
pub fn counting_circuit(projector: Symmetry, method: Method, n_so: usize) -> Result<BlockEncoding> {
    if n_so < 2 || !n_so.is_multiple_of(2) {
        return Err(invalid(format!("n_so must be even and at least 2, got {n_so}")));
    }
    let n_phi = scaling_n_phi(n_so);
    let n_elec = n_so / 2;
    match (projector, method) {
        (Symmetry::Number, Method::Lcu) => build_pn_lcu(n_so, n_elec, n_so + 1),
        (Symmetry::Number, Method::Gqsp) => build_pn_gqsp(n_so, n_elec, n_so + 1),
        (Symmetry::SpinZ, Method::Lcu) => build_pms_lcu(n_so, 0.0, n_phi),
        (Symmetry::SpinZ, Method::Gqsp) => build_pms_gqsp(n_so, 0.0, n_phi),
        (Symmetry::TotalSpin, Method::Lcu | Method::Gqsp) => {
            let pm = if method == Method::Lcu { build_pms_lcu(n_so, 0.0, n_phi)? } else { build_pms_gqsp(n_so, 0.0, n_phi)? };
            let ps = build_ps_lcu(n_so, 0.0, 0.0, quad::recommended_n_beta(0.0)?)?;
            pm.then(&ps)?.then(&pm)
        }
        (sym, Method::Gqsvt) => {
            let lcu = pauli_lcu(&sym.operator(n_so)?)?;
            let degree = sym.spectrum(n_so).len() - 1;
            assemble_gqsvt(&lcu, &generic_phases(degree), lcu.alpha())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_so: usize,
    pub cnot: u64,
    pub t: u64,
    pub ancilla: usize,
    pub counts: GateCounts,
}

/// `y ≈ a·N^b·log₂N`, fitted by least squares on `ln(y/log₂N)` against `ln N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLogFit {
    pub a: f64,
    pub b: f64,
}

impl PowerLogFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.a * n.powf(self.b) * n.log2()
    }
}

pub fn fit_power_log(points: &[(f64, f64)]) -> Result<PowerLogFit> {
    if points.len() < 2 || points.iter().any(|&(n, y)| n <= 1.0 || y <= 0.0) {
        return Err(invalid("power-log fit needs at least two points with N > 1 and positive counts"));
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(n, y)| (y / n.log2()).ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("power-log fit needs distinct N"));
    }
    let b = sxy / sxx;
    Ok(PowerLogFit { a: (my - b * mx).exp(), b })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingTable {
    pub projector: Symmetry,
    pub method: Method,
    pub eps_r: f64,
    pub rows: Vec<ScalingRow>,
    pub t_fit: PowerLogFit,
    pub cnot_fit: PowerLogFit,
}

/// Symbolic counts over `n_so_list` with power-log fits of the T and CNOT
/// totals. Rows are computed in parallel and returned sorted by `n_so`.
pub fn scaling_table(projector: Symmetry, method: Method, n_so_list: &[usize], eps_r: f64) -> Result<ScalingTable> {
    if !(eps_r > 0.0 && eps_r < 1.0) {
        return Err(invalid(format!("rotation precision must lie in (0, 1), got {eps_r}")));
    }
    let mut rows = n_so_list
        .par_iter()
        .map(|&n| {
            let counts = count_block_encoding(&counting_circuit(projector, method, n)?);
            Ok(ScalingRow { n_so: n, cnot: counts.cnot_total(), t: counts.t_total(eps_r), ancilla: counts.ancilla, counts })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.n_so);
    let pts = |f: fn(&ScalingRow) -> u64| rows.iter().map(|r| (r.n_so as f64, f(r) as f64)).collect::<Vec<_>>();
    let t_fit = fit_power_log(&pts(|r| r.t))?;
    let cnot_fit = fit_power_log(&pts(|r| r.cnot))?;
    Ok(ScalingTable { projector, method, eps_r, rows, t_fit, cnot_fit })
}

/// Fraction of the `M_S = S` sector of `n_elec` spins that has total spin
/// `S`: `1 − C(N, N/2+S+1)/C(N, N/2+S)`.
pub fn sector_overlap(n_elec: usize, s: f64) -> Result<f64> {
    if n_elec == 0 {
        return Err(invalid("need at least one electron"));
    }
    let sh = HalfInt::from_f64(s)?;
    if sh.twice() < 0 || (sh.twice() as usize) > n_elec {
        return Err(invalid(format!("spin {s} out of range for {n_elec} electrons")));
    }
    if !(sh.twice() as usize + n_elec).is_multiple_of(2) {
        return Err(invalid(format!("spin {s} has the wrong parity for {n_elec} electrons")));
    }
    let k = (n_elec + sh.twice() as usize) / 2;
    let n = n_elec as u64;
    Ok(1.0 - binomial(n, k as u64 + 1) / binomial(n, k as u64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FemocoEstimate {
    pub n_orbitals: usize,
    pub n_elec: usize,
    pub s: f64,
    pub m_s: f64,
    pub p: f64,
    pub m: usize,
    pub queries: usize,
    pub n_phi: usize,
    pub n_beta: usize,
    pub projector_t: u64,
    pub total_t: u64,
}

/// Amplified `P̂_{S,M_S}` cost on `2·n_orbitals` spin-orbitals: GQSP
/// `P̂_{M_S}` on both sides of the β-integral LCU, with `N_φ = N_SO + 1`.
pub fn femoco_estimate(n_orbitals: usize, n_elec: usize, s: f64, m_s: f64, eps_r: f64) -> Result<FemocoEstimate> {
    let n_so = 2 * n_orbitals;
    if n_elec > n_so {
        return Err(invalid(format!("{n_elec} electrons do not fit {n_so} spin-orbitals")));
    }
    if m_s.abs() > s {
        return Err(invalid(format!("|M_S| = {} exceeds S = {s}", m_s.abs())));
    }
    let p = sector_overlap(n_elec, s)?;
    let plan = amp::plan(p)?;
    let n_phi = n_so + 1;
    let n_beta = quad::recommended_n_beta(s)?;

    let pm = count_block_encoding(&pms_gqsp_for_counting(n_so, n_phi)?);
    let ps = count_block_encoding(&build_ps_lcu(n_so, s, m_s, n_beta)?);
    let one = pm.times(2).add(&ps);
    let projector_t = one.t_total(eps_r);
    Ok(FemocoEstimate {
        n_orbitals,
        n_elec,
        s,
        m_s,
        p,
        m: plan.m,
        queries: plan.queries,
        n_phi,
        n_beta,
        projector_t,
        total_t: plan.queries as u64 * projector_t,
    })
}

/// GQSP `P̂_{M_S}` gate structure with generic phases. Real phases differ
/// only where an angle happens to vanish, which moves the count by a few
/// rotations out of millions, and finding them at degree ~150 dominates the
/// runtime.
fn pms_gqsp_for_counting(n_so: usize, n_phi: usize) -> Result<BlockEncoding> {
    assemble_gqsp(&generic_phases(n_phi - 1), &exp_sz_circuit(2.0 * PI / n_phi as f64, n_so, 0.0)?)
}
