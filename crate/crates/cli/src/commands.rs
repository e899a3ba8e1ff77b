use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use symproj::amp::{plan, simulate_aa};
use symproj::cost::{femoco_estimate, scaling_table, Method};
use symproj::gqsp::projector_phases;
use symproj::gqsvt::build_projector_gqsvt;
use symproj::oracle::{fidelity_vec, project_state_joint, MAX_DENSE_QUBITS};
use symproj::quad::min_nodes_n;
use symproj::sim::{quantize_angles, Role};
use symproj::{BlockEncoding, Circuit, Error as CoreError, Gate, PauliSum, Statevector, Symmetry};

use crate::config::{Projector, RunConfig};
use crate::projector::{build, build_custom, build_with, Built};

const VERIFY_TOL: f64 = 1e-8;
/// Largest register for which `project` reports a fidelity.
const FIDELITY_CAP: usize = 12;
/// Rescaled success probability below which the sector counts as empty.
const EMPTY_SECTOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Init {
    /// Gaussian random amplitudes over the whole register
    Random,
    /// Random over the half-filled electron-number sector
    HalfFilled,
    /// Random over the electron-number parity the projector is exact on
    Parity,
    /// Equal weights over the `M_S` sector of the target
    UniformMs,
}

fn twice_sz(i: usize, n_so: usize) -> i64 {
    (0..n_so).filter(|q| i >> q & 1 == 1).map(|q| if q % 2 == 0 { 1 } else { -1 }).sum()
}

pub fn initial_state(init: Init, n_so: usize, seed: u64, built: &Built, cfg: &RunConfig) -> Result<Statevector<f64>> {
    Ok(match init {
        Init::Random => Statevector::random(n_so, seed),
        Init::HalfFilled => Statevector::random_in(n_so, seed, |i| i.count_ones() as usize == n_so / 2)?,
        Init::Parity => Statevector::random_in(n_so, seed, |i| built.parity.is_none_or(|p| i.count_ones() % 2 == p))?,
        Init::UniformMs => {
            let m = match cfg.projector {
                Projector::SpinZ => cfg.target_for(n_so),
                _ => cfg.m_s_for(cfg.target_for(n_so)),
            };
            let want = (2.0 * m).round() as i64;
            Statevector::uniform_in(n_so, |i| twice_sz(i, n_so) == want)?
        }
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn csv_text<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes `<out>.gp` plotting columns `x` and `y` of the CSV, one curve per
/// distinct value of column `group` when given.
fn gnuplot(out: Option<&Path>, x: usize, y: usize, group: Option<usize>, logx: bool) -> Result<()> {
    let Some(out) = out else { bail!("--plot needs --out") };
    let data = out.display();
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    if logx {
        s.push_str("set logscale x\n");
    }
    match group {
        Some(g) => s.push_str(&format!(
            "groups = system(\"tail -n +2 {data} | cut -d, -f{g} | sort -u\")\nplot for [k in groups] '{data}' using (strcol({g}) eq k ? ${x} : NaN):{y} with linespoints title k\n"
        )),
        None => s.push_str(&format!("plot '{data}' using {x}:{y} with linespoints\n")),
    }
    let mut path = PathBuf::from(out);
    path.set_extension("gp");
    std::fs::write(&path, s).with_context(|| format!("writing {}", path.display()))
}

/// Fidelity of the post-selected output against the exact projection, or 0
/// when the block annihilates the state.
fn fidelity(be: &BlockEncoding, state: &Statevector<f64>, want: &[Complex64]) -> Result<(f64, f64)> {
    match be.apply(state) {
        Ok((out, p)) => Ok((fidelity_vec(&out.to_complex64(), want)?, p)),
        Err(CoreError::ZeroProbability) => Ok((0.0, 0.0)),
        Err(e) => Err(e.into()),
    }
}

pub fn project(cfg: &RunConfig, init: Init, operator: Option<&Path>, spectrum: Option<&[f64]>) -> Result<bool> {
    let n = cfg.n()?;
    let built = match operator {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let op = PauliSum::from_text(&text, Some(n))?;
            let Some(spec) = spectrum else { bail!("--operator needs --spectrum") };
            let Some(t) = cfg.target else { bail!("--operator needs --target") };
            if cfg.method != Method::Gqsvt {
                bail!("user operators are projected with --method gqsvt");
            }
            build_custom(op, spec, t)?
        }
        None => build(cfg, n)?,
    };
    let state = match &cfg.input {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Statevector::<f64>::from_json(&text)?
        }
        None => initial_state(init, n, cfg.seed, &built, cfg)?,
    };
    if state.n_qubits() != n {
        bail!("state has {} qubits, projector acts on {n}", state.n_qubits());
    }
    let want = project_state_joint(&built.target_refs(), &state)?;
    let oracle_p: f64 = want.iter().map(|a| a.norm_sqr()).sum();
    let (out, p) = match built.be.apply(&state) {
        Ok(r) => r,
        Err(CoreError::ZeroProbability) => bail!("the state has no weight in the requested sector"),
        Err(e) => return Err(e.into()),
    };
    if p * built.be.alpha * built.be.alpha < EMPTY_SECTOR {
        bail!("the state has no weight in the requested sector (probability {p:.1e})");
    }
    let fid = (n <= FIDELITY_CAP && oracle_p > 0.0).then(|| fidelity_vec(&out.to_complex64(), &want)).transpose()?;
    let expectations: Vec<_> = [Symmetry::Number, Symmetry::SpinZ, Symmetry::TotalSpin]
        .iter()
        .map(|s| Ok((format!("{s:?}"), out.expectation(&s.operator(n)?)?)))
        .collect::<Result<_>>()?;
    let report = json!({
        "method": cfg.method.to_string(),
        "projector": if operator.is_some() { "operator".to_string() } else { cfg.projector.to_string() },
        "n_so": n,
        "width": built.be.circuit.width(),
        "alpha": built.be.alpha,
        "approximate": built.be.approximate,
        "success_probability": p,
        "oracle_probability": oracle_p,
        "rescaled_probability": p * built.be.alpha * built.be.alpha,
        "fidelity": fid,
        "expectations": expectations.into_iter().collect::<std::collections::BTreeMap<_, _>>(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(path) = &cfg.output {
        std::fs::write(path, out.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    }
    if cfg.verify && built.be.circuit.width() <= MAX_DENSE_QUBITS {
        let f = fidelity_vec(&out.to_complex64(), &want)?;
        let dp = (p * built.be.alpha * built.be.alpha - oracle_p).abs();
        if (1.0 - f).abs() > VERIFY_TOL || dp > VERIFY_TOL {
            eprintln!("verify: fidelity {f:.3e}, probability mismatch {dp:.3e}");
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct NodeRow {
    nodes: usize,
    fidelity: f64,
    probability: f64,
    exact: bool,
}

pub fn scan_nodes(cfg: &RunConfig, init: Init, max: Option<usize>, states: usize, plot: bool) -> Result<bool> {
    let n = cfg.n()?;
    if cfg.method == Method::Gqsvt {
        bail!("GQSVT has no quadrature nodes to scan");
    }
    let base = build(cfg, n)?;
    let beta = cfg.projector == Projector::SpinSector;
    let (min, default_phi) = if beta { (cfg.n_beta_for(n), cfg.n_phi_for(n)?) } else { (cfg.n_phi_for(n)?, 0) };
    let max = max.unwrap_or(2 * min).max(1);
    let inputs: Vec<_> = (0..states.max(1) as u64).map(|k| initial_state(init, n, cfg.seed + k, &base, cfg)).collect::<Result<_>>()?;
    let wants: Vec<_> = inputs.iter().map(|s| project_state_joint(&base.target_refs(), s)).collect::<symproj::Result<_>>()?;
    let mut rows = (1..=max)
        .into_par_iter()
        .map(|k| {
            let b = if beta { build_with(cfg, n, default_phi, k)? } else { build_with(cfg, n, k, 1)? };
            let (mut f, mut p) = (0.0, 0.0);
            for (s, w) in inputs.iter().zip(&wants) {
                let (fi, pi) = fidelity(&b.be, s, w)?;
                f += fi;
                p += pi;
            }
            let m = inputs.len() as f64;
            Ok(NodeRow { nodes: k, fidelity: f / m, probability: p / m, exact: !b.be.approximate })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.nodes);
    emit(cfg.output.as_deref(), &csv_text(&rows)?)?;
    if plot {
        gnuplot(cfg.output.as_deref(), 1, 2, None, false)?;
    }
    let init_ok = init != Init::Random || base.parity.is_none();
    let bad: Vec<_> = rows.iter().filter(|r| r.nodes >= min && (1.0 - r.fidelity).abs() > VERIFY_TOL).map(|r| r.nodes).collect();
    if cfg.verify && init_ok && !bad.is_empty() {
        eprintln!("verify: fidelity below 1 at node counts {bad:?} (minimum {min})");
        return Ok(false);
    }
    Ok(true)
}

#[derive(Serialize)]
struct PrecisionRow {
    method: String,
    scope: &'static str,
    eps_r: f64,
    fidelity: f64,
}

fn scopes(method: Method) -> Vec<(&'static str, Vec<Role>)> {
    match method {
        Method::Lcu => vec![("select", vec![Role::Select]), ("select+prep", vec![Role::Select, Role::Prep])],
        Method::Gqsp => vec![("signal", vec![Role::Select]), ("signal+processing", vec![Role::Select, Role::Processing])],
        Method::Gqsvt => vec![
            ("rotations", vec![Role::Processing]),
            ("prep", vec![Role::Prep]),
            ("all", vec![Role::Processing, Role::Prep, Role::Select]),
        ],
    }
}

pub fn scan_precision(cfg: &RunConfig, init: Init, eps: Option<&[f64]>, states: usize, plot: bool) -> Result<bool> {
    let n = cfg.n()?;
    let built = build(cfg, n)?;
    let grid: Vec<f64> = match eps {
        Some(e) => e.to_vec(),
        None => (2..=10).map(|k| 10f64.powf(-k as f64 / 2.0)).collect(),
    };
    let inputs: Vec<_> = (0..states.max(1) as u64).map(|k| initial_state(init, n, cfg.seed + k, &built, cfg)).collect::<Result<_>>()?;
    let wants: Vec<_> = inputs.iter().map(|s| project_state_joint(&built.target_refs(), s)).collect::<symproj::Result<_>>()?;
    let jobs: Vec<_> = scopes(cfg.method).into_iter().flat_map(|(name, roles)| grid.iter().map(move |&e| (name, roles.clone(), e))).collect();
    let mut rows = jobs
        .into_par_iter()
        .map(|(scope, roles, e)| {
            let be = BlockEncoding { circuit: quantize_angles(&built.be.circuit, e, &roles)?, ..built.be.clone() };
            let mut f = 0.0;
            for (s, w) in inputs.iter().zip(&wants) {
                f += fidelity(&be, s, w)?.0;
            }
            Ok(PrecisionRow { method: cfg.method.to_string(), scope, eps_r: e, fidelity: f / inputs.len() as f64 })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.scope.cmp(b.scope).then(b.eps_r.total_cmp(&a.eps_r)));
    emit(cfg.output.as_deref(), &csv_text(&rows)?)?;
    if plot {
        gnuplot(cfg.output.as_deref(), 3, 4, Some(2), true)?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct ResourceRow {
    method: String,
    projector: String,
    n_so: usize,
    cnot: u64,
    t: u64,
    ancilla: usize,
    eps_r: f64,
}

/// Rotation precision at which each method's `P̂_{M_S}` stays above 0.99
/// fidelity at `n_so = 8`.
pub fn default_eps(method: Method) -> f64 {
    match method {
        Method::Lcu => 1e-1,
        Method::Gqsp => 1e-2,
        Method::Gqsvt => 2e-4,
    }
}

pub fn resources(cfg: &RunConfig, plot: bool) -> Result<bool> {
    let sym = match (cfg.projector, cfg.method) {
        (Projector::Number, _) => Symmetry::Number,
        (Projector::SpinZ, _) => Symmetry::SpinZ,
        (Projector::TotalSpin, Method::Gqsvt) | (Projector::SpinSector, Method::Lcu | Method::Gqsp) => Symmetry::TotalSpin,
        (p, m) => bail!("no cost model for {m} with the {p} projector"),
    };
    let eps = cfg.eps_r.unwrap_or(default_eps(cfg.method));
    let n_list = if cfg.n_so.len() > 1 { cfg.n_so.clone() } else { vec![8, 16, 32, 64] };
    let table = scaling_table(sym, cfg.method, &n_list, eps)?;
    let rows: Vec<_> = table
        .rows
        .iter()
        .map(|r| ResourceRow { method: cfg.method.to_string(), projector: cfg.projector.to_string(), n_so: r.n_so, cnot: r.cnot, t: r.t, ancilla: r.ancilla, eps_r: eps })
        .collect();
    emit(cfg.output.as_deref(), &csv_text(&rows)?)?;
    eprintln!("T    ~ {:.2} N^{:.3} log2 N", table.t_fit.a, table.t_fit.b);
    eprintln!("CNOT ~ {:.2} N^{:.3} log2 N", table.cnot_fit.a, table.cnot_fit.b);
    if plot {
        gnuplot(cfg.output.as_deref(), 3, 5, None, true)?;
    }
    Ok(true)
}

pub fn femoco(cfg: &RunConfig, orbitals: Option<usize>, electrons: Option<usize>, spin: Option<f64>) -> Result<bool> {
    let eps = cfg.eps_r.unwrap_or(1e-2);
    let rows: Vec<(usize, usize, f64)> = match (orbitals, electrons, spin) {
        (None, None, None) => vec![(54, 54, 0.0), (76, 113, 1.5), (76, 113, 0.5)],
        (Some(o), Some(e), Some(s)) => vec![(o, e, s)],
        _ => bail!("give all of --orbitals, --electrons and --spin, or none"),
    };
    let out = rows
        .iter()
        .map(|&(o, e, s)| Ok(femoco_estimate(o, e, s, cfg.m_s.unwrap_or(s), eps)?))
        .collect::<Result<Vec<_>>>()?;
    emit(cfg.output.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))?;
    Ok(true)
}

/// Amplifies a random product state through the exact LCU number projector
/// and compares each round with `sin²((2m+1)θ)`.
pub fn aa_demo(cfg: &RunConfig, rounds: Option<usize>) -> Result<bool> {
    let n = cfg.n()?;
    let ne = cfg.target.map(|t| t as usize).unwrap_or(n / 2);
    let be = symproj::lcu::build_pn_lcu(n, ne, min_nodes_n(n, ne)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut init = Circuit::new(n);
    for q in 0..n {
        init.push(Gate::ry(q, rng.random_range(0.2..2.9)))?;
    }
    let p0 = simulate_aa(&be, &init, 0)?.1;
    let pl = plan(p0)?;
    let last = rounds.unwrap_or(pl.m + 1);
    let mut worst: f64 = 0.0;
    let trace: Vec<_> = (0..=last)
        .map(|m| {
            let p = simulate_aa(&be, &init, m)?.1;
            let closed = ((2 * m + 1) as f64 * pl.theta).sin().powi(2);
            worst = worst.max((p - closed).abs());
            Ok(json!({ "m": m, "simulated": p, "closed_form": closed }))
        })
        .collect::<Result<_>>()?;
    let report = json!({ "n_so": n, "n_elec": ne, "p": p0, "plan": pl, "rounds": trace });
    emit(cfg.output.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    if cfg.verify && worst > 1e-9 {
        eprintln!("verify: amplified probability off the closed form by {worst:.3e}");
        return Ok(false);
    }
    Ok(true)
}

pub fn phases_export(cfg: &RunConfig) -> Result<bool> {
    let n = cfg.n()?;
    let t = cfg.target_for(n);
    let report = match (cfg.method, cfg.projector) {
        (Method::Gqsp, Projector::Number | Projector::SpinZ) => {
            let k = cfg.n_phi_for(n)?;
            json!({ "method": "gqsp", "projector": cfg.projector.to_string(), "target": t, "n_phi": k, "phases": projector_phases(t, k)? })
        }
        (Method::Gqsvt, Projector::Number | Projector::SpinZ | Projector::TotalSpin) => {
            let sym = match cfg.projector {
                Projector::Number => Symmetry::Number,
                Projector::SpinZ => Symmetry::SpinZ,
                _ => Symmetry::TotalSpin,
            };
            let eig = if sym == Symmetry::TotalSpin { t * (t + 1.0) } else { t };
            let (_, poly, phases) = build_projector_gqsvt(&sym.operator(n)?, &sym.spectrum(n), eig)?;
            json!({ "method": "gqsvt", "projector": cfg.projector.to_string(), "target": eig, "n_so": n, "rescale": poly.rescale, "phases": phases })
        }
        (m, p) => bail!("no phase sequence for {m} with the {p} projector"),
    };
    emit(cfg.output.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(true)
}
