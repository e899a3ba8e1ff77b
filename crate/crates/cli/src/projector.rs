//! Maps a run configuration onto a block encoding plus the oracle targets
//! it should reproduce.

use anyhow::{bail, ensure, Result};
use symproj::cost::Method;
use symproj::gqsp::{build_pms_gqsp, build_pn_gqsp};
use symproj::gqsvt::{build_projector_gqsvt, build_symmetry_gqsvt};
use symproj::lcu::{build_pms_lcu, build_pn_lcu, build_ps_lcu, build_psms_composite};
use symproj::{BlockEncoding, PauliSum, Symmetry};

use crate::config::{supported, Projector, RunConfig};

pub struct Built {
    pub be: BlockEncoding,
    /// Commuting `(operator, eigenvalue)` pairs defining the exact projector.
    pub targets: Vec<(PauliSum, f64)>,
    /// Electron-number parity on which a Fourier `M_S` factor is exact;
    /// `None` when exact on the whole register.
    pub parity: Option<u32>,
}

impl Built {
    pub fn target_refs(&self) -> Vec<(&PauliSum, f64)> {
        self.targets.iter().map(|(o, v)| (o, *v)).collect()
    }
}

fn parity_of(m: f64) -> u32 {
    ((2.0 * m).round() as i64).rem_euclid(2) as u32
}

fn spin_value(s: f64) -> f64 {
    s * (s + 1.0)
}

pub fn build(cfg: &RunConfig, n_so: usize) -> Result<Built> {
    build_with(cfg, n_so, cfg.n_phi_for(n_so)?, cfg.n_beta_for(n_so))
}

/// [`build`] with explicit node counts, for sweeps.
pub fn build_with(cfg: &RunConfig, n_so: usize, n_phi: usize, n_beta: usize) -> Result<Built> {
    let (method, projector) = (cfg.method, cfg.projector);
    if !supported(method, projector) {
        bail!("{method} cannot build the {projector} projector");
    }
    let t = cfg.target_for(n_so);
    let op = |s: Symmetry| s.operator(n_so);
    let built = match projector {
        Projector::Number => {
            ensure!(t >= 0.0 && t.fract() == 0.0 && t as usize <= n_so, "electron number must be an integer in 0..={n_so}");
            let ne = t as usize;
            let be = match method {
                Method::Lcu => build_pn_lcu(n_so, ne, n_phi)?,
                Method::Gqsp => build_pn_gqsp(n_so, ne, n_phi)?,
                Method::Gqsvt => build_symmetry_gqsvt(Symmetry::Number, n_so, t)?,
            };
            Built { be, targets: vec![(op(Symmetry::Number)?, t)], parity: None }
        }
        Projector::SpinZ => {
            let (be, parity) = match method {
                Method::Lcu => (build_pms_lcu(n_so, t, n_phi)?, Some(parity_of(t))),
                Method::Gqsp => (build_pms_gqsp(n_so, t, n_phi)?, Some(parity_of(t))),
                Method::Gqsvt => (build_symmetry_gqsvt(Symmetry::SpinZ, n_so, t)?, None),
            };
            Built { be, targets: vec![(op(Symmetry::SpinZ)?, t)], parity }
        }
        Projector::TotalSpin => {
            let be = build_symmetry_gqsvt(Symmetry::TotalSpin, n_so, spin_value(t))?;
            Built { be, targets: vec![(op(Symmetry::TotalSpin)?, spin_value(t))], parity: None }
        }
        Projector::SpinSector => {
            let m = cfg.m_s_for(t);
            let (be, parity) = match method {
                Method::Lcu => (build_psms_composite(n_so, t, m, n_beta, n_phi)?, Some(parity_of(m))),
                Method::Gqsp => {
                    let pm = build_pms_gqsp(n_so, m, n_phi)?;
                    let ps = build_ps_lcu(n_so, t, m, n_beta)?;
                    (pm.then(&ps)?.then(&pm)?, Some(parity_of(m)))
                }
                Method::Gqsvt => {
                    let pm = build_symmetry_gqsvt(Symmetry::SpinZ, n_so, m)?;
                    let ps = build_symmetry_gqsvt(Symmetry::TotalSpin, n_so, spin_value(t))?;
                    (pm.then(&ps)?, None)
                }
            };
            Built { be, targets: vec![(op(Symmetry::SpinZ)?, m), (op(Symmetry::TotalSpin)?, spin_value(t))], parity }
        }
    };
    Ok(built)
}

/// GQSVT projector for a user-supplied Hermitian operator.
pub fn build_custom(op: PauliSum, spectrum: &[f64], eigenvalue: f64) -> Result<Built> {
    let (be, _, _) = build_projector_gqsvt(&op, spectrum, eigenvalue)?;
    Ok(Built { be, targets: vec![(op, eigenvalue)], parity: None })
}
