//! Run configuration: command-line flags layered over an optional TOML file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;
use symproj::cost::Method;
use symproj::quad::{min_nodes_n, min_nodes_sz};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum Projector {
    #[serde(rename = "n")]
    Number,
    #[serde(rename = "sz")]
    SpinZ,
    #[serde(rename = "s2")]
    TotalSpin,
    #[serde(rename = "s_ms")]
    SpinSector,
}

impl FromStr for Projector {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "n" => Projector::Number,
            "sz" | "ms" => Projector::SpinZ,
            "s2" => Projector::TotalSpin,
            "s_ms" | "sms" => Projector::SpinSector,
            _ => bail!("unknown projector '{s}' (n, sz, s2, s_ms)"),
        })
    }
}

impl fmt::Display for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Projector::Number => "n",
            Projector::SpinZ => "sz",
            Projector::TotalSpin => "s2",
            Projector::SpinSector => "s_ms",
        })
    }
}

/// Whether `method` can build `projector`. GQSP needs equally spaced
/// eigenvalues, so `s2` alone is out; its `s_ms` variant uses GQSP for the
/// `M_S` factors only.
pub fn supported(method: Method, projector: Projector) -> bool {
    !matches!((method, projector), (Method::Lcu | Method::Gqsp, Projector::TotalSpin))
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to per-command defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// lcu, gqsp or gqsvt
    #[arg(long, global = true)]
    pub method: Option<Method>,
    /// n, sz, s2 or s_ms
    #[arg(long, global = true)]
    pub projector: Option<Projector>,
    /// Spin-orbital count; a comma list for `resources`
    #[arg(long = "n-so", global = true, value_delimiter = ',')]
    pub n_so: Option<Vec<usize>>,
    /// Electron number for `n`, M_S for `sz`, S for `s2` and `s_ms`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub target: Option<f64>,
    /// M_S for the `s_ms` projector (default: 0 or 1/2, matching S)
    #[arg(long = "m-s", global = true, allow_hyphen_values = true)]
    pub m_s: Option<f64>,
    #[arg(long = "n-phi", global = true)]
    pub n_phi: Option<usize>,
    #[arg(long = "n-beta", global = true)]
    pub n_beta: Option<usize>,
    #[arg(long = "eps-r", global = true)]
    pub eps_r: Option<f64>,
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    #[arg(long = "out", global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Cross-check against the dense oracle and fail on tolerance violations
    #[arg(long, global = true)]
    pub verify: bool,
    /// Key-value TOML file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    method: Option<String>,
    projector: Option<Projector>,
    n_so: Option<NSo>,
    target: Option<f64>,
    m_s: Option<f64>,
    n_phi: Option<usize>,
    n_beta: Option<usize>,
    eps_r: Option<f64>,
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
    verify: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NSo {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub method: Method,
    pub projector: Projector,
    pub n_so: Vec<usize>,
    pub target: Option<f64>,
    pub m_s: Option<f64>,
    pub n_phi: Option<usize>,
    pub n_beta: Option<usize>,
    pub eps_r: Option<f64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub verify: bool,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<RunConfig> {
        let file = match &args.config {
            Some(p) => load(p)?,
            None => FileConfig::default(),
        };
        let method = match (args.method, &file.method) {
            (Some(m), _) => m,
            (None, Some(s)) => s.parse()?,
            (None, None) => Method::Lcu,
        };
        let n_so = args.n_so.clone().or(file.n_so.map(|n| match n {
            NSo::One(n) => vec![n],
            NSo::Many(v) => v,
        }));
        Ok(RunConfig {
            method,
            projector: args.projector.or(file.projector).unwrap_or(Projector::SpinZ),
            n_so: n_so.unwrap_or_else(|| vec![8]),
            target: args.target.or(file.target),
            m_s: args.m_s.or(file.m_s),
            n_phi: args.n_phi.or(file.n_phi),
            n_beta: args.n_beta.or(file.n_beta),
            eps_r: args.eps_r.or(file.eps_r),
            input: args.input.clone().or(file.input),
            output: args.output.clone().or(file.out),
            seed: args.seed.or(file.seed).unwrap_or(0),
            jobs: args.jobs.or(file.jobs),
            verify: args.verify || file.verify.unwrap_or(false),
        })
    }

    pub fn n(&self) -> Result<usize> {
        match self.n_so.as_slice() {
            [n] => Ok(*n),
            [] => bail!("--n-so is empty"),
            _ => bail!("this command takes a single --n-so"),
        }
    }

    /// The requested quantum number, defaulting to half filling, `M_S = 0`
    /// or the singlet.
    pub fn target_for(&self, n_so: usize) -> f64 {
        self.target.unwrap_or(match self.projector {
            Projector::Number => (n_so / 2) as f64,
            _ => 0.0,
        })
    }

    /// `M_S` paired with `S` for `s_ms`.
    pub fn m_s_for(&self, s: f64) -> f64 {
        self.m_s.unwrap_or(if (2.0 * s).round() as i64 % 2 == 0 { 0.0 } else { 0.5 })
    }

    /// Fourier node count: the flag, or the aliasing minimum for the target.
    pub fn n_phi_for(&self, n_so: usize) -> Result<usize> {
        if let Some(k) = self.n_phi {
            return Ok(k);
        }
        Ok(match self.projector {
            Projector::Number => min_nodes_n(n_so, self.target_for(n_so).round() as usize)?,
            Projector::SpinZ => min_nodes_sz(n_so, self.target_for(n_so))?,
            _ => {
                let s = self.target_for(n_so);
                min_nodes_sz(n_so, self.m_s_for(s))?
            }
        })
    }

    /// β-node count exact on the whole `M_S` sector:
    /// `⌈(S + S_max + 1)/2⌉` with `S_max = n_so/4`.
    pub fn n_beta_for(&self, n_so: usize) -> usize {
        self.n_beta.unwrap_or_else(|| {
            let s = self.target_for(n_so);
            ((s + n_so as f64 / 4.0 + 1.0) / 2.0).ceil().max(1.0) as usize
        })
    }
}

fn load(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(text: &str) -> PathBuf {
        let p = std::env::temp_dir().join(format!("symproj-cfg-{}-{}.toml", std::process::id(), text.len()));
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn flags_override_file() {
        let path = write("method = \"gqsp\"\nn_so = [4, 6]\nseed = 9\neps_r = 0.01\n");
        let args = CommonArgs { config: Some(path), seed: Some(3), ..Default::default() };
        let c = RunConfig::resolve(&args).unwrap();
        assert_eq!(c.method, Method::Gqsp);
        assert_eq!(c.n_so, vec![4, 6]);
        assert_eq!(c.seed, 3);
        assert_eq!(c.eps_r, Some(0.01));
    }

    #[test]
    fn unknown_keys_rejected() {
        let path = write("methd = \"lcu\"\n");
        assert!(RunConfig::resolve(&CommonArgs { config: Some(path), ..Default::default() }).is_err());
    }

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(&CommonArgs::default()).unwrap();
        assert_eq!((c.method, c.projector, c.n().unwrap()), (Method::Lcu, Projector::SpinZ, 8));
        assert_eq!(c.n_phi_for(8).unwrap(), 5);
    }

    #[test]
    fn beta_nodes_cover_the_sector() {
        let mut c = RunConfig::resolve(&CommonArgs::default()).unwrap();
        c.projector = Projector::SpinSector;
        c.target = Some(0.5);
        assert_eq!(c.n_beta_for(6), 2);
        assert_eq!(c.m_s_for(0.5), 0.5);
        c.target = Some(2.0);
        assert_eq!(c.n_beta_for(8), 3);
    }

    #[test]
    fn support_matrix() {
        assert!(!supported(Method::Gqsp, Projector::TotalSpin));
        assert!(!supported(Method::Lcu, Projector::TotalSpin));
        assert!(supported(Method::Gqsvt, Projector::SpinSector));
        assert!("s_ms".parse::<Projector>().unwrap() == Projector::SpinSector);
    }
}
