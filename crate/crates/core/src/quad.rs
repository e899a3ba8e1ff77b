//! Quadrature grids and the special functions behind the discretized
//! projector integrals.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Integer or half-integer, stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub fn from_int(n: i64) -> Self {
        Self(2 * n)
    }

    /// Accepts only exact multiples of 1/2.
    pub fn from_f64(x: f64) -> Result<Self> {
        let t = 2.0 * x;
        if !t.is_finite() || (t - t.round()).abs() > 1e-9 {
            return Err(invalid(format!("{x} is not a multiple of 1/2")));
        }
        Ok(Self(t.round() as i64))
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        Self(self.0.abs())
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Uniform nodes `φ_k = 2πk/N_φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierGrid {
    pub n_phi: usize,
    pub nodes: Vec<f64>,
}

impl FourierGrid {
    pub fn new(n_phi: usize) -> Result<Self> {
        if n_phi == 0 {
            return Err(invalid("Fourier grid needs at least one node"));
        }
        Ok(Self { n_phi, nodes: (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect() })
    }
}

/// Smallest uniform grid that makes the `M_S` projector exact on a register
/// of `n_so` spin-orbitals.
pub fn min_nodes_sz(n_so: usize, m_s: f64) -> Result<usize> {
    let m = HalfInt::from_f64(m_s)?;
    if m.abs().twice() > n_so as i64 {
        return Err(invalid(format!("|M_S| = {} exceeds {}", m.abs(), n_so / 2)));
    }
    Ok(n_so / 2 + (m.abs().twice() as usize).div_ceil(2) + 1)
}

/// Smallest uniform grid that makes the particle-number projector exact.
pub fn min_nodes_n(n_so: usize, n_elec: usize) -> Result<usize> {
    if n_elec > n_so {
        return Err(invalid(format!("{n_elec} electrons do not fit in {n_so} spin-orbitals")));
    }
    Ok(n_so / 2 + n_elec.abs_diff(n_so / 2) + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GLQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Legendre polynomial `P_l(x)`.
pub fn legendre(l: usize, x: f64) -> f64 {
    legendre_with_derivative(l, x).0
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<GLQuadrature> {
    if n == 0 {
        return Err(invalid("Gauss-Legendre rule needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(GLQuadrature { nodes, weights })
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` by the three-term recurrence.
fn jacobi(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let lhs = 2.0 * k * (k + a + b) * (s - 2.0);
        let p2 = ((s - 1.0) * (s * (s - 2.0) * x + a * a - b * b) * p1 - 2.0 * (k + a - 1.0) * (k + b - 1.0) * s * p0) / lhs;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Diagonal element `d^S_{MM}(β)` of the spin-S rotation about y.
///
/// Evaluated as `cos^{2|M|}(β/2)·P_{S−|M|}^{(0, 2|M|)}(cos β)`; the
/// alternating factorial sum loses all digits to cancellation once S reaches
/// a few dozen.
pub fn wigner_d_diag(s: HalfInt, m: HalfInt, beta: f64) -> Result<f64> {
    if s.twice() < 0 || m.abs() > s || (s.twice() - m.twice()) % 2 != 0 {
        return Err(invalid(format!("invalid quantum numbers S = {s}, M = {m}")));
    }
    let b = m.abs().twice();
    let n = ((s.twice() - b) / 2) as usize;
    let c = (beta / 2.0).cos();
    Ok(c.powi(b as i32) * jacobi(n, 0.0, b as f64, beta.cos()))
}

/// Euler-angle grid for the SU(2) projector integral with its complex
/// weights, flattened as `(b·N_α + a)·N_γ + g`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerGrid {
    pub n_alpha: usize,
    pub n_beta: usize,
    pub n_gamma: usize,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub weights: Vec<Complex64>,
}

impl EulerGrid {
    pub fn index(&self, b: usize, a: usize, g: usize) -> usize {
        (b * self.n_alpha + a) * self.n_gamma + g
    }

    /// `Σ |w_bag|`.
    pub fn one_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).sum()
    }
}

fn check_spin(s: HalfInt, m: HalfInt) -> Result<()> {
    if s.twice() < 0 || m.abs() > s || (s.twice() - m.twice()) % 2 != 0 {
        return Err(invalid(format!("invalid quantum numbers S = {s}, M_S = {m}")));
    }
    Ok(())
}

/// Gauss–Legendre β nodes `arccos(x_b)` with the matching
/// `(2S+1)/2 · w_b · d^S_{MM}(β_b)` factors.
pub fn su2_beta_weights(s: HalfInt, m: HalfInt, n_beta: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_spin(s, m)?;
    let gl = gauss_legendre(n_beta)?;
    let pref = (s.twice() + 1) as f64 / 2.0;
    let mut betas = Vec::with_capacity(n_beta);
    let mut ws = Vec::with_capacity(n_beta);
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        let beta = x.acos();
        betas.push(beta);
        ws.push(pref * w * wigner_d_diag(s, m, beta)?);
    }
    Ok((betas, ws))
}

pub fn su2_weights(s: f64, m_s: f64, n_alpha: usize, n_beta: usize, n_gamma: usize) -> Result<EulerGrid> {
    let (s, m) = (HalfInt::from_f64(s)?, HalfInt::from_f64(m_s)?);
    if n_alpha == 0 || n_gamma == 0 {
        return Err(invalid("Euler grid counts must be positive"));
    }
    let (betas, wb) = su2_beta_weights(s, m, n_beta)?;
    let alphas: Vec<f64> = FourierGrid::new(n_alpha)?.nodes;
    let gammas: Vec<f64> = FourierGrid::new(n_gamma)?.nodes;
    let norm = (n_alpha * n_gamma) as f64;
    let mut weights = Vec::with_capacity(n_alpha * n_beta * n_gamma);
    for w in &wb {
        for a in &alphas {
            for g in &gammas {
                weights.push(Complex64::from_polar(w / norm, m.value() * (a + g)));
            }
        }
    }
    Ok(EulerGrid { n_alpha, n_beta, n_gamma, alphas, betas, gammas, weights })
}

/// β-node counts observed to saturate the total-spin projector; `S + 1`
/// beyond the table.
pub fn recommended_n_beta(s: f64) -> Result<usize> {
    let s2 = HalfInt::from_f64(s).map_err(|_| Error::InvalidArgument(format!("invalid spin {s}")))?;
    if s2.twice() < 0 {
        return Err(invalid(format!("spin must be nonnegative, got {s}")));
    }
    Ok(match s2.twice() {
        0 => 2,
        4 => 3,
        8 => 3,
        12 => 4,
        t => (t as f64 / 2.0 + 1.0).ceil() as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(x: f64) -> HalfInt {
        HalfInt::from_f64(x).unwrap()
    }

    #[test]
    fn node_minima() {
        assert_eq!(min_nodes_sz(12, 0.0).unwrap(), 7);
        assert_eq!(min_nodes_sz(12, 6.0).unwrap(), 13);
        assert_eq!(min_nodes_sz(4, 1.0).unwrap(), 4);
        assert_eq!(min_nodes_sz(6, 0.5).unwrap(), 5);
        assert!(min_nodes_sz(4, 3.0).is_err());
        assert_eq!(min_nodes_n(12, 6).unwrap(), 7);
        assert_eq!(min_nodes_n(12, 0).unwrap(), 13);
        assert!(min_nodes_n(4, 5).is_err());
    }

    #[test]
    fn gauss_legendre_small() {
        let g = gauss_legendre(1).unwrap();
        assert_eq!(g.nodes, vec![0.0]);
        assert!((g.weights[0] - 2.0).abs() < 1e-15);
        let g = gauss_legendre(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((g.nodes[0] + r).abs() < 1e-15 && (g.nodes[1] - r).abs() < 1e-15);
        assert!((g.weights[0] - 1.0).abs() < 1e-14);
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn gauss_legendre_exactness() {
        let g = gauss_legendre(5).unwrap();
        let integral: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-13);
        for n in [3usize, 10, 64, 200] {
            let g = gauss_legendre(n).unwrap();
            assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
            for (i, x) in g.nodes.iter().enumerate() {
                assert!((x + g.nodes[n - 1 - i]).abs() < 1e-15);
                assert!(legendre(n, *x).abs() < 1e-12);
            }
            assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn wigner_closed_forms() {
        for beta in [0.0, 0.3, 1.1, 2.5, PI] {
            assert!((wigner_d_diag(h(0.0), h(0.0), beta).unwrap() - 1.0).abs() < 1e-14);
            assert!((wigner_d_diag(h(1.0), h(0.0), beta).unwrap() - beta.cos()).abs() < 1e-13);
            assert!((wigner_d_diag(h(0.5), h(0.5), beta).unwrap() - (beta / 2.0).cos()).abs() < 1e-13);
            let d11 = (1.0 + beta.cos()) / 2.0;
            assert!((wigner_d_diag(h(1.0), h(1.0), beta).unwrap() - d11).abs() < 1e-13);
            // d^2_00 = P_2(cos β)
            assert!((wigner_d_diag(h(2.0), h(0.0), beta).unwrap() - legendre(2, beta.cos())).abs() < 1e-13);
        }
        assert!(wigner_d_diag(h(1.0), h(0.5), 0.1).is_err());
        assert!(wigner_d_diag(h(1.0), h(2.0), 0.1).is_err());
    }

    fn ln_factorial(n: i64) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    /// Factorial-sum form of d^S_{MM}, fine for small S.
    fn wigner_sum(s: HalfInt, m: HalfInt, beta: f64) -> f64 {
        let jpm = (s.twice() + m.twice()) / 2;
        let jmm = (s.twice() - m.twice()) / 2;
        let (sn, cs) = (beta / 2.0).sin_cos();
        (0..=jpm.min(jmm))
            .map(|k| {
                let ln = ln_factorial(jpm) + ln_factorial(jmm) - ln_factorial(jpm - k) - ln_factorial(jmm - k) - 2.0 * ln_factorial(k);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * ln.exp() * cs.powi((jpm + jmm - 2 * k) as i32) * sn.powi((2 * k) as i32)
            })
            .sum()
    }

    #[test]
    fn recurrence_matches_factorial_sum() {
        for twice_s in 0..=20i64 {
            for twice_m in (-twice_s..=twice_s).step_by(2) {
                for beta in [0.0, 0.4, 1.3, 2.2, 3.0, PI] {
                    let (s, m) = (HalfInt::from_twice(twice_s), HalfInt::from_twice(twice_m));
                    let a = wigner_d_diag(s, m, beta).unwrap();
                    assert!((a - wigner_sum(s, m, beta)).abs() < 1e-11, "S={s} M={m} β={beta}");
                }
            }
        }
    }

    #[test]
    fn wigner_large_spin_stays_finite() {
        let d = wigner_d_diag(h(300.0), h(10.0), 0.7).unwrap();
        assert!(d.is_finite() && d.abs() <= 1.0 + 1e-9);
        assert!((wigner_d_diag(h(300.0), h(10.0), 0.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn legendre_kernel_degree() {
        // d^S_{MM}(β)^2 has no Legendre component above L = 2S.
        let gl = gauss_legendre(40).unwrap();
        for twice_s in 0..=8i64 {
            for twice_m in (-twice_s..=twice_s).step_by(2) {
                let (s, m) = (HalfInt::from_twice(twice_s), HalfInt::from_twice(twice_m));
                for l in (twice_s as usize + 1)..(twice_s as usize + 6) {
                    let coef: f64 = gl
                        .nodes
                        .iter()
                        .zip(&gl.weights)
                        .map(|(x, w)| {
                            let d = wigner_d_diag(s, m, x.acos()).unwrap();
                            w * d * d * legendre(l, *x)
                        })
                        .sum();
                    assert!(coef.abs() < 1e-10, "S={s} M={m} L={l}: {coef}");
                }
            }
        }
    }

    #[test]
    fn fourier_aliasing_condition() {
        for n in 1..=32usize {
            for q in -64i64..=64 {
                let sum: Complex64 = (0..n)
                    .map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64) * q as f64 / n as f64))
                    .sum::<Complex64>()
                    / n as f64;
                let expect = if q.rem_euclid(n as i64) == 0 { 1.0 } else { 0.0 };
                assert!((sum - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn singlet_weights_are_real() {
        let g = su2_weights(0.0, 0.0, 3, 2, 3).unwrap();
        let gl = gauss_legendre(2).unwrap();
        for b in 0..2 {
            for a in 0..3 {
                for c in 0..3 {
                    let w = g.weights[g.index(b, a, c)];
                    assert!(w.im.abs() < 1e-15);
                    assert!((w.re - gl.weights[b] / 18.0).abs() < 1e-15);
                }
            }
        }
        assert!((g.one_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n_beta_table() {
        assert_eq!(recommended_n_beta(0.0).unwrap(), 2);
        assert_eq!(recommended_n_beta(2.0).unwrap(), 3);
        assert_eq!(recommended_n_beta(6.0).unwrap(), 4);
        assert_eq!(recommended_n_beta(10.0).unwrap(), 11);
        assert!(recommended_n_beta(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn wigner_bounded_and_unit_at_zero(twice_s in 0i64..24, frac in 0.0f64..1.0, beta in 0.0f64..PI) {
            let twice_m = -twice_s + 2 * ((frac * (twice_s + 1) as f64) as i64).min(twice_s);
            let (s, m) = (HalfInt::from_twice(twice_s), HalfInt::from_twice(twice_m));
            prop_assert!((wigner_d_diag(s, m, 0.0).unwrap() - 1.0).abs() < 1e-12);
            prop_assert!(wigner_d_diag(s, m, beta).unwrap().abs() <= 1.0 + 1e-10);
        }
    }
}
