//! Complementary polynomial `Q` with `|P|² + |Q|² = 1` on the unit circle,
//! by spectral factorization of `1 − |P|²` followed by a Gauss–Newton polish
//! of the autocorrelation equations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::poly::ComplexPoly;
use crate::error::{invalid, Error, Result};

/// Targets are shrunk by this factor so that `1 − |P|²` has no roots on the
/// circle when `|P|` touches 1.
pub const PRESCALE: f64 = 1.0 - 1e-12;

const CHECK_SAMPLES: usize = 4096;
const TOL: f64 = 1e-9;

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::default();
    let mut dp = Complex64::default();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of `Σ c_k z^k` from the companion matrix, polished by Newton steps.
fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::new(m);
    let (_, t) = schur.unpack();
    (0..n)
        .map(|i| {
            let mut z = t[(i, i)];
            for _ in 0..3 {
                let (p, dp) = horner(coeffs, z);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                if !step.is_finite() || step.norm() > 1e-3 * z.norm().max(1.0) {
                    break;
                }
                z -= step;
            }
            z
        })
        .collect()
}

/// Autocorrelation residual `Σ_k q_{k+j} q̄_k − t_j` stacked as real numbers.
fn residual(q: &[Complex64], t: &[Complex64]) -> DVector<f64> {
    let n = q.len();
    let mut r = DVector::zeros(2 * n - 1);
    for j in 0..n {
        let s: Complex64 = (0..n - j).map(|k| q[k + j] * q[k].conj()).sum::<Complex64>() - t[j];
        r[j] = s.re;
        if j > 0 {
            r[n - 1 + j] = s.im;
        }
    }
    r
}

fn jacobian(q: &[Complex64]) -> DMatrix<f64> {
    let n = q.len();
    let i = Complex64::i();
    let mut jac = DMatrix::zeros(2 * n - 1, 2 * n);
    for j in 0..n {
        for m in 0..n {
            let lo = if m >= j { q[m - j].conj() } else { Complex64::default() };
            let hi = if m + j < n { q[m + j] } else { Complex64::default() };
            let du = lo + hi;
            let dv = i * lo - i * hi;
            jac[(j, m)] = du.re;
            jac[(j, n + m)] = dv.re;
            if j > 0 {
                jac[(n - 1 + j, m)] = du.im;
                jac[(n - 1 + j, n + m)] = dv.im;
            }
        }
    }
    jac
}

fn polish(q: &mut [Complex64], t: &[Complex64]) {
    let n = q.len();
    let mut best = residual(q, t).amax();
    for _ in 0..30 {
        if best < 1e-15 {
            break;
        }
        let r = residual(q, t);
        let jac = jacobian(q);
        let Ok(step) = jac.svd(true, true).solve(&(-r), 1e-13) else { break };
        let trial: Vec<Complex64> = (0..n).map(|k| q[k] + Complex64::new(step[k], step[n + k])).collect();
        let tr = residual(&trial, t).amax();
        if tr >= best {
            break;
        }
        q.copy_from_slice(&trial);
        best = tr;
    }
}

/// Worst violation of `|P|² + |Q|² = 1` over the check grid.
pub fn unitarity_error(p: &ComplexPoly, q: &ComplexPoly) -> f64 {
    p.sample_circle(CHECK_SAMPLES)
        .iter()
        .zip(q.sample_circle(CHECK_SAMPLES))
        .fold(0.0, |m, (a, b)| m.max((a.norm_sqr() + b.norm_sqr() - 1.0).abs()))
}

/// Returns `Q` of the same degree as `P` such that `(P, Q)` is the first
/// column of a unitary symbol. `P` must satisfy `|P| ≤ 1` on the circle; pass
/// it through [`PRESCALE`] first if it touches 1.
pub fn complementary_poly(p: &ComplexPoly) -> Result<ComplexPoly> {
    let max = p.max_on_circle(2048);
    if max > 1.0 + TOL {
        return Err(invalid(format!("polynomial exceeds 1 on the unit circle (max {max:.3e})")));
    }
    let d = p.degree();
    let a = p.autocorrelation();
    let mut t: Vec<Complex64> = a.iter().map(|x| -x).collect();
    t[0] += 1.0;
    let scale = t.iter().fold(0.0, |m: f64, x| m.max(x.norm()));
    if scale < 1e-10 {
        return Ok(ComplexPoly::zero(d));
    }

    // z^d (1 − P(z)P̄(1/z)) as an ordinary polynomial of degree 2d.
    let mut lc = vec![Complex64::default(); 2 * d + 1];
    lc[d] = t[0];
    for j in 1..=d {
        lc[d + j] = t[j];
        lc[d - j] = t[j].conj();
    }
    let small = 1e-14 * scale;
    let zeros_at_origin = lc.iter().take_while(|c| c.norm() <= small).count();
    let top = lc.iter().rposition(|c| c.norm() > small).expect("nonzero polynomial");
    let mut inside: Vec<Complex64> = roots(&lc[zeros_at_origin..=top]);
    // Roots pair up as (r, 1/r̄); the smaller half belongs to Q. Sorting
    // keeps a near-circle double root split one per side.
    inside.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    let n_origin = zeros_at_origin.div_ceil(2);
    inside.truncate((inside.len() / 2).min(d.saturating_sub(n_origin)));
    for _ in 0..n_origin {
        inside.push(Complex64::default());
    }

    // Expanding Π(z − r) directly cancels catastrophically when roots
    // cluster; evaluate on the circle in the log domain and transform back.
    let m = (2 * (d + 1)).next_power_of_two();
    let zs: Vec<Complex64> = (0..m).map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64)).collect();
    let logs: Vec<Complex64> = zs.iter().map(|z| inside.iter().map(|r| (z - r).ln()).sum()).collect();
    let shift = logs.iter().fold(f64::NEG_INFINITY, |a, l| a.max(l.re));
    let vals: Vec<Complex64> = logs.iter().map(|l| (l - shift).exp()).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (z, v) in zs.iter().zip(&vals) {
        let l = 1.0 - p.eval(*z).norm_sqr();
        num += l * v.norm_sqr();
        den += v.norm_sqr() * v.norm_sqr();
    }
    let k = if den > 0.0 { (num / den).max(0.0).sqrt() } else { 0.0 };
    let mut q: Vec<Complex64> = (0..=d)
        .map(|c| zs.iter().zip(&vals).map(|(z, v)| v * z.powi(-(c as i32))).sum::<Complex64>() * (k / m as f64))
        .collect();
    polish(&mut q, &t);

    let mut q = ComplexPoly::new(q);
    let at_one = q.eval(Complex64::new(1.0, 0.0));
    if at_one.norm() > 1e-8 {
        q = q.scale(at_one.conj() / at_one.norm());
    }
    let err = unitarity_error(p, &q);
    if err > TOL {
        let min_gap = p.sample_circle(CHECK_SAMPLES).iter().fold(f64::INFINITY, |m, v| m.min(1.0 - v.norm_sqr()));
        return Err(Error::IllConditioned { diagnostic: min_gap });
    }
    Ok(q)
}
