//! Layer-stripping phase finder for the sequence
//! `R̃(θ_d,φ_d,0)·CU ⋯ R̃(θ_1,φ_1,0)·CU·R̃(θ_0,φ_0,λ)`, where the `|0⟩`-controlled
//! signal has symbol `diag(z, 1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::ComplexPoly;
use crate::error::{invalid, Error, Result};

const RESIDUAL_TOL: f64 = 1e-8;
const RENORMALIZE_EVERY: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSequence {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub lambda: f64,
}

impl PhaseSequence {
    pub fn degree(&self) -> usize {
        self.thetas.len() - 1
    }
}

/// `[[e^{i(λ+φ)}cosθ, e^{iφ}sinθ], [e^{iλ}sinθ, −cosθ]]`.
pub fn rotation_matrix(theta: f64, phi: f64, lambda: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [
        [Complex64::from_polar(c, lambda + phi), Complex64::from_polar(s, phi)],
        [Complex64::from_polar(s, lambda), Complex64::new(-c, 0.0)],
    ]
}

/// First column `(P, Q)` of the symbol of a phase sequence.
pub fn reconstruct(ph: &PhaseSequence) -> (ComplexPoly, ComplexPoly) {
    let r = rotation_matrix(ph.thetas[0], ph.phis[0], ph.lambda);
    let mut p = vec![r[0][0]];
    let mut q = vec![r[1][0]];
    for k in 1..ph.thetas.len() {
        // diag(z, 1): shift P up one degree.
        p.insert(0, Complex64::default());
        q.push(Complex64::default());
        let r = rotation_matrix(ph.thetas[k], ph.phis[k], 0.0);
        let (np, nq): (Vec<_>, Vec<_>) = p.iter().zip(&q).map(|(a, b)| (r[0][0] * a + r[0][1] * b, r[1][0] * a + r[1][1] * b)).unzip();
        p = np;
        q = nq;
    }
    (ComplexPoly::new(p), ComplexPoly::new(q))
}

/// Angles whose sequence has `(P, Q)` as the first column of its symbol.
/// Requires `|P|² + |Q|² = 1` on the unit circle.
pub fn find_phases(p: &ComplexPoly, q: &ComplexPoly) -> Result<PhaseSequence> {
    let d = p.degree().max(q.degree());
    let mut a = p.padded(d).coeffs;
    let mut b = q.padded(d).coeffs;
    let norm0: f64 = a.iter().chain(&b).map(|x| x.norm_sqr()).sum();
    if (norm0 - 1.0).abs() > 1e-6 {
        return Err(invalid(format!("P and Q are not complementary (Σ|p_k|²+|q_k|² = {norm0})")));
    }
    let mut thetas = vec![0.0; d + 1];
    let mut phis = vec![0.0; d + 1];
    for k in (1..=d).rev() {
        let (pk, qk) = (a[k], b[k]);
        let (theta, phi) = if pk.norm() + qk.norm() > 1e-12 {
            (qk.norm().atan2(pk.norm()), pk.arg() - qk.arg())
        } else {
            // Leading pair vanished; use the constant terms instead.
            (a[0].norm().atan2(b[0].norm()), a[0].arg() - (-b[0]).arg())
        };
        thetas[k] = theta;
        phis[k] = phi;
        // R̃(θ,φ,0)† = [[e^{−iφ}c, s], [e^{−iφ}s, −c]]
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, -phi);
        let top: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| e * c * x + s * y).collect();
        let bot: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| e * s * x - c * y).collect();
        // top / z and drop the (now zero) leading bottom coefficient.
        a = top[1..=k].to_vec();
        b = bot[..k].to_vec();
        if (d - k + 1).is_multiple_of(RENORMALIZE_EVERY) {
            let n: f64 = a.iter().chain(&b).map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            a.iter_mut().chain(b.iter_mut()).for_each(|x| *x /= n);
        }
    }
    let (p0, q0) = (a[0], b[0]);
    thetas[0] = q0.norm().atan2(p0.norm());
    let lambda = if q0.norm() > 1e-15 { q0.arg() } else { 0.0 };
    phis[0] = if p0.norm() > 1e-15 { p0.arg() - lambda } else { 0.0 };
    let ph = PhaseSequence { thetas, phis, lambda };
    let (rp, _) = reconstruct(&ph);
    let residual = rp.max_coeff_diff(p);
    if residual > RESIDUAL_TOL {
        return Err(Error::NonConvergence { residual });
    }
    Ok(ph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gqsp::complement::{complementary_poly, unitarity_error};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_polynomial() {
        let ph = find_phases(&ComplexPoly::constant(c(1.0)), &ComplexPoly::constant(c(0.0))).unwrap();
        assert_eq!(ph.degree(), 0);
        assert!(ph.thetas[0].abs() < 1e-15 && ph.phis[0].abs() < 1e-15 && ph.lambda.abs() < 1e-15);
    }

    #[test]
    fn symbol_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ph = PhaseSequence {
            thetas: (0..8).map(|_| rng.random_range(-3.0..3.0)).collect(),
            phis: (0..8).map(|_| rng.random_range(-3.0..3.0)).collect(),
            lambda: 0.4,
        };
        let (p, q) = reconstruct(&ph);
        assert!(unitarity_error(&p, &q) < 1e-12);
    }

    #[test]
    fn round_trip_from_random_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [1, 2, 6, 17] {
            let ph = PhaseSequence {
                thetas: (0..=d).map(|_| rng.random_range(0.1..1.4)).collect(),
                phis: (0..=d).map(|_| rng.random_range(-3.0..3.0)).collect(),
                lambda: rng.random_range(-3.0..3.0),
            };
            let (p, q) = reconstruct(&ph);
            let found = find_phases(&p, &q).unwrap();
            let (p2, q2) = reconstruct(&found);
            assert!(p2.max_coeff_diff(&p) < 1e-10);
            assert!(q2.max_coeff_diff(&q) < 1e-10);
        }
    }

    #[test]
    fn round_trip_through_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ComplexPoly::new((0..7).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect());
        let p = p.scale(c(0.95 / p.max_on_circle(4096)));
        let q = complementary_poly(&p).unwrap();
        let (p2, _) = reconstruct(&find_phases(&p, &q).unwrap());
        assert!(p2.max_coeff_diff(&p) < 1e-9);
    }

    #[test]
    fn rejects_non_complementary() {
        assert!(find_phases(&ComplexPoly::constant(c(0.5)), &ComplexPoly::constant(c(0.5))).is_err());
    }
}
