use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Polynomial `Σ c_k z^k` with complex coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly {
    pub coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![Complex64::default()] } else { coeffs };
        ComplexPoly { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        ComplexPoly { coeffs: vec![c] }
    }

    pub fn zero(degree: usize) -> Self {
        ComplexPoly { coeffs: vec![Complex64::default(); degree + 1] }
    }

    /// Nominal degree (length − 1), including trailing zero coefficients.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// Values at `n` equispaced points of the unit circle, starting at `z = 1`.
    pub fn sample_circle(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| self.eval(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))).collect()
    }

    pub fn max_on_circle(&self, n: usize) -> f64 {
        self.sample_circle(n).iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn scale(&self, s: Complex64) -> ComplexPoly {
        ComplexPoly { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn mul(&self, other: &ComplexPoly) -> ComplexPoly {
        let mut out = vec![Complex64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly { coeffs: out }
    }

    /// Pads with zeros up to `degree`.
    pub fn padded(&self, degree: usize) -> ComplexPoly {
        let mut c = self.coeffs.clone();
        if c.len() < degree + 1 {
            c.resize(degree + 1, Complex64::default());
        }
        ComplexPoly { coeffs: c }
    }

    /// Largest coefficient difference after padding both to equal length.
    pub fn max_coeff_diff(&self, other: &ComplexPoly) -> f64 {
        let d = self.degree().max(other.degree());
        let (a, b) = (self.padded(d), other.padded(d));
        a.coeffs.iter().zip(&b.coeffs).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    /// `a_j = Σ_k c_{k+j} c̄_k` for `j = 0..=d`, the Fourier coefficients of
    /// `|P(e^{iφ})|²` at non-negative frequencies.
    pub fn autocorrelation(&self) -> Vec<Complex64> {
        let n = self.coeffs.len();
        (0..n).map(|j| (0..n - j).map(|k| self.coeffs[k + j] * self.coeffs[k].conj()).sum()).collect()
    }
}

/// Coefficients `c_k = e^{i2πk·o/N_φ}/N_φ`, `k = 0..N_φ−1`. Evaluated on the
/// signal `U = e^{−i2πÔ/N_φ}` this is the uniform Fourier projector onto
/// `Ô = o`.
pub fn projector_poly(target: f64, n_phi: usize) -> crate::Result<ComplexPoly> {
    if n_phi == 0 {
        return Err(crate::error::invalid("node count must be at least 1"));
    }
    let n = n_phi as f64;
    Ok(ComplexPoly {
        coeffs: (0..n_phi).map(|k| Complex64::from_polar(1.0 / n, 2.0 * PI * k as f64 * target / n)).collect(),
    })
}
