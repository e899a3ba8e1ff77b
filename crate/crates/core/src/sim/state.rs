use num_complex::{Complex, Complex64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qop::PauliSum;
use crate::scalar::Scalar;

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};

/// Dense amplitude vector, little-endian (qubit `q` is bit `q`).
///
/// Amplitudes are kept at unit norm; `norm` carries the product of
/// post-selection probabilities accumulated so far.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector<T: Scalar> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
    norm: T,
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

fn c<T: Scalar>(z: Complex64) -> Complex<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

/// Sweeps every index whose bits at `fixed` positions are zero, OR'ed with
/// `base`. `fixed` must be sorted ascending.
fn for_each_free(n: usize, fixed: &[usize], base: usize, mut f: impl FnMut(usize)) {
    let free = n - fixed.len();
    for j in 0..(1usize << free) {
        let mut i = j;
        for &p in fixed {
            let low = i & ((1usize << p) - 1);
            i = low | ((i >> p) << (p + 1));
        }
        f(i | base);
    }
}

impl<T: Scalar> Statevector<T> {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[index] = Complex::new(T::one(), T::zero());
        Self { n_qubits, amps, norm: T::one() }
    }

    /// Normalizes `amps`; its length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(invalid(format!("amplitude count {len} is not a power of two")));
        }
        let mut s = Self { n_qubits: len.trailing_zeros() as usize, amps, norm: T::one() };
        let nrm = s.two_norm();
        if nrm == T::zero() {
            return Err(Error::ZeroProbability);
        }
        for a in &mut s.amps {
            *a = *a / nrm;
        }
        Ok(s)
    }

    /// Gaussian random amplitudes from a seeded ChaCha8 stream, normalized.
    pub fn random(n_qubits: usize, seed: u64) -> Self {
        Self::random_in(n_qubits, seed, |_| true).expect("full space is nonempty")
    }

    /// Random state supported on basis indices accepted by `keep`.
    pub fn random_in(n_qubits: usize, seed: u64, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n_qubits)
            .map(|i| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                if keep(i) {
                    Complex::new(T::lit(re), T::lit(im))
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        Self::from_amplitudes(amps)
    }

    /// Equal-weight superposition over basis indices accepted by `keep`.
    pub fn uniform_in(n_qubits: usize, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let amps = (0..1usize << n_qubits)
            .map(|i| Complex::new(if keep(i) { T::one() } else { T::zero() }, T::zero()))
            .collect();
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.norm
    }

    fn two_norm(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(self.amps.iter().zip(&other.amps).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Tensors `extra` qubits in `|0⟩` above the current ones.
    pub fn extend(&self, extra: usize) -> Self {
        let mut amps = self.amps.clone();
        amps.resize(1 << (self.n_qubits + extra), Complex::new(T::zero(), T::zero()));
        Self { n_qubits: self.n_qubits + extra, amps, norm: self.norm }
    }

    /// Keeps the lowest `n_keep` qubits. The discarded ones must be in `|0⟩`
    /// up to `tol` of probability.
    pub fn truncate(&self, n_keep: usize, tol: f64) -> Result<Self> {
        if n_keep > self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: n_keep });
        }
        let dim = 1usize << n_keep;
        let leak: f64 = self.amps[dim..].iter().map(|a| a.norm_sqr().to_f64().unwrap_or(f64::NAN)).sum();
        if !(leak <= tol) {
            return Err(invalid(format!("discarded qubits carry probability {leak:e}")));
        }
        let mut s = Self::from_amplitudes(self.amps[..dim].to_vec())?;
        s.norm = self.norm;
        Ok(s)
    }

    pub fn apply(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.width() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: circuit.width() });
        }
        for g in circuit.gates() {
            self.apply_gate(g);
        }
        Ok(())
    }

    /// Applies one gate. Indices are trusted (circuits validate on push).
    pub fn apply_gate(&mut self, g: &Gate) {
        let mut cval = 0usize;
        for ctl in &g.controls {
            if ctl.on {
                cval |= 1 << ctl.qubit;
            }
        }
        let mut fixed: Vec<usize> = g.controls.iter().map(|c| c.qubit).collect();
        let m = g.kind.matrix();
        let n = self.n_qubits;
        let amps = &mut self.amps;
        match (g.kind, g.target) {
            (GateKind::GlobalPhase(_), _) | (_, None) => {
                fixed.sort_unstable();
                let p = c::<T>(m[0][0]);
                for_each_free(n, &fixed, cval, |i| amps[i] = amps[i] * p);
            }
            (kind, Some(t)) => {
                fixed.push(t);
                fixed.sort_unstable();
                let tb = 1usize << t;
                let m: [[Complex<T>; 2]; 2] = [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]];
                if kind.is_diagonal() {
                    for_each_free(n, &fixed, cval, |i| {
                        amps[i] = amps[i] * m[0][0];
                        amps[i | tb] = amps[i | tb] * m[1][1];
                    });
                } else {
                    for_each_free(n, &fixed, cval, |i| {
                        let a0 = amps[i];
                        let a1 = amps[i | tb];
                        amps[i] = m[0][0] * a0 + m[0][1] * a1;
                        amps[i | tb] = m[1][0] * a0 + m[1][1] * a1;
                    });
                }
            }
        }
    }

    /// Projects `qubits` onto `|0…0⟩`, renormalizes and returns the
    /// conditional state with the selection probability.
    pub fn postselect(&self, qubits: &[usize]) -> Result<(Self, f64)> {
        let mut mask = 0usize;
        for &q in qubits {
            if q >= self.n_qubits {
                return Err(invalid(format!("qubit {q} outside width {}", self.n_qubits)));
            }
            if mask & (1 << q) != 0 {
                return Err(invalid(format!("qubit {q} listed twice")));
            }
            mask |= 1 << q;
        }
        let mut amps = self.amps.clone();
        let mut p = T::zero();
        for (i, a) in amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = Complex::new(T::zero(), T::zero());
            } else {
                p = p + a.norm_sqr();
            }
        }
        let prob = p.to_f64().unwrap_or(0.0);
        if prob <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        let mut s = Self::from_amplitudes(amps)?;
        s.norm = self.norm * p;
        Ok((s, prob))
    }

    /// `⟨ψ|O|ψ⟩`, returned as a complex number so callers can check the
    /// imaginary residue.
    pub fn expectation_complex(&self, op: &PauliSum) -> Result<Complex64> {
        if op.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: op.n_qubits() });
        }
        let amps: Vec<Complex64> = self.amps.iter().map(|a| Complex64::new(a.re.to_f64().unwrap_or(0.0), a.im.to_f64().unwrap_or(0.0))).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (coef, p) in op.terms() {
            let (flip, sign, ny) = p.masks();
            let iy = Complex64::i().powu(ny);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, a) in amps.iter().enumerate() {
                let v = if (i & sign).count_ones() % 2 == 0 { *a } else { -*a };
                acc += amps[i ^ flip].conj() * v;
            }
            total += coef * iy * acc;
        }
        Ok(total)
    }

    pub fn expectation(&self, op: &PauliSum) -> Result<f64> {
        Ok(self.expectation_complex(op)?.re)
    }

    pub fn to_complex64(&self) -> Vec<Complex64> {
        self.amps.iter().map(|a| Complex64::new(a.re.to_f64().unwrap_or(0.0), a.im.to_f64().unwrap_or(0.0))).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = StateFile { n_qubits: self.n_qubits, amplitudes: self.to_complex64().iter().map(|a| [a.re, a.im]).collect() };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        if file.amplitudes.len() != 1usize << file.n_qubits {
            return Err(Error::SizeMismatch { expected: 1 << file.n_qubits, found: file.amplitudes.len() });
        }
        Self::from_amplitudes(file.amplitudes.iter().map(|a| Complex::new(T::lit(a[0]), T::lit(a[1]))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::{jw_number_operator, jw_s2_operator};
    use crate::sim::gate::Control;

    type S = Statevector<f64>;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = S::zero(1);
        s.apply_gate(&Gate::h(0));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes()[0], Complex64::new(r, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(r, 0.0)));
    }

    #[test]
    fn cnot_on_10() {
        // |10⟩ in text order: qubit 0 set
        let mut s = S::basis(2, 0b01);
        s.apply_gate(&Gate::cnot(0, 1));
        assert!(close(s.amplitudes()[0b11], Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn open_control_fires_on_zero() {
        let mut s = S::zero(2);
        s.apply_gate(&Gate::x(1).with_controls([Control::off(0)]));
        assert!(close(s.amplitudes()[0b10], Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn postselect_bell() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = S::from_amplitudes(vec![Complex64::new(r, 0.0), Complex64::default(), Complex64::default(), Complex64::new(r, 0.0)]).unwrap();
        let (post, p) = s.postselect(&[0]).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!(close(post.amplitudes()[0], Complex64::new(1.0, 0.0)));
        assert!((post.norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn postselect_zero_probability() {
        let s = S::basis(1, 1);
        assert!(matches!(s.postselect(&[0]), Err(Error::ZeroProbability)));
    }

    #[test]
    fn expectations() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s2 = jw_s2_operator(4).unwrap();
        // one electron in each spatial orbital, opposite spins
        let pair = |sign: f64| {
            let mut v = vec![Complex64::default(); 16];
            v[0b1001] = Complex64::new(r, 0.0);
            v[0b0110] = Complex64::new(sign * r, 0.0);
            S::from_amplitudes(v).unwrap().expectation(&s2).unwrap()
        };
        let (a, b) = (pair(1.0), pair(-1.0));
        assert!(a.min(b).abs() < 1e-12 && (a.max(b) - 2.0).abs() < 1e-12);
        assert!(S::basis(2, 0b11).expectation(&jw_s2_operator(2).unwrap()).unwrap().abs() < 1e-12);
        let full = S::basis(2, 0b11);
        assert!((full.expectation(&jw_number_operator(2).unwrap()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let s = S::random(3, 7);
        let back = S::from_json(&s.to_json().unwrap()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn single_precision_tracks_double() {
        let mut a = Statevector::<f32>::random(4, 3);
        let mut b = S::random(4, 3);
        for g in [Gate::h(0), Gate::cnot(0, 3), Gate::rz(2, 0.4), Gate::ry(1, -1.2)] {
            a.apply_gate(&g);
            b.apply_gate(&g);
        }
        for (x, y) in a.to_complex64().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-5);
        }
    }
}
