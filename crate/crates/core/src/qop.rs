//! Pauli-string algebra and the Jordan–Wigner images of the particle-number,
//! spin-projection and total-spin operators.
//!
//! Spin-orbital `2p` carries α spin and `2p + 1` carries β spin; qubit `j`
//! holds the occupation of spin-orbital `j` (occupied = `|1⟩`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Coefficients with modulus below this are dropped after arithmetic.
pub const PRUNE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Product `self · other` as `(phase, result)`; `None` is the identity.
    fn mul(self, other: Pauli) -> (Complex64, Option<Pauli>) {
        use Pauli::*;
        let i = Complex64::i();
        match (self, other) {
            (a, b) if a == b => (Complex64::new(1.0, 0.0), None),
            (X, Y) => (i, Some(Z)),
            (Y, X) => (-i, Some(Z)),
            (Y, Z) => (i, Some(X)),
            (Z, Y) => (-i, Some(X)),
            (Z, X) => (i, Some(Y)),
            (X, Z) => (-i, Some(Y)),
            _ => unreachable!(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis; the empty map is the identity.
///
/// Ordering is lexicographic over `(qubit, axis)` pairs, which fixes the
/// canonical term order of a [`PauliSum`].
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    ops: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        let mut ops = BTreeMap::new();
        ops.insert(qubit, p);
        Self { ops }
    }

    /// Builds a string from `(qubit, pauli)` pairs, rejecting repeated qubits.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut ops = BTreeMap::new();
        for (q, p) in pairs {
            if ops.insert(q, p).is_some() {
                return Err(invalid(format!("qubit {q} appears twice in a Pauli string")));
            }
        }
        Ok(Self { ops })
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.ops.iter().map(|(&q, &p)| (q, p))
    }

    pub fn weight(&self) -> usize {
        self.ops.len()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.keys().next_back().copied()
    }

    /// True when the string contains only `Z` factors.
    pub fn is_diagonal(&self) -> bool {
        self.ops.values().all(|&p| p == Pauli::Z)
    }

    /// Product `self · other` with its phase.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        let mut phase = Complex64::new(1.0, 0.0);
        let mut ops = self.ops.clone();
        for (&q, &p) in &other.ops {
            match ops.get(&q).copied() {
                None => {
                    ops.insert(q, p);
                }
                Some(a) => {
                    let (ph, r) = a.mul(p);
                    phase *= ph;
                    match r {
                        Some(r) => {
                            ops.insert(q, r);
                        }
                        None => {
                            ops.remove(&q);
                        }
                    }
                }
            }
        }
        (phase, PauliString { ops })
    }

    /// Bit masks describing the action on computational basis states:
    /// `P|i⟩ = i^ny · (-1)^popcount(i & sign) · |i ^ flip⟩`.
    pub fn masks(&self) -> (usize, usize, u32) {
        let (mut flip, mut sign, mut ny) = (0usize, 0usize, 0u32);
        for (&q, &p) in &self.ops {
            let bit = 1usize << q;
            match p {
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    ny += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        (flip, sign, ny)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, p) in self.ops() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", p.symbol(), q)?;
        }
        Ok(())
    }
}

/// Weighted sum of Pauli strings on a fixed number of qubits.
///
/// Terms are kept canonical: no duplicate strings and no coefficients below
/// [`PRUNE_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(Complex64::new(1.0, 0.0), PauliString::identity()).expect("identity fits");
        s
    }

    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (Complex64, PauliString)>,
    ) -> Result<Self> {
        let mut s = Self::zero(n_qubits);
        for (c, p) in terms {
            s.add_term(c, p)?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Complex64, &PauliString)> + '_ {
        self.terms.iter().map(|(p, &c)| (c, p))
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    /// Accumulates `c · p`, merging with an existing equal string.
    pub fn add_term(&mut self, c: Complex64, p: PauliString) -> Result<()> {
        if let Some(q) = p.max_qubit() {
            if q >= self.n_qubits {
                return Err(invalid(format!(
                    "qubit index {q} out of range for {} qubits",
                    self.n_qubits
                )));
            }
        }
        let entry = self.terms.entry(p).or_default();
        *entry += c;
        self.prune();
        Ok(())
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    fn check_size(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = self.clone();
        for (p, &c) in &other.terms {
            *out.terms.entry(p.clone()).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for (pa, &ca) in &self.terms {
            for (pb, &cb) in &other.terms {
                let (ph, p) = pa.mul(pb);
                *out.terms.entry(p).or_default() += ca * cb * ph;
            }
        }
        out.prune();
        Ok(out)
    }

    /// `Σ |w_k|`, the LCU normalization of this expansion.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// All coefficients real (every Pauli string is itself Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(PauliString::is_diagonal)
    }

    /// Diagonal entry `⟨i|O|i⟩` for a diagonal operator.
    pub fn diagonal_entry(&self, basis_index: usize) -> Complex64 {
        self.terms
            .iter()
            .filter(|(p, _)| p.is_diagonal())
            .map(|(p, &c)| {
                let (_, sign, _) = p.masks();
                if (basis_index & sign).count_ones().is_multiple_of(2) {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// Serializes in the one-term-per-line text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (p, c) in &self.terms {
            s.push_str(&format!("{} {} {}\n", c.re, c.im, p));
        }
        s
    }

    /// Parses the text format. `n_qubits = None` infers the width from the
    /// largest index present.
    pub fn from_text(text: &str, n_qubits: Option<usize>) -> Result<PauliSum> {
        let mut parsed = Vec::new();
        let mut width = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut fields = line.split_whitespace();
            let re: f64 = fields
                .next()
                .ok_or_else(|| err("missing real part".into()))?
                .parse()
                .map_err(|e| err(format!("real part: {e}")))?;
            let im: f64 = fields
                .next()
                .ok_or_else(|| err("missing imaginary part".into()))?
                .parse()
                .map_err(|e| err(format!("imaginary part: {e}")))?;
            let mut pairs = Vec::new();
            for tok in fields {
                if tok == "I" {
                    continue;
                }
                let (head, idx) = tok.split_at(1);
                let p = match head {
                    "X" => Pauli::X,
                    "Y" => Pauli::Y,
                    "Z" => Pauli::Z,
                    _ => return Err(err(format!("unknown Pauli factor `{tok}`"))),
                };
                let q: usize = idx.parse().map_err(|e| err(format!("index in `{tok}`: {e}")))?;
                width = width.max(q + 1);
                pairs.push((q, p));
            }
            let string = PauliString::from_pairs(pairs).map_err(|e| err(e.to_string()))?;
            parsed.push((Complex64::new(re, im), string));
        }
        let n = match n_qubits {
            Some(n) if n < width => {
                return Err(invalid(format!("operator touches qubit {} but width is {n}", width - 1)))
            }
            Some(n) => n,
            None => width,
        };
        PauliSum::from_terms(n, parsed)
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliSum::from_text(s, None)
    }
}

fn check_n_so(n_so: usize) -> Result<()> {
    if n_so == 0 || !n_so.is_multiple_of(2) {
        return Err(invalid(format!("number of spin-orbitals must be even and positive, got {n_so}")));
    }
    Ok(())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `N̂ = (N_SO/2)·I − ½ Σ_j Z_j`.
pub fn jw_number_operator(n_so: usize) -> Result<PauliSum> {
    check_n_so(n_so)?;
    let mut s = PauliSum::zero(n_so);
    s.add_term(re(n_so as f64 / 2.0), PauliString::identity())?;
    for j in 0..n_so {
        s.add_term(re(-0.5), PauliString::single(j, Pauli::Z))?;
    }
    Ok(s)
}

/// `Ŝz = ¼ Σ_p (Z_{2p+1} − Z_{2p})`.
pub fn jw_sz_operator(n_so: usize) -> Result<PauliSum> {
    check_n_so(n_so)?;
    let mut s = PauliSum::zero(n_so);
    for p in 0..n_so / 2 {
        s.add_term(re(0.25), PauliString::single(2 * p + 1, Pauli::Z))?;
        s.add_term(re(-0.25), PauliString::single(2 * p, Pauli::Z))?;
    }
    Ok(s)
}

/// `σ± = (X ± iY)/2` on one qubit.
fn sigma(n: usize, q: usize, plus: bool) -> PauliSum {
    let sgn = if plus { 1.0 } else { -1.0 };
    PauliSum::from_terms(
        n,
        [
            (re(0.5), PauliString::single(q, Pauli::X)),
            (Complex64::new(0.0, 0.5 * sgn), PauliString::single(q, Pauli::Y)),
        ],
    )
    .expect("qubit in range")
}

/// Jordan–Wigner image of `Ŝ²` written with local projections
/// `D_p = Z_{2p+1} − Z_{2p}` and pair-exchange terms.
pub fn jw_s2_operator(n_so: usize) -> Result<PauliSum> {
    check_n_so(n_so)?;
    let n = n_so;
    let orbitals = n_so / 2;
    let mut s = PauliSum::zero(n);
    let z = |q: usize| PauliString::single(q, Pauli::Z);
    for p in 0..orbitals {
        s.add_term(re(3.0 / 8.0), PauliString::identity())?;
        let zz = PauliString::from_pairs([(2 * p, Pauli::Z), (2 * p + 1, Pauli::Z)])?;
        s.add_term(re(-3.0 / 8.0), zz)?;
    }
    let local = |p: usize| {
        PauliSum::from_terms(n, [(re(1.0), z(2 * p + 1)), (re(-1.0), z(2 * p))]).expect("in range")
    };
    for p in 0..orbitals {
        for q in p + 1..orbitals {
            s = s.add(&local(p).mul(&local(q))?.scale(re(1.0 / 8.0)))?;
            let forward = sigma(n, 2 * p, true)
                .mul(&sigma(n, 2 * p + 1, false))?
                .mul(&sigma(n, 2 * q, false))?
                .mul(&sigma(n, 2 * q + 1, true))?;
            let backward = sigma(n, 2 * p, false)
                .mul(&sigma(n, 2 * p + 1, true))?
                .mul(&sigma(n, 2 * q, true))?
                .mul(&sigma(n, 2 * q + 1, false))?;
            s = s.add(&forward)?.add(&backward)?;
        }
    }
    Ok(s)
}

/// Symmetry operator selector used across the projector builders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Number,
    SpinZ,
    TotalSpin,
}

impl Symmetry {
    pub fn operator(self, n_so: usize) -> Result<PauliSum> {
        match self {
            Symmetry::Number => jw_number_operator(n_so),
            Symmetry::SpinZ => jw_sz_operator(n_so),
            Symmetry::TotalSpin => jw_s2_operator(n_so),
        }
    }

    /// Exact eigenvalue list on the full Fock space of `n_so` spin-orbitals.
    pub fn spectrum(self, n_so: usize) -> Vec<f64> {
        let half = n_so / 2;
        match self {
            Symmetry::Number => (0..=n_so).map(|k| k as f64).collect(),
            Symmetry::SpinZ => (0..=n_so).map(|k| (k as f64 - half as f64) / 2.0).collect(),
            Symmetry::TotalSpin => (0..=half)
                .map(|twice_s| {
                    let s = twice_s as f64 / 2.0;
                    s * (s + 1.0)
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(q: usize) -> PauliString {
        PauliString::single(q, Pauli::Z)
    }

    #[test]
    fn number_operator_two_orbitals() {
        let n = jw_number_operator(2).unwrap();
        assert_eq!(n.len(), 3);
        assert_eq!(n.coefficient(&PauliString::identity()), re(1.0));
        assert_eq!(n.coefficient(&z(0)), re(-0.5));
        assert_eq!(n.coefficient(&z(1)), re(-0.5));
    }

    #[test]
    fn term_counts() {
        for n_so in [2usize, 4, 6, 8, 10] {
            assert_eq!(jw_number_operator(n_so).unwrap().len(), n_so + 1);
            assert_eq!(jw_sz_operator(n_so).unwrap().len(), n_so);
            assert_eq!(jw_s2_operator(n_so).unwrap().len(), (3 * n_so * n_so - 5 * n_so) / 2 + 1);
        }
        assert_eq!(jw_s2_operator(4).unwrap().len(), 15);
    }

    #[test]
    fn sz_two_orbitals() {
        let sz = jw_sz_operator(2).unwrap();
        assert_eq!(sz.coefficient(&z(1)), re(0.25));
        assert_eq!(sz.coefficient(&z(0)), re(-0.25));
        // orbital 0 occupied -> basis index 1
        assert!((sz.diagonal_entry(0b01).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn odd_or_zero_sizes_rejected() {
        assert!(jw_number_operator(3).is_err());
        assert!(jw_sz_operator(0).is_err());
        assert!(jw_s2_operator(5).is_err());
    }

    #[test]
    fn pauli_products() {
        let (ph, p) = z(0).mul(&z(0));
        assert_eq!(ph, re(1.0));
        assert!(p.is_identity());
        let (ph, p) = PauliString::single(0, Pauli::X).mul(&PauliString::single(0, Pauli::Y));
        assert_eq!(ph, Complex64::i());
        assert_eq!(p, z(0));
    }

    #[test]
    fn sum_arithmetic_cancels_and_prunes() {
        let a = jw_sz_operator(4).unwrap();
        assert!(a.sub(&a).unwrap().is_empty());
        let sq = PauliSum::from_terms(1, [(re(1.0), z(0))]).unwrap();
        let prod = sq.mul(&sq).unwrap();
        assert_eq!(prod.len(), 1);
        assert_eq!(prod.coefficient(&PauliString::identity()), re(1.0));
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = PauliSum::identity(2);
        let b = PauliSum::identity(3);
        assert!(matches!(a.add(&b), Err(Error::SizeMismatch { .. })));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn symmetry_operators_are_hermitian() {
        for n_so in [2, 4, 6] {
            for sym in [Symmetry::Number, Symmetry::SpinZ, Symmetry::TotalSpin] {
                assert!(sym.operator(n_so).unwrap().is_hermitian(1e-14));
            }
        }
    }

    #[test]
    fn text_format_round_trip() {
        let s2 = jw_s2_operator(4).unwrap();
        let back = PauliSum::from_text(&s2.to_text(), Some(4)).unwrap();
        assert_eq!(back, s2);
        let parsed: PauliSum = "0.25 0.0 Z1\n1.0 0.0 I\n".parse().unwrap();
        assert_eq!(parsed.n_qubits(), 2);
        assert_eq!(parsed.coefficient(&PauliString::identity()), re(1.0));
    }

    #[test]
    fn parser_rejects_duplicate_indices() {
        assert!(PauliSum::from_text("1.0 0.0 X0 Z0\n", None).is_err());
        assert!(PauliSum::from_text("1.0 0.0 Q0\n", None).is_err());
        assert!(PauliSum::from_text("1.0 Z0\n", None).is_err());
    }

    #[test]
    fn spectra() {
        assert_eq!(Symmetry::SpinZ.spectrum(4), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(Symmetry::TotalSpin.spectrum(4), vec![0.0, 0.75, 2.0]);
        assert_eq!(Symmetry::Number.spectrum(2), vec![0.0, 1.0, 2.0]);
    }
}
