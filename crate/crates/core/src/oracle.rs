//! Dense reference implementations: explicit matrices, exact eigenprojectors
//! and block extraction. Everything here scales as `4^n` and is capped at
//! [`MAX_DENSE_QUBITS`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lcu::BlockEncoding;
use crate::qop::PauliSum;
use crate::sim::{Circuit, Statevector};

pub type DenseOperator = DMatrix<Complex64>;

pub const MAX_DENSE_QUBITS: usize = 14;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const CLUSTER_TOL: f64 = 1e-8;

fn cap(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::DimensionCap { qubits: n, cap: MAX_DENSE_QUBITS });
    }
    Ok(())
}

/// Explicit matrix of a Pauli sum (little-endian basis).
pub fn dense(op: &PauliSum) -> Result<DenseOperator> {
    let n = op.n_qubits();
    cap(n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for (c, p) in op.terms() {
        let (flip, sign, ny) = p.masks();
        let ph = c * Complex64::i().powu(ny);
        for i in 0..dim {
            let v = if (i & sign).count_ones() % 2 == 0 { ph } else { -ph };
            m[(i ^ flip, i)] += v;
        }
    }
    Ok(m)
}

/// Sum of `vv†` over eigenvectors whose eigenvalue is within `tol`.
pub fn exact_projector(op: &DenseOperator, eigenvalue: f64, tol: f64) -> Result<DenseOperator> {
    let eig = op.clone().symmetric_eigen();
    let dim = op.nrows();
    let mut p = DMatrix::zeros(dim, dim);
    let mut found = false;
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if (lam - eigenvalue).abs() <= tol {
            found = true;
            let v = eig.eigenvectors.column(k);
            p += v * v.adjoint();
        }
    }
    if !found {
        return Err(Error::NoEigenvalue(eigenvalue));
    }
    Ok(p)
}

/// Product of exact projectors for commuting `(operator, eigenvalue)` pairs.
pub fn joint_projector(targets: &[(&PauliSum, f64)]) -> Result<DenseOperator> {
    let mut acc: Option<DenseOperator> = None;
    for (op, val) in targets {
        let p = exact_projector(&dense(op)?, *val, CLUSTER_TOL)?;
        acc = Some(match acc {
            None => p,
            Some(a) => a * p,
        });
    }
    acc.ok_or_else(|| crate::error::invalid("no projector targets given"))
}

/// Sorted distinct eigenvalues of a Hermitian matrix.
pub fn distinct_eigenvalues(op: &DenseOperator, tol: f64) -> Vec<f64> {
    let mut ev: Vec<f64> = op.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::new();
    for x in ev {
        if out.last().is_none_or(|l| (x - l).abs() > tol) {
            out.push(x);
        }
    }
    out
}

fn to_vector(s: &Statevector<f64>) -> DVector<Complex64> {
    DVector::from_vec(s.to_complex64())
}

/// Applies a dense operator to a state (unnormalized result).
pub fn apply_dense(op: &DenseOperator, state: &Statevector<f64>) -> Result<DVector<Complex64>> {
    if op.ncols() != state.amplitudes().len() {
        return Err(Error::SizeMismatch { expected: op.ncols(), found: state.amplitudes().len() });
    }
    Ok(op * to_vector(state))
}

/// `P|ψ⟩` for the eigenspace of `op` at `eigenvalue`, unnormalized. Diagonal
/// operators skip the eigensolver and work at any width.
pub fn project_state(op: &PauliSum, eigenvalue: f64, state: &Statevector<f64>) -> Result<Vec<Complex64>> {
    if op.n_qubits() != state.n_qubits() {
        return Err(Error::SizeMismatch { expected: state.n_qubits(), found: op.n_qubits() });
    }
    if op.is_diagonal() {
        return Ok(state
            .to_complex64()
            .iter()
            .enumerate()
            .map(|(i, a)| if (op.diagonal_entry(i).re - eigenvalue).abs() <= CLUSTER_TOL { *a } else { Complex64::default() })
            .collect());
    }
    let p = exact_projector(&dense(op)?, eigenvalue, CLUSTER_TOL)?;
    Ok(apply_dense(&p, state)?.iter().copied().collect())
}

/// Chains [`project_state`] over commuting targets.
pub fn project_state_joint(targets: &[(&PauliSum, f64)], state: &Statevector<f64>) -> Result<Vec<Complex64>> {
    let mut amps = state.to_complex64();
    for (op, val) in targets {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(amps);
        }
        let s = Statevector::from_amplitudes(amps.clone())?;
        amps = project_state(op, *val, &s)?.into_iter().map(|a| a * norm).collect();
    }
    Ok(amps)
}

/// Dense unitary of a circuit, column `j` = image of basis state `j`.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DenseOperator> {
    let n = circuit.width();
    cap(n)?;
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut s = Statevector::<f64>::basis(n, j);
        s.apply(circuit)?;
        for (i, a) in s.to_complex64().into_iter().enumerate() {
            u[(i, j)] = a;
        }
    }
    Ok(u)
}

/// `⟨0_anc|U|0_anc⟩` on the system register, i.e. `A/α`.
pub fn block_extract(be: &BlockEncoding) -> Result<DenseOperator> {
    let width = be.circuit.width();
    cap(width)?;
    let dim = 1usize << be.n_system;
    let mut b = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut s = Statevector::<f64>::basis(width, j);
        s.apply(&be.circuit)?;
        for (i, a) in s.to_complex64().into_iter().take(dim).enumerate() {
            b[(i, j)] = a;
        }
    }
    Ok(b)
}

/// `|⟨a|b⟩|²` of the normalized vectors.
pub fn fidelity_vec(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { expected: a.len(), found: b.len() });
    }
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroProbability);
    }
    let ov: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    Ok(ov.norm_sqr() / (na * nb))
}

pub fn fidelity(a: &Statevector<f64>, b: &Statevector<f64>) -> Result<f64> {
    fidelity_vec(&a.to_complex64(), &b.to_complex64())
}

/// Fidelity of the post-selected output of `be` against the exact joint
/// projection of `state`, plus the success probability.
pub fn projection_fidelity(be: &BlockEncoding, state: &Statevector<f64>, targets: &[(&PauliSum, f64)]) -> Result<(f64, f64)> {
    let want = project_state_joint(targets, state)?;
    let (got, p) = be.apply(state)?;
    Ok((fidelity_vec(&got.to_complex64(), &want)?, p))
}

/// Largest singular value of `a − b`.
pub fn op_norm_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
    let d = a - b;
    d.singular_values().iter().fold(0.0, |m, &x| m.max(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::{jw_number_operator, jw_s2_operator, jw_sz_operator, Pauli, PauliString};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn dense_z() {
        let z = PauliSum::from_terms(1, [(re(1.0), PauliString::single(0, Pauli::Z))]).unwrap();
        let m = dense(&z).unwrap();
        assert_eq!(m[(0, 0)], re(1.0));
        assert_eq!(m[(1, 1)], re(-1.0));
    }

    #[test]
    fn dense_sz_two_orbitals() {
        let m = dense(&jw_sz_operator(2).unwrap()).unwrap();
        let expect = [0.0, 0.5, -0.5, 0.0];
        for (i, e) in expect.iter().enumerate() {
            assert!((m[(i, i)] - re(*e)).norm() < 1e-15);
        }
    }

    #[test]
    fn s2_two_orbital_spectrum() {
        let ev = distinct_eigenvalues(&dense(&jw_s2_operator(2).unwrap()).unwrap(), 1e-9);
        assert_eq!(ev.len(), 2);
        assert!(ev[0].abs() < 1e-12 && (ev[1] - 0.75).abs() < 1e-12);
        let ev = distinct_eigenvalues(&dense(&jw_s2_operator(4).unwrap()).unwrap(), 1e-9);
        for (a, b) in ev.iter().zip([0.0, 0.75, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_projector() {
        let id = DMatrix::<Complex64>::identity(4, 4);
        let p = exact_projector(&id, 1.0, CLUSTER_TOL).unwrap();
        assert!((p - id).norm() < 1e-12);
        assert!(matches!(exact_projector(&DMatrix::identity(2, 2), 3.0, CLUSTER_TOL), Err(Error::NoEigenvalue(_))));
    }

    #[test]
    fn sz_zero_projector_rank_two() {
        let p = exact_projector(&dense(&jw_sz_operator(2).unwrap()).unwrap(), 0.0, CLUSTER_TOL).unwrap();
        assert!((p[(0, 0)] - re(1.0)).norm() < 1e-12);
        assert!((p[(3, 3)] - re(1.0)).norm() < 1e-12);
        assert!(p[(1, 1)].norm() < 1e-12 && p[(2, 2)].norm() < 1e-12);
    }

    #[test]
    fn projectors_commute_and_are_idempotent() {
        let n = dense(&jw_number_operator(4).unwrap()).unwrap();
        let sz = dense(&jw_sz_operator(4).unwrap()).unwrap();
        let s2 = dense(&jw_s2_operator(4).unwrap()).unwrap();
        let ps = [exact_projector(&n, 2.0, CLUSTER_TOL).unwrap(), exact_projector(&sz, 0.0, CLUSTER_TOL).unwrap(), exact_projector(&s2, 0.0, CLUSTER_TOL).unwrap()];
        for (p, (op, val)) in ps.iter().zip([(&n, 2.0), (&sz, 0.0), (&s2, 0.0)]) {
            assert!((p * p - p).norm() < 1e-10);
            assert!((p - p.adjoint()).norm() < 1e-10);
            assert!((op * p - p * Complex64::new(val, 0.0)).norm() < 1e-8);
        }
        for a in &ps {
            for b in &ps {
                assert!((a * b - b * a).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_fast_path_matches_dense() {
        let s = Statevector::<f64>::random(6, 11);
        let op = jw_sz_operator(6).unwrap();
        let fast = project_state(&op, 0.5, &s).unwrap();
        let p = exact_projector(&dense(&op).unwrap(), 0.5, CLUSTER_TOL).unwrap();
        let slow = apply_dense(&p, &s).unwrap();
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fidelity_basics() {
        let a = Statevector::<f64>::basis(2, 1);
        let b = Statevector::<f64>::basis(2, 2);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&a, &b).unwrap().abs() < 1e-15);
        assert!(fidelity_vec(&[re(0.0)], &[re(1.0)]).is_err());
    }

    #[test]
    fn size_cap() {
        assert!(matches!(dense(&PauliSum::identity(15)), Err(Error::DimensionCap { .. })));
    }
}
