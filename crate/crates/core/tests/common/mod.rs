//! Independent dense references built straight from fermionic ladder
//! operators, without going through the Pauli-sum code.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Annihilator of spin-orbital `j` under Jordan–Wigner, occupied = bit set.
pub fn annihilator(n: usize, j: usize) -> M {
    let dim = 1usize << n;
    let mut m = M::zeros(dim, dim);
    for i in 0..dim {
        if i >> j & 1 == 1 {
            let sign = if (i & ((1 << j) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            m[(i ^ (1 << j), i)] = c(sign);
        }
    }
    m
}

pub struct Spin {
    pub n: M,
    pub sz: M,
    pub s_plus: M,
    pub s_minus: M,
    pub sy: M,
    pub s2: M,
}

pub fn spin_operators(n_so: usize) -> Spin {
    let dim = 1usize << n_so;
    let a: Vec<M> = (0..n_so).map(|j| annihilator(n_so, j)).collect();
    let num = |j: usize| a[j].adjoint() * &a[j];
    let mut n = M::zeros(dim, dim);
    let mut sz = M::zeros(dim, dim);
    let mut s_plus = M::zeros(dim, dim);
    for p in 0..n_so / 2 {
        n += num(2 * p) + num(2 * p + 1);
        sz += (num(2 * p) - num(2 * p + 1)) * c(0.5);
        s_plus += a[2 * p].adjoint() * &a[2 * p + 1];
    }
    let s_minus = s_plus.adjoint();
    let sy = (&s_plus - &s_minus) * Complex64::new(0.0, -0.5);
    let s2 = &sz * &sz + &sz + &s_minus * &s_plus;
    Spin { n, sz, s_plus, s_minus, sy, s2 }
}

/// `e^{-iθH}` for Hermitian `H`.
pub fn expm_herm(h: &M, theta: f64) -> M {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = M::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -theta * l)));
    v * d * v.adjoint()
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.norm()))
}

/// Diagonal projector onto basis states whose electron-number parity equals
/// `parity`.
pub fn parity_projector(n_so: usize, parity: u32) -> M {
    let dim = 1usize << n_so;
    M::from_fn(dim, dim, |i, j| if i == j && (i.count_ones() % 2) == parity { c(1.0) } else { c(0.0) })
}

/// Unitary restricted to work qubits (above `n`) starting and ending in |0⟩.
pub fn restrict_low(u: &M, n: usize) -> M {
    let dim = 1usize << n;
    u.view((0, 0), (dim, dim)).into_owned()
}
