//! Dense-matrix oracle built from Kronecker products, independent of the
//! bitmask algebra under test.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use trotter_core::hamiltonian::QubitHamiltonian;
use trotter_core::pauli::{PauliAxis, PauliString, PauliTerm};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(a: PauliAxis) -> DMatrix<Complex64> {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    let i = c(0.0, 1.0);
    match a {
        PauliAxis::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        PauliAxis::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        PauliAxis::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        PauliAxis::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `P_{n-1} ⊗ … ⊗ P_0`, so qubit 0 is the least significant index bit.
pub fn string_matrix(s: &PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in (0..s.width()).rev() {
        m = m.kronecker(&single(s.axis(q)));
    }
    m
}

pub fn terms_matrix(width: usize, terms: &[PauliTerm]) -> DMatrix<Complex64> {
    let d = 1 << width;
    let mut m = DMatrix::zeros(d, d);
    for t in terms {
        m += string_matrix(&t.string) * t.coefficient;
    }
    m
}

pub fn comm(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

/// Error operator from nested matrix commutators.
pub fn dense_error_operator(h: &QubitHamiltonian, dt: f64) -> DMatrix<Complex64> {
    let n = h.qubit_count();
    let mats: Vec<_> = h
        .terms()
        .iter()
        .map(|t| string_matrix(&t.string) * t.coefficient)
        .collect();
    let d = 1 << n;
    let mut v = DMatrix::zeros(d, d);
    for b in 0..mats.len() {
        for g in 0..b {
            let inner = comm(&mats[b], &mats[g]);
            for (a, m) in mats.iter().enumerate().take(b + 1) {
                let f = if a == b { 0.5 } else { 1.0 };
                v += comm(&(m * c(f, 0.0)), &inner);
            }
        }
    }
    v * c(-dt * dt / 12.0, 0.0)
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().fold(0.0, |m, x| m.max(x.norm()))
}

/// `exp(-i t H)` for Hermitian `H` by eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let u = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * t)));
    u * d * u.adjoint()
}

pub fn axis() -> impl Strategy<Value = PauliAxis> {
    prop_oneof![
        Just(PauliAxis::I),
        Just(PauliAxis::X),
        Just(PauliAxis::Y),
        Just(PauliAxis::Z)
    ]
}

pub fn string(width: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(axis(), width).prop_map(|axes| PauliString::from_axes(&axes))
}

pub fn term(width: usize) -> impl Strategy<Value = PauliTerm> {
    (-1.0f64..1.0, -1.0f64..1.0, string(width)).prop_map(|(re, im, s)| PauliTerm::new(c(re, im), s))
}

/// Random real Hamiltonian with distinct non-identity strings.
pub fn hamiltonian(width: usize, max_terms: usize) -> impl Strategy<Value = QubitHamiltonian> {
    prop::collection::vec((0.05f64..1.0, any::<bool>(), string(width)), 1..=max_terms)
        .prop_filter_map("need distinct non-identity strings", move |raw| {
            let mut seen = std::collections::HashSet::new();
            let terms: Vec<PauliTerm> = raw
                .into_iter()
                .filter(|(_, _, s)| !s.is_identity() && seen.insert(s.clone()))
                .map(|(m, neg, s)| PauliTerm::real(if neg { -m } else { m }, s))
                .collect();
            if terms.is_empty() {
                None
            } else {
                QubitHamiltonian::new(width, terms, "random").ok()
            }
        })
}
