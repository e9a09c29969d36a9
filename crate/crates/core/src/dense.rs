//! Dense matrices of small Pauli sums.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::pauli::PauliTerm;

/// Largest qubit count for which dense matrices are built by default.
pub const DENSE_QUBIT_THRESHOLD: usize = 12;

/// Phase `i^{|x & z|}` of a Pauli string's action, from its Y count.
pub(crate) fn y_phase(x: u64, z: u64) -> Complex64 {
    match (x & z).count_ones() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `Σ c P` as a `2^n × 2^n` matrix. Qubit `q` is bit `q` of the basis index.
pub fn pauli_sum_matrix(qubit_count: usize, terms: &[PauliTerm]) -> DMatrix<Complex64> {
    let dim = 1usize << qubit_count;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for t in terms {
        let (x, z) = t.string.masks_u64();
        let c = t.coefficient * y_phase(x, z);
        for j in 0..dim {
            let v = if (j as u64 & z).count_ones() % 2 == 1 {
                -c
            } else {
                c
            };
            m[((j as u64 ^ x) as usize, j)] += v;
        }
    }
    m
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), idx.len(), |r, c| {
        eig.eigenvectors[(r, idx[c])]
    });
    (values, vectors)
}

/// Largest `|λ|` of a Hermitian Pauli sum, which is its spectral norm.
pub fn hermitian_spectral_norm(qubit_count: usize, terms: &[PauliTerm]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let m = pauli_sum_matrix(qubit_count, terms);
    SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}
