//! Hermitian eigendecomposition.
//!
//! Backed by nalgebra's symmetric (Hermitian) eigensolver; this module only
//! converts to and from [`ComplexMatrix`] and fixes the descending order.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Inputs must be Hermitian to within this entrywise bound.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `k` pairs with `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows())
            .map(|i| self.vectors[(i, k)])
            .collect()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vector(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * lambda;
                }
            }
        }
        out
    }
}

pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::Contract(format!(
            "eigensystem of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let herm_err = m.hermiticity_error();
    if herm_err > HERMITIAN_TOL {
        return Err(Error::Contract(format!(
            "eigensystem of non-Hermitian matrix (deviation {herm_err:e})"
        )));
    }
    let n = m.rows();
    let h = m.hermitian_part();
    let dm = DMatrix::from_row_slice(n, n, h.entries());
    let eig = SymmetricEigen::new(dm);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = eig.eigenvectors[(row, k)];
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigensystem(m)?.values)
}

/// Largest eigenvalue of a real symmetric 4×4 matrix given row-major.
pub(crate) fn max_eigenvalue_sym4(m: &[f64; 16]) -> f64 {
    let mat = nalgebra::Matrix4::from_row_slice(m);
    nalgebra::SymmetricEigen::new(mat).eigenvalues.max()
}
