//! Random states and unitaries for property tests and examples.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::density::{DensityOperator, PureState};
use super::matrix::ComplexMatrix;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("shape")
}

/// `G G† / Tr`, full rank with probability one.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    let g = ginibre(rng, dim, dim);
    let m = g.matmul(&g.dagger());
    let t = m.trace().re;
    DensityOperator::from_trusted(m.scale_real(1.0 / t).hermitian_part())
}

/// Haar-random ket.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    PureState::normalized((0..dim).map(|_| gaussian(rng)).collect()).expect("nonzero")
}

/// Matrix with orthonormal columns, by Gram–Schmidt on Gaussian columns.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(cols <= rows);
    let g = ginibre(rng, rows, cols);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v: Vec<C64> = (0..rows).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for b in &basis {
                let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        basis.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for (j, col) in basis.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            out[(i, j)] = *z;
        }
    }
    out
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_isometry(rng, dim, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 4);
        assert!(u
            .dagger()
            .matmul(&u)
            .approx_eq(&ComplexMatrix::identity(4), 1e-12));
    }

    #[test]
    fn density_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_density(&mut rng, 4);
        assert!(crate::qcore::validate_density(rho.matrix()).is_ok());
    }
}
