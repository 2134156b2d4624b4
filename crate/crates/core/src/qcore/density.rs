use num_complex::Complex64 as C64;

use super::eigen::hermitian_eigensystem;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues in `[-PSD_FLOOR, 0)` are rounding noise and get clamped.
pub const PSD_FLOOR: f64 = 1e-9;

/// Normalised ket.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension("empty ket".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation {
                invariant: "unit norm",
                detail: format!("squared norm {norm}"),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Normalise an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Validation {
                invariant: "unit norm",
                detail: "cannot normalise a zero vector".into(),
            });
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// `⟨self|m|self⟩`, real part.
    pub fn expectation(&self, m: &ComplexMatrix) -> f64 {
        m.sandwich(&self.amplitudes, &self.amplitudes).re
    }
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Wrap a matrix already known to be a state (partial traces of states,
    /// convex combinations). Not exposed: everything public goes through
    /// [`validate_density`].
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn from_pure(state: &PureState) -> Self {
        Self {
            matrix: state.projector(),
        }
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `|k⟩⟨k|` for a computational basis index.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `U ρ U†`, unitary assumed.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self {
            matrix: self.matrix.conjugate_by(u).hermitian_part(),
        }
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Dimension("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::Dimension(format!(
                    "mixing {}-dim state into {dim}-dim mixture",
                    rho.dim()
                )));
            }
            if *w < 0.0 {
                return Err(Error::InvalidParams(format!("negative mixture weight {w}")));
            }
            acc = &acc + &rho.matrix.scale_real(*w);
            total += w;
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidParams(format!(
                "mixture weights sum to {total}"
            )));
        }
        Ok(Self { matrix: acc })
    }
}

/// Check the density-operator invariants, clamping rounding-level negative
/// eigenvalues and renormalising.
pub fn validate_density(m: &ComplexMatrix) -> Result<DensityOperator> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "density operator must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let herm = m.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(Error::Validation {
            invariant: "hermiticity",
            detail: format!("max |m - m†| = {herm:e}"),
        });
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::Validation {
            invariant: "unit trace",
            detail: format!("trace = {trace}"),
        });
    }
    let h = m.hermitian_part();
    let eig = hermitian_eigensystem(&h)?;
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_FLOOR {
        return Err(Error::Validation {
            invariant: "positive semidefinite",
            detail: format!("eigenvalue {min:e}"),
        });
    }
    let matrix = if min < 0.0 {
        let mut clamped = eig.clone();
        for v in &mut clamped.values {
            *v = v.max(0.0);
        }
        let r = clamped.reconstruct();
        let t = r.trace().re;
        r.scale_real(1.0 / t).hermitian_part()
    } else if trace.re != 1.0 {
        h.scale_real(1.0 / trace.re)
    } else {
        h
    };
    Ok(DensityOperator { matrix })
}
