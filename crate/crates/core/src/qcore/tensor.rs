//! Tensor-product bookkeeping.
//!
//! Subsystem 0 is the leftmost factor and the slowest-varying index, so a
//! basis label `|q0 q1 … q(n-1)⟩` maps to the flat index with `q0` as the
//! most significant digit.

use super::density::DensityOperator;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Kronecker product, `lhs` as the slow index.
pub fn tensor_product(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> ComplexMatrix {
    let (r1, c1) = (lhs.rows(), lhs.cols());
    let (r2, c2) = (rhs.rows(), rhs.cols());
    let mut out = ComplexMatrix::zeros(r1 * r2, c1 * c2);
    for i in 0..r1 {
        for j in 0..c1 {
            let l = lhs[(i, j)];
            if l.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..r2 {
                for m in 0..c2 {
                    out[(i * r2 + k, j * c2 + m)] = l * rhs[(k, m)];
                }
            }
        }
    }
    out
}

/// Fold of [`tensor_product`] over a list of factors.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut it = factors.into_iter();
    let first = it
        .next()
        .expect("tensor_all needs at least one factor")
        .clone();
    it.fold(first, |acc, f| tensor_product(&acc, f))
}

/// Split a flat index into per-subsystem digits.
pub(crate) fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub(crate) fn flatten(digits: impl IntoIterator<Item = usize>, dims: &[usize]) -> usize {
    digits
        .into_iter()
        .zip(dims)
        .fold(0, |acc, (q, &d)| acc * d + q)
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Dimension(format!("invalid subsystem dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::Dimension(format!(
            "dims {dims:?} multiply to {total}, matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(total)
}

fn check_subset(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() || sorted.iter().any(|&k| k >= n) {
        return Err(Error::Dimension(format!(
            "subsystem selection {keep:?} invalid for {n} subsystems"
        )));
    }
    Ok(sorted)
}

/// Partial trace of an arbitrary square operator; kept subsystems stay in
/// ascending order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total = check_dims(m, dims)?;
    let keep = check_subset(keep, dims.len())?;
    if keep.len() == dims.len() {
        return Ok(m.clone());
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);

    let split: Vec<(usize, Vec<usize>)> = (0..total)
        .map(|i| {
            let d = digits(i, dims);
            let kept = flatten(keep.iter().map(|&k| d[k]), &kept_dims);
            let rest = traced.iter().map(|&k| d[k]).collect();
            (kept, rest)
        })
        .collect();

    for i in 0..total {
        for j in 0..total {
            if split[i].1 == split[j].1 {
                out[(split[i].0, split[j].0)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Reduced state on `keep`.
pub fn partial_trace(
    state: &DensityOperator,
    dims: &[usize],
    keep: &[usize],
) -> Result<DensityOperator> {
    let reduced = partial_trace_matrix(state.matrix(), dims, keep)?;
    Ok(DensityOperator::from_trusted(reduced))
}

/// Transpose on one factor of a bipartite operator.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: (usize, usize),
    subsystem: usize,
) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    check_dims(m, &[d1, d2])?;
    if subsystem > 1 {
        return Err(Error::Dimension(format!(
            "subsystem {subsystem} of a bipartite operator"
        )));
    }
    let mut out = ComplexMatrix::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for k in 0..d2 {
            for j in 0..d1 {
                for l in 0..d2 {
                    let (ri, rk, cj, cl) = if subsystem == 0 {
                        (j, k, i, l)
                    } else {
                        (i, l, j, k)
                    };
                    out[(ri * d2 + rk, cj * d2 + cl)] = m[(i * d2 + k, j * d2 + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Lift `op`, acting on the listed subsystems (in the order given), to the
/// full space with identity elsewhere.
pub fn embed(op: &ComplexMatrix, dims: &[usize], sites: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if sites.iter().any(|&s| s >= dims.len()) {
        return Err(Error::Dimension(format!(
            "sites {sites:?} out of range for {} subsystems",
            dims.len()
        )));
    }
    let mut seen = sites.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != sites.len() {
        return Err(Error::Dimension(format!("repeated site in {sites:?}")));
    }
    let site_dims: Vec<usize> = sites.iter().map(|&s| dims[s]).collect();
    let op_dim: usize = site_dims.iter().product();
    if op.rows() != op_dim || op.cols() != op_dim {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, sites {sites:?} span dimension {op_dim}",
            op.rows(),
            op.cols()
        )));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !sites.contains(k)).collect();
    let split: Vec<(usize, Vec<usize>)> = (0..total)
        .map(|i| {
            let d = digits(i, dims);
            (
                flatten(sites.iter().map(|&s| d[s]), &site_dims),
                rest.iter().map(|&k| d[k]).collect(),
            )
        })
        .collect();
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            if split[i].1 == split[j].1 {
                out[(i, j)] = op[(split[i].0, split[j].0)];
            }
        }
    }
    Ok(out)
}
