//! Complex and quaternion linear algebra shared by the rest of the crate.
//!
//! Everything here is a pure function of its inputs. Matrices are small and
//! dense; the decompositions are Jacobi-style sweeps of two-sided plane
//! rotations, which are deterministic and accurate at desk-scale sizes.

mod decompose;
mod matrix;
mod quaternion;
pub mod random;

pub use decompose::{
    hermitian_eigen, rotation_block_decompose, rotation_block_decompose_with, singular_values,
    unitary_eigen, Block, RotationBlocks,
};
pub use matrix::{Complex, Matrix, Vector};
pub(crate) use decompose::blocks_to_matrix;
pub(crate) use matrix::{ONE, ZERO};
pub use quaternion::{quaternion_sqrt, Quaternion};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("p must be positive, got {0}")]
    NonPositiveP(f64),
    #[error("columns are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },
    #[error("matrix is not real orthogonal (residual {residual:e})")]
    NotOrthogonal { residual: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry")]
    NonFinite,
    #[error("empty vector or matrix")]
    Empty,
    #[error("decomposition did not converge")]
    NoConvergence,
}

/// Tolerances used across the crate. The defaults are the fixed module
/// values; callers can override any of them.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Orthonormality / unitarity acceptance.
    pub orthonormality: f64,
    /// Reconstruction residual for decompositions and roots.
    pub reconstruction: f64,
    /// Modulus below which an entry counts as zero in Gram-Schmidt.
    pub dependence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthonormality: 1e-10,
            reconstruction: 1e-9,
            dependence: 1e-8,
        }
    }
}

/// Neumaier-compensated sum; the error stays at a few ulp of the total
/// however many terms there are.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in terms {
        let t = sum + x;
        carry += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + carry
}

/// `(sum_j |v_j|^p)^(1/p)`; `p = f64::INFINITY` selects the max norm.
pub fn p_norm(v: &[Complex], p: f64) -> Result<f64, NumericsError> {
    if p.is_nan() || p <= 0.0 {
        return Err(NumericsError::NonPositiveP(p));
    }
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    // Scale by the max modulus so large p neither overflows nor underflows.
    let sum: f64 = v.iter().map(|z| (z.norm() / max).powf(p)).sum();
    Ok(max * sum.powf(1.0 / p))
}

/// p-norm of a real vector (split into its absolute values).
pub fn p_norm_real(v: &[f64], p: f64) -> Result<f64, NumericsError> {
    let as_complex: Vec<Complex> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
    p_norm(&as_complex, p)
}

/// Completes orthonormal columns to a unitary. Missing columns come from
/// Gram-Schmidt over `e_0, e_1, ...` in order, skipping candidates whose
/// residual norm falls below the dependence threshold.
pub fn complete_to_unitary(cols: &[Vector]) -> Result<Matrix, NumericsError> {
    complete_to_unitary_with(cols, &Tolerances::default())
}

pub fn complete_to_unitary_with(cols: &[Vector], tol: &Tolerances) -> Result<Matrix, NumericsError> {
    let dim = cols.first().ok_or(NumericsError::Empty)?.dim();
    if cols.len() > dim {
        return Err(NumericsError::DimensionMismatch {
            expected: dim,
            found: cols.len(),
        });
    }
    let mut residual: f64 = 0.0;
    for (a, u) in cols.iter().enumerate() {
        if u.dim() != dim {
            return Err(NumericsError::DimensionMismatch {
                expected: dim,
                found: u.dim(),
            });
        }
        for v in &cols[a..] {
            let target = if std::ptr::eq(u, v) { ONE } else { ZERO };
            residual = residual.max((u.inner(v) - target).norm());
        }
    }
    if residual > tol.orthonormality {
        return Err(NumericsError::NotOrthonormal { residual });
    }

    let mut basis: Vec<Vec<Complex>> = cols.iter().map(|c| c.as_slice().to_vec()).collect();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut cand = vec![ZERO; dim];
        cand[k] = ONE;
        // Two passes of modified Gram-Schmidt for stability.
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex = b.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
                for (c, x) in cand.iter_mut().zip(b) {
                    *c -= proj * x;
                }
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < tol.dependence {
            continue;
        }
        basis.push(cand.into_iter().map(|z| z / norm).collect());
    }
    debug_assert_eq!(basis.len(), dim);
    let columns: Vec<Vector> = basis
        .into_iter()
        .map(|b| Vector::new(b).expect("finite by construction"))
        .collect();
    Matrix::from_columns(&columns)
}
