//! Square and k-th roots of unitary and real orthogonal transformations.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{
    rotation_block_decompose, unitary_eigen, Block, Complex, Matrix, NumericsError, Tolerances,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SqrtError {
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is not real orthogonal (residual {residual:e})")]
    NotOrthogonal { residual: f64 },
    #[error("root order must be at least 2, got {0}")]
    InvalidOrder(u32),
    #[error(transparent)]
    Numerics(NumericsError),
}

impl From<NumericsError> for SqrtError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::NotUnitary { residual } => SqrtError::NotUnitary { residual },
            NumericsError::NotOrthogonal { residual } => SqrtError::NotOrthogonal { residual },
            other => SqrtError::Numerics(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    /// An even power of a real matrix has nonnegative determinant.
    DeterminantNegative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SqrtResult {
    pub exists: bool,
    pub root: Option<Matrix>,
    pub obstruction: Option<Obstruction>,
    /// `||root^k - target||_F`; 0 when no root was built.
    pub residual: f64,
    /// Orthogonality or unitarity residual of the root.
    pub group_residual: f64,
    /// The matrix actually rooted, when it differs from the input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Matrix>,
}

impl SqrtResult {
    fn built(root: Matrix, target: &Matrix, k: u32) -> Self {
        let residual = root.pow(k).sub(target).frobenius_norm();
        SqrtResult {
            exists: true,
            group_residual: root.unitarity_residual(),
            root: Some(root),
            obstruction: None,
            residual,
            target: None,
        }
    }

    fn obstructed(obstruction: Obstruction) -> Self {
        SqrtResult {
            exists: false,
            root: None,
            obstruction: Some(obstruction),
            residual: 0.0,
            group_residual: 0.0,
            target: None,
        }
    }
}

/// Principal k-th root: argument in `(-pi, pi]` divided by `k`. Values
/// within rounding of `-1` are taken at argument `pi`.
fn principal_root(z: Complex, k: u32) -> Complex {
    let arg = if (z + 1.0).norm() < 1e-12 { PI } else { z.arg() };
    Complex::from_polar(z.norm().powf(1.0 / k as f64), arg / k as f64)
}

fn check_unitary(u: &Matrix) -> Result<(), SqrtError> {
    if !u.is_square() {
        return Err(NumericsError::NotSquare { rows: u.rows(), cols: u.cols() }.into());
    }
    let residual = u.unitarity_residual();
    if residual > Tolerances::default().orthonormality {
        return Err(SqrtError::NotUnitary { residual });
    }
    Ok(())
}

fn complex_root(u: &Matrix, k: u32) -> Result<SqrtResult, SqrtError> {
    check_unitary(u)?;
    let (values, q) = unitary_eigen(u)?;
    let roots: Vec<Complex> = values.iter().map(|&z| principal_root(z, k)).collect();
    let root = q.matmul(&Matrix::diagonal(&roots)).matmul(&q.adjoint());
    Ok(SqrtResult::built(root, u, k))
}

/// `V` with the eigenvectors of `U` and principal square roots of its
/// eigenvalues.
pub fn unitary_sqrt(u: &Matrix) -> Result<SqrtResult, SqrtError> {
    complex_root(u, 2)
}

/// Real k-th root by rotation-block angle division. Rotation angles are
/// divided by `k`. For odd `k` each `-1` stays put; for even `k` the `-1`
/// entries are paired in index order into angle-`pi` rotations, which needs
/// an even count, i.e. determinant `+1`.
fn real_root(u: &Matrix, k: u32) -> Result<SqrtResult, SqrtError> {
    let decomposition = rotation_block_decompose(u)?;
    if k % 2 == 0 && decomposition.determinant_sign() < 0 {
        return Ok(SqrtResult::obstructed(Obstruction::DeterminantNegative));
    }
    let n = u.rows();
    let kf = k as f64;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    let mut pending_minus: Option<usize> = None;
    let mut at = 0;
    for block in &decomposition.blocks {
        match *block {
            Block::Rotation(t) => {
                order.extend([at, at + 1]);
                blocks.push(Block::Rotation(t / kf));
            }
            Block::Plus => {
                order.push(at);
                blocks.push(Block::Plus);
            }
            Block::Minus if k % 2 == 1 => {
                order.push(at);
                blocks.push(Block::Minus);
            }
            Block::Minus => match pending_minus.take() {
                None => pending_minus = Some(at),
                Some(first) => {
                    order.extend([first, at]);
                    blocks.push(Block::Rotation(PI / kf));
                }
            },
        }
        at += block.width();
    }
    let mut q = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            q[(i, new)] = decomposition.q[(i, old)];
        }
    }
    let root = q
        .matmul(&crate::numerics::blocks_to_matrix(&blocks))
        .matmul(&q.transpose())
        .real_part();
    Ok(SqrtResult::built(root, &u.real_part(), k))
}

/// A real orthogonal square root in the same dimension, or the determinant
/// obstruction.
pub fn real_orthogonal_sqrt(u: &Matrix) -> Result<SqrtResult, SqrtError> {
    real_root(u, 2)
}

/// Embeds `U` as `diag(U, det U)` in `SO(n+1)` and returns its real square
/// root; the top-left block of the root's square is `U`.
pub fn embed_sqrt(u: &Matrix) -> Result<SqrtResult, SqrtError> {
    let det = rotation_block_decompose(u)?.determinant_sign();
    let n = u.rows();
    let mut lifted = Matrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            lifted[(i, j)] = Complex::new(u[(i, j)].re, 0.0);
        }
    }
    lifted[(n, n)] = Complex::new(det as f64, 0.0);
    let mut result = real_root(&lifted, 2)?;
    result.target = Some(lifted);
    Ok(result)
}

/// k-th root over the chosen field. Over the complex numbers a root always
/// exists. Over the reals a root exists unless `k` is even and the
/// determinant is `-1`.
pub fn kth_root_scan(u: &Matrix, k: u32, field: Field) -> Result<SqrtResult, SqrtError> {
    if k < 2 {
        return Err(SqrtError::InvalidOrder(k));
    }
    match field {
        Field::Complex => complex_root(u, k),
        Field::Real => real_root(u, k),
    }
}

/// The 3x3 rotation whose square is `diag(1, -1, -1)`, which contains the
/// single-qubit phase flip.
pub fn phase_flip_rotation() -> Matrix {
    Matrix::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0]).expect("finite")
}
