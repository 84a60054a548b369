use serde::Serialize;

use super::matrix::{Complex, Matrix, Vector, ONE, ZERO};
use super::{NumericsError, Tolerances};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues within this distance share a cluster. Inside a cluster the
/// eigenvectors are recombined with a second criterion.
const CLUSTER_GAP: f64 = 1e-9;

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order together with a unitary whose
/// columns are the matching eigenvectors. Real symmetric input yields real
/// eigenvectors exactly (rotation phases are then `+-1`).
pub fn hermitian_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix), NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    // Symmetrize so tiny Hermitian defects do not stall convergence.
    let mut m = a.add(&a.adjoint()).scale(Complex::new(0.5, 0.0));
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let phase_conj = b.conj() / babs;
                let j_pp = Complex::new(c, 0.0);
                let j_pq = Complex::new(s, 0.0);
                let j_qp = phase_conj * (-s);
                let j_qq = phase_conj * c;
                rotate_columns(&mut m, p, q, j_pp, j_pq, j_qp, j_qq);
                rotate_rows_adjoint(&mut m, p, q, j_pp, j_pq, j_qp, j_qq);
                rotate_columns(&mut v, p, q, j_pp, j_pq, j_qp, j_qq);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, new_j)] = v[(i, old_j)];
        }
    }
    Ok((values, vecs))
}

/// `M <- M J` restricted to columns p and q.
fn rotate_columns(m: &mut Matrix, p: usize, q: usize, jpp: Complex, jpq: Complex, jqp: Complex, jqq: Complex) {
    for i in 0..m.rows() {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * jpp + mq * jqp;
        m[(i, q)] = mp * jpq + mq * jqq;
    }
}

/// `M <- J^dagger M` restricted to rows p and q.
fn rotate_rows_adjoint(m: &mut Matrix, p: usize, q: usize, jpp: Complex, jpq: Complex, jqp: Complex, jqq: Complex) {
    for k in 0..m.cols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = jpp.conj() * mp + jqp.conj() * mq;
        m[(q, k)] = jpq.conj() * mp + jqq.conj() * mq;
    }
}

/// Singular values (descending) by one-sided Jacobi on the columns.
///
/// Works on the matrix itself rather than `A^dagger A`, so small singular
/// values keep their relative accuracy and condition numbers up to ~1e15
/// are resolved.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let n = a.cols();
    let mut cols: Vec<Vec<Complex>> = (0..n).map(|j| a.column(j).into_vec()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let gabs = gamma.norm();
                if gabs <= 1e-16 * (alpha * beta).sqrt() || gabs == 0.0 {
                    continue;
                }
                rotated = true;
                let phase_conj = gamma.conj() / gabs;
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yb = *y * phase_conj;
                    let xp = *x;
                    *x = xp * c - yb * s;
                    *y = xp * s + yb * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Groups consecutive ascending eigenvalues into clusters.
fn clusters(values: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > CLUSTER_GAP {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Eigen-decomposition of a unitary matrix.
///
/// The commuting Hermitian parts `(U + U^dagger)/2` and `(U - U^dagger)/2i`
/// are diagonalized in turn: the first by Jacobi, the second within each
/// cluster of the first. Returns unit-modulus eigenvalues and a unitary
/// eigenvector matrix.
pub fn unitary_eigen(u: &Matrix) -> Result<(Vec<Complex>, Matrix), NumericsError> {
    let residual = u.unitarity_residual();
    if residual > Tolerances::default().orthonormality {
        return Err(NumericsError::NotUnitary { residual });
    }
    let n = u.rows();
    let ud = u.adjoint();
    let half = Complex::new(0.5, 0.0);
    let h1 = u.add(&ud).scale(half);
    let h2 = u.sub(&ud).scale(Complex::new(0.0, -0.5));
    let (vals, q1) = hermitian_eigen(&h1)?;

    let mut vectors: Vec<Vector> = Vec::with_capacity(n);
    for range in clusters(&vals) {
        let basis: Vec<Vector> = range.clone().map(|j| q1.column(j)).collect();
        if basis.len() == 1 {
            vectors.push(basis.into_iter().next().unwrap());
            continue;
        }
        let qc = Matrix::from_columns(&basis)?;
        let restricted = qc.adjoint().matmul(&h2).matmul(&qc);
        let (_, w) = hermitian_eigen(&restricted)?;
        let combined = qc.matmul(&w);
        vectors.extend((0..combined.cols()).map(|j| combined.column(j)));
    }
    let q = Matrix::from_columns(&vectors)?;
    let eigenvalues = vectors
        .iter()
        .map(|v| {
            let lambda = v.inner(&u.apply(v));
            lambda / lambda.norm()
        })
        .collect();
    Ok((eigenvalues, q))
}

/// One diagonal block of a real orthogonal matrix in rotation form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    /// `[[cos t, -sin t], [sin t, cos t]]` on two consecutive columns.
    Rotation(f64),
    Plus,
    Minus,
}

impl Block {
    pub fn width(&self) -> usize {
        match self {
            Block::Rotation(_) => 2,
            Block::Plus | Block::Minus => 1,
        }
    }
}

/// `U = Q B Q^T` with `B` block diagonal.
#[derive(Clone, Debug)]
pub struct RotationBlocks {
    /// Real orthogonal change of basis; blocks occupy its columns in order.
    pub q: Matrix,
    pub blocks: Vec<Block>,
    /// `||Q B Q^T - U||_F`.
    pub residual: f64,
}

impl RotationBlocks {
    pub fn block_matrix(&self) -> Matrix {
        blocks_to_matrix(&self.blocks)
    }

    pub fn reconstruct(&self) -> Matrix {
        self.q
            .matmul(&self.block_matrix())
            .matmul(&self.q.transpose())
    }

    /// Determinant, read off the `+-1` entries.
    pub fn determinant_sign(&self) -> i32 {
        let minus = self.blocks.iter().filter(|b| **b == Block::Minus).count();
        if minus % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

pub(crate) fn blocks_to_matrix(blocks: &[Block]) -> Matrix {
    let n: usize = blocks.iter().map(Block::width).sum();
    let mut b = Matrix::zeros(n, n);
    let mut at = 0;
    for block in blocks {
        match *block {
            Block::Rotation(t) => {
                let (s, c) = t.sin_cos();
                b[(at, at)] = Complex::new(c, 0.0);
                b[(at, at + 1)] = Complex::new(-s, 0.0);
                b[(at + 1, at)] = Complex::new(s, 0.0);
                b[(at + 1, at + 1)] = Complex::new(c, 0.0);
            }
            Block::Plus => b[(at, at)] = ONE,
            Block::Minus => b[(at, at)] = -ONE,
        }
        at += block.width();
    }
    b
}

pub fn rotation_block_decompose(u: &Matrix) -> Result<RotationBlocks, NumericsError> {
    rotation_block_decompose_with(u, &Tolerances::default())
}

/// Real Schur form of a real orthogonal matrix: `U = Q B Q^T` with `B` made
/// of 2x2 rotation blocks (angles in `(0, pi]`) and `+-1` scalars.
///
/// The symmetric part `(U + U^T)/2` is diagonalized by Jacobi; each of its
/// eigenspaces is `U`-invariant. Within one, the skew part pairs a vector
/// `v` with `w = Kv / |Kv|` into a rotation plane, and the plane is deflated.
pub fn rotation_block_decompose_with(u: &Matrix, tol: &Tolerances) -> Result<RotationBlocks, NumericsError> {
    if !u.is_square() {
        return Err(NumericsError::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let n = u.rows();
    let ut = u.transpose();
    let residual = ut.matmul(u).sub(&Matrix::identity(n)).max_abs().max(u.max_imag());
    if residual > tol.orthonormality {
        return Err(NumericsError::NotOrthogonal { residual });
    }
    let u = u.real_part();
    let ut = u.transpose();
    let sym = u.add(&ut).scale(Complex::new(0.5, 0.0));
    let (vals, q1) = hermitian_eigen(&sym)?;
    let q1 = q1.real_part();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    for range in clusters(&vals) {
        let basis: Vec<Vec<f64>> = range
            .map(|j| (0..n).map(|i| q1[(i, j)].re).collect())
            .collect();
        split_invariant_subspace(&u, basis, &mut columns, &mut blocks);
    }
    let q = Matrix::from_real(
        n,
        n,
        &(0..n)
            .flat_map(|i| columns.iter().map(move |c| c[i]))
            .collect::<Vec<_>>(),
    )?;
    let mut out = RotationBlocks {
        q,
        blocks,
        residual: 0.0,
    };
    out.residual = out.reconstruct().sub(&u).frobenius_norm();
    if out.residual > tol.reconstruction {
        return Err(NumericsError::NoConvergence);
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn real_apply(u: &Matrix, v: &[f64]) -> Vec<f64> {
    (0..u.rows())
        .map(|i| u.row(i).iter().zip(v).map(|(a, x)| a.re * x).sum())
        .collect()
}

fn real_apply_t(u: &Matrix, v: &[f64]) -> Vec<f64> {
    (0..u.cols())
        .map(|j| (0..u.rows()).map(|i| u[(i, j)].re * v[i]).sum())
        .collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Decomposes `U` restricted to the invariant subspace spanned by `basis`.
fn split_invariant_subspace(u: &Matrix, mut basis: Vec<Vec<f64>>, columns: &mut Vec<Vec<f64>>, blocks: &mut Vec<Block>) {
    // Skew part applied to a vector: (U v - U^T v) / 2.
    let skew = |v: &[f64]| -> Vec<f64> {
        let a = real_apply(u, v);
        let b = real_apply_t(u, v);
        a.iter().zip(&b).map(|(x, y)| 0.5 * (x - y)).collect()
    };
    while !basis.is_empty() {
        let images: Vec<Vec<f64>> = basis.iter().map(|v| skew(v)).collect();
        let (best, best_norm) = images
            .iter()
            .enumerate()
            .map(|(i, k)| (i, dot(k, k).sqrt()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_norm <= 1e-12 {
            for v in basis.drain(..) {
                let lambda = dot(&v, &real_apply(u, &v));
                blocks.push(if lambda >= 0.0 { Block::Plus } else { Block::Minus });
                columns.push(v);
            }
            break;
        }
        let v = basis[best].clone();
        let mut w = images[best].clone();
        let vw = dot(&v, &w);
        w.iter_mut().zip(&v).for_each(|(x, y)| *x -= vw * y);
        normalize(&mut w);
        let uv = real_apply(u, &v);
        let angle = dot(&w, &uv).atan2(dot(&v, &uv));
        blocks.push(Block::Rotation(angle));
        columns.push(v.clone());
        columns.push(w.clone());

        // Deflate: project out v and w, then keep the r - 2 strongest
        // directions by pivoted Gram-Schmidt.
        let keep = basis.len().saturating_sub(2);
        let mut rest: Vec<Vec<f64>> = basis
            .iter()
            .map(|r| {
                let a = dot(&v, r);
                let b = dot(&w, r);
                r.iter()
                    .zip(v.iter().zip(&w))
                    .map(|(x, (vi, wi))| x - a * vi - b * wi)
                    .collect()
            })
            .collect();
        let mut next = Vec::with_capacity(keep);
        for _ in 0..keep {
            let (idx, _) = rest
                .iter()
                .enumerate()
                .map(|(i, r)| (i, dot(r, r)))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            let mut pick = rest.swap_remove(idx);
            for prev in next.iter().chain([&v, &w]) {
                let a = dot(prev, &pick);
                pick.iter_mut().zip(prev.iter()).for_each(|(x, y)| *x -= a * y);
            }
            normalize(&mut pick);
            for r in rest.iter_mut() {
                let a = dot(&pick, r);
                r.iter_mut().zip(&pick).for_each(|(x, y)| *x -= a * y);
            }
            next.push(pick);
        }
        basis = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn hermitian_eigen_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            let g = random::gaussian_matrix(&mut rng, n, n, true);
            let h = g.add(&g.adjoint());
            let (vals, v) = hermitian_eigen(&h).unwrap();
            assert!(v.unitarity_residual() < 1e-12);
            let d = Matrix::diagonal(&vals.iter().map(|&x| Complex::new(x, 0.0)).collect::<Vec<_>>());
            let back = v.matmul(&d).matmul(&v.adjoint());
            assert!(back.sub(&h).max_abs() < 1e-11, "n={n}");
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn singular_values_of_diagonal_and_near_singular() {
        let d = Matrix::diagonal(&[Complex::new(3.0, 0.0), Complex::new(0.0, -1e-13)]);
        let sv = singular_values(&d);
        assert!((sv[0] - 3.0).abs() < 1e-15);
        assert!((sv[1] - 1e-13).abs() < 1e-25);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random::haar_unitary(&mut rng, 4);
        for s in singular_values(&u) {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_eigen_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            let u = random::haar_unitary(&mut rng, n);
            let (vals, q) = unitary_eigen(&u).unwrap();
            let back = q.matmul(&Matrix::diagonal(&vals)).matmul(&q.adjoint());
            assert!(back.sub(&u).max_abs() < 1e-10, "n={n}");
        }
        // Degenerate spectrum.
        let z = Matrix::diagonal(&[ONE, -ONE, -ONE, ONE]);
        let (vals, q) = unitary_eigen(&z).unwrap();
        let back = q.matmul(&Matrix::diagonal(&vals)).matmul(&q.adjoint());
        assert!(back.sub(&z).max_abs() < 1e-12);
    }

    #[test]
    fn identity_gives_plus_blocks() {
        let d = rotation_block_decompose(&Matrix::identity(4)).unwrap();
        assert!(d.blocks.iter().all(|b| *b == Block::Plus));
        assert_eq!(d.blocks.len(), 4);
    }

    #[test]
    fn plane_rotation_is_single_block() {
        let t = PI / 3.0;
        let u = blocks_to_matrix(&[Block::Rotation(t)]);
        let d = rotation_block_decompose(&u).unwrap();
        assert_eq!(d.blocks.len(), 1);
        match d.blocks[0] {
            Block::Rotation(a) => assert!((a - t).abs() < 1e-12),
            other => panic!("unexpected block {other:?}"),
        }
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn reflections_and_tiny_angles() {
        let u = Matrix::diagonal(&[ONE, -ONE, -ONE]);
        let d = rotation_block_decompose(&u).unwrap();
        assert_eq!(d.determinant_sign(), 1);
        let tiny = blocks_to_matrix(&[Block::Rotation(1e-7), Block::Plus, Block::Minus]);
        let d = rotation_block_decompose(&tiny).unwrap();
        assert!(d.residual < 1e-12);
        assert_eq!(d.determinant_sign(), -1);
    }

    #[test]
    fn random_special_orthogonal_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let u = random::haar_special_orthogonal(&mut rng, 4);
            let d = rotation_block_decompose(&u).unwrap();
            assert!(d.residual <= 1e-9);
            assert!(d.q.transpose().matmul(&d.q).sub(&Matrix::identity(4)).max_abs() < 1e-12);
            assert_eq!(d.determinant_sign(), 1);
        }
    }

    #[test]
    fn rejects_non_orthogonal() {
        let m = Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            rotation_block_decompose(&m),
            Err(NumericsError::NotOrthogonal { .. })
        ));
    }
}
