//! Seeded random matrices and vectors for sampling-based checks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{Complex, Matrix};

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, complex: bool) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| {
            if complex {
                gaussian_complex(rng)
            } else {
                Complex::new(rng.sample(StandardNormal), 0.0)
            }
        })
        .collect();
    Matrix::new(rows, cols, data).expect("finite gaussian samples")
}

/// Q factor of a Gaussian matrix with the R diagonal made positive, which
/// is Haar distributed.
fn haar_from_gaussian(g: Matrix) -> Matrix {
    let n = g.rows();
    let mut cols: Vec<Vec<Complex>> = (0..n).map(|j| g.column(j).into_vec()).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, y) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * y;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    let mut out = Matrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        for (i, z) in c.iter().enumerate() {
            out[(i, j)] = *z;
        }
    }
    out
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    haar_from_gaussian(gaussian_matrix(rng, n, n, true))
}

pub fn haar_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    haar_from_gaussian(gaussian_matrix(rng, n, n, false))
}

/// Haar orthogonal with the first column negated when needed to get det +1.
pub fn haar_special_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let mut u = haar_orthogonal(rng, n);
    if real_determinant(&u) < 0.0 {
        for i in 0..n {
            u[(i, 0)] = -u[(i, 0)];
        }
    }
    u
}

/// Determinant of the real part by partial-pivot elimination. Used only
/// by samplers and tests.
pub fn real_determinant(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).iter().map(|z| z.re).collect()).collect();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in (c + 1)..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// `P D` with unimodular diagonal: row `j` holds `phase_j` at column
/// `perm[j]`. Real signs only when `complex` is false.
pub fn generalized_diagonal<R: Rng + ?Sized>(rng: &mut R, n: usize, complex: bool) -> Matrix {
    let perm = random_permutation(rng, n);
    let mut m = Matrix::zeros(n, n);
    for (j, &k) in perm.iter().enumerate() {
        m[(j, k)] = if complex {
            Complex::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
        } else if rng.random::<bool>() {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(-1.0, 0.0)
        };
    }
    m
}

/// Uniform sample from the unit ball in R^n or C^n.
pub fn unit_ball_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, complex: bool) -> Vec<Complex> {
    let mut v: Vec<Complex> = (0..n)
        .map(|_| {
            if complex {
                gaussian_complex(rng)
            } else {
                Complex::new(rng.sample(StandardNormal), 0.0)
            }
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let real_dim = if complex { 2 * n } else { n } as f64;
    let radius = rng.random::<f64>().powf(1.0 / real_dim);
    v.iter_mut().for_each(|z| *z *= radius / norm);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=8 {
            assert!(haar_unitary(&mut rng, n).unitarity_residual() < 1e-12);
            let o = haar_special_orthogonal(&mut rng, n);
            assert!(o.unitarity_residual() < 1e-12);
            assert!((real_determinant(&o) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn generalized_diagonal_has_one_entry_per_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = generalized_diagonal(&mut rng, 5, true);
        for i in 0..5 {
            assert_eq!(m.row(i).iter().filter(|z| z.norm() > 0.5).count(), 1);
        }
        assert!(m.unitarity_residual() < 1e-15);
    }
}
