//! Refutation search for p-norm-preserving linear maps.
//!
//! For p != 2 only generalized diagonal matrices (a permutation times a
//! diagonal) preserve every vector's p-norm. The checkers here look for
//! counterexample vectors, compare formal polynomial coefficients for even
//! p, and scan random matrix families for exceptions.

mod formal;
mod island;

pub use formal::{formal_check, preserves_pnorm_formal_even, preserves_pnorm_formal_exact, FormalScalar};
pub use island::{island_scan, island_scan_with, stochastic_cone_check, IslandScan};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::random::unit_ball_vector;
use crate::numerics::{p_norm, Complex, Matrix, NumericsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormLawError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("p must be positive, got {0}")]
    NonPositiveP(f64),
    #[error("formal expansion supports even p in 2..=8, got {0}")]
    UnsupportedP(u32),
    #[error("formal expansion supports n <= 6, got {0}")]
    TooLarge(usize),
    #[error("the check is only meaningful for p != 2")]
    PEqualsTwo,
    #[error("matrix has non-real entries (max imaginary part {0:e})")]
    NotReal(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Evidence that a matrix fails to preserve the p-norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Input whose norm changes.
    Vector(Vec<Complex>),
    /// Exponents of a monomial whose coefficients differ.
    Monomial(Vec<u32>),
    /// `sum_j a_jk^(p-2) a_jl^2 != delta_kl`.
    Constraint { k: usize, l: usize },
    /// Rotating coordinate `l` of `base` by `theta` changes the total
    /// weight; `j` is the output entry that varies most.
    Phase {
        base: Vec<Complex>,
        j: usize,
        l: usize,
        theta: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreservationVerdict {
    pub preserves: bool,
    pub witness: Option<Witness>,
    /// Violation size of the witness, or the largest deviation seen when
    /// no witness was found.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenDiagVerdict {
    pub is_generalized_diagonal: bool,
    /// `permutation[j]` is the column of row `j`'s nonzero entry.
    pub permutation: Option<Vec<usize>>,
    /// The nonzero entries, row by row.
    pub phases: Option<Vec<Complex>>,
}

fn require_square(a: &Matrix) -> Result<usize, NormLawError> {
    if !a.is_square() {
        return Err(NormLawError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(a.rows())
}

fn require_positive(p: f64) -> Result<(), NormLawError> {
    if p.is_nan() || p <= 0.0 {
        return Err(NormLawError::NonPositiveP(p));
    }
    Ok(())
}

/// True iff every row and column has exactly one entry with modulus above
/// `tol`.
pub fn is_generalized_diagonal(a: &Matrix, tol: f64) -> Result<GenDiagVerdict, NormLawError> {
    let n = require_square(a)?;
    let no = GenDiagVerdict {
        is_generalized_diagonal: false,
        permutation: None,
        phases: None,
    };
    let mut perm = Vec::with_capacity(n);
    let mut col_used = vec![false; n];
    for j in 0..n {
        let mut hits = (0..n).filter(|&k| a[(j, k)].norm() > tol);
        let (Some(k), None) = (hits.next(), hits.next()) else {
            return Ok(no);
        };
        if col_used[k] {
            return Ok(no);
        }
        col_used[k] = true;
        perm.push(k);
    }
    let phases = perm.iter().enumerate().map(|(j, &k)| a[(j, k)]).collect();
    Ok(GenDiagVerdict {
        is_generalized_diagonal: true,
        permutation: Some(perm),
        phases: Some(phases),
    })
}

/// How a complex vector's p-norm is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ComplexConvention {
    /// `sum |x_j|^p`.
    #[default]
    Modulus,
    /// Real and imaginary parts as `2n` separate reals.
    SplitReal,
}

/// Which inputs the numeric search samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Real,
    Complex,
    #[default]
    Both,
    NonnegativeReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericCheck {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub domain: Domain,
    pub convention: ComplexConvention,
}

impl Default for NumericCheck {
    fn default() -> Self {
        Self {
            trials: 64,
            seed: 0,
            tol: 1e-10,
            domain: Domain::Both,
            convention: ComplexConvention::Modulus,
        }
    }
}

pub fn vector_norm(v: &[Complex], p: f64, convention: ComplexConvention) -> Result<f64, NumericsError> {
    match convention {
        ComplexConvention::Modulus => p_norm(v, p),
        ComplexConvention::SplitReal => {
            let parts: Vec<Complex> = v
                .iter()
                .flat_map(|z| [Complex::new(z.re, 0.0), Complex::new(z.im, 0.0)])
                .collect();
            p_norm(&parts, p)
        }
    }
}

/// Searches for `x` with `| ||Ax||_p - ||x||_p | > tol`. Basis vectors are
/// tried first, then `trials` seeded samples from the unit ball.
pub fn preserves_pnorm_numeric(a: &Matrix, p: f64, check: &NumericCheck) -> Result<PreservationVerdict, NormLawError> {
    let n = require_square(a)?;
    require_positive(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    let basis = (0..n).map(|k| {
        let mut e = vec![Complex::new(0.0, 0.0); n];
        e[k] = Complex::new(1.0, 0.0);
        e
    });
    let samples: Vec<Vec<Complex>> = (0..check.trials)
        .map(|t| match check.domain {
            Domain::Real => unit_ball_vector(&mut rng, n, false),
            Domain::Complex => unit_ball_vector(&mut rng, n, true),
            Domain::Both => unit_ball_vector(&mut rng, n, t % 2 == 1),
            Domain::NonnegativeReal => unit_ball_vector(&mut rng, n, false)
                .into_iter()
                .map(|z| Complex::new(z.re.abs(), 0.0))
                .collect(),
        })
        .collect();
    let mut worst: f64 = 0.0;
    for x in basis.chain(samples) {
        let y = a.apply_to(&x);
        let dev = (vector_norm(&y, p, check.convention)? - vector_norm(&x, p, check.convention)?).abs();
        if dev > check.tol || dev.is_nan() {
            return Ok(PreservationVerdict {
                preserves: false,
                witness: Some(Witness::Vector(x)),
                residual: dev,
            });
        }
        worst = worst.max(dev);
    }
    Ok(PreservationVerdict {
        preserves: true,
        witness: None,
        residual: worst,
    })
}

/// Options for [`phase_invariance_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseScan {
    pub grid_size: usize,
    pub bases: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for PhaseScan {
    fn default() -> Self {
        Self {
            grid_size: 64,
            bases: 16,
            seed: 0,
            tol: 1e-10,
        }
    }
}

/// Rotates one coordinate of random complex inputs through a grid of phases
/// and reports how much `sum_j |y_j|^p` varies. Under the modulus
/// convention a preserving map must keep this constant.
pub fn phase_invariance_check(a: &Matrix, p: f64, scan: &PhaseScan) -> Result<PreservationVerdict, NormLawError> {
    let n = require_square(a)?;
    require_positive(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(scan.seed);
    let grid = scan.grid_size.max(2);
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for _ in 0..scan.bases {
        let base = unit_ball_vector(&mut rng, n, true);
        for l in 0..n {
            let mut totals = Vec::with_capacity(grid);
            let mut per_entry = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
            for g in 0..grid {
                let theta = std::f64::consts::TAU * g as f64 / grid as f64;
                let mut x = base.clone();
                x[l] *= Complex::from_polar(1.0, theta);
                let y = a.apply_to(&x);
                let w: Vec<f64> = y.iter().map(|z| z.norm().powf(p)).collect();
                for (range, wj) in per_entry.iter_mut().zip(&w) {
                    range.0 = range.0.min(*wj);
                    range.1 = range.1.max(*wj);
                }
                totals.push((theta, w.iter().sum::<f64>()));
            }
            let at_zero = totals[0].1;
            let (theta, dev) = totals
                .iter()
                .map(|&(t, s)| (t, (s - at_zero).abs()))
                .fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if dev > worst {
                worst = dev;
                if dev > scan.tol {
                    let j = (0..n)
                        .max_by(|&i, &k| {
                            (per_entry[i].1 - per_entry[i].0).total_cmp(&(per_entry[k].1 - per_entry[k].0))
                        })
                        .unwrap_or(0);
                    witness = Some(Witness::Phase {
                        base: base.clone(),
                        j,
                        l,
                        theta,
                    });
                }
            }
        }
    }
    Ok(PreservationVerdict {
        preserves: witness.is_none(),
        witness,
        residual: worst,
    })
}

/// Uniform sample helper shared by the scans: log-uniform in `[lo, hi]`.
pub(crate) fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hadamard() -> Matrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Matrix::from_real(2, 2, &[h, h, h, -h]).unwrap()
    }

    #[test]
    fn generalized_diagonal_examples() {
        let v = is_generalized_diagonal(&Matrix::identity(3), 1e-12).unwrap();
        assert!(v.is_generalized_diagonal);
        assert_eq!(v.permutation, Some(vec![0, 1, 2]));

        let ph = Complex::from_polar(1.0, 0.7);
        let m = Matrix::new(2, 2, vec![Complex::new(0.0, 0.0), ph, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]).unwrap();
        let v = is_generalized_diagonal(&m, 1e-12).unwrap();
        assert_eq!(v.permutation, Some(vec![1, 0]));
        assert_eq!(v.phases.unwrap()[0], ph);

        assert!(!is_generalized_diagonal(&hadamard(), 1e-12).unwrap().is_generalized_diagonal);
        // Two entries in one column.
        let m = Matrix::from_real(2, 2, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(!is_generalized_diagonal(&m, 1e-12).unwrap().is_generalized_diagonal);
        assert!(is_generalized_diagonal(&Matrix::zeros(2, 3), 1e-12).is_err());
    }

    #[test]
    fn hadamard_violates_four_norm_at_first_basis_vector() {
        let v = preserves_pnorm_numeric(&hadamard(), 4.0, &NumericCheck::default()).unwrap();
        assert!(!v.preserves);
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        assert_eq!(v.witness, Some(Witness::Vector(vec![one, zero])));
        // ||Hx||_4 = (1/2)^(1/4).
        assert!((v.residual - (1.0 - 0.5f64.powf(0.25))).abs() < 1e-15);
    }

    #[test]
    fn unitary_preserves_two_norm() {
        let v = preserves_pnorm_numeric(&hadamard(), 2.0, &NumericCheck::default()).unwrap();
        assert!(v.preserves && v.witness.is_none());
    }

    #[test]
    fn phased_permutation_preserves_three_norm() {
        let mut m = Matrix::zeros(3, 3);
        m[(0, 2)] = Complex::from_polar(1.0, 0.3);
        m[(1, 0)] = Complex::from_polar(1.0, -2.0);
        m[(2, 1)] = Complex::new(-1.0, 0.0);
        assert!(preserves_pnorm_numeric(&m, 3.0, &NumericCheck::default()).unwrap().preserves);
    }

    #[test]
    fn split_real_convention_rejects_complex_phases() {
        let m = Matrix::diagonal(&[Complex::from_polar(1.0, 0.4), Complex::new(1.0, 0.0)]);
        let split = NumericCheck {
            convention: ComplexConvention::SplitReal,
            domain: Domain::Complex,
            ..NumericCheck::default()
        };
        assert!(!preserves_pnorm_numeric(&m, 4.0, &split).unwrap().preserves);
        assert!(preserves_pnorm_numeric(&m, 4.0, &NumericCheck::default()).unwrap().preserves);
    }

    #[test]
    fn phase_scan_examples() {
        let d = Matrix::diagonal(&[Complex::from_polar(1.0, 1.0), Complex::from_polar(1.0, 2.0)]);
        let v = phase_invariance_check(&d, 4.0, &PhaseScan::default()).unwrap();
        assert!(v.preserves && v.residual <= 1e-12);

        let v = phase_invariance_check(&hadamard(), 4.0, &PhaseScan::default()).unwrap();
        assert!(!v.preserves);
        assert!(matches!(v.witness, Some(Witness::Phase { .. })));

        // Orthogonal columns keep the 2-norm phase-invariant.
        let v = phase_invariance_check(&hadamard(), 2.0, &PhaseScan::default()).unwrap();
        assert!(v.preserves);
    }

    #[test]
    fn rejects_bad_p() {
        assert!(preserves_pnorm_numeric(&hadamard(), 0.0, &NumericCheck::default()).is_err());
        assert!(phase_invariance_check(&hadamard(), -1.0, &PhaseScan::default()).is_err());
    }
}
