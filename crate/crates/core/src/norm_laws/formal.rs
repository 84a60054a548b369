use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use super::{require_square, NormLawError, PreservationVerdict, Witness};
use crate::numerics::Matrix;

/// Relative tolerance for coefficient comparison in floating point.
pub const FLOAT_COEFFICIENT_TOL: f64 = 1e-12;

/// Scalars the coefficient expansion can run over.
pub trait FormalScalar: Clone + Zero + One + Signed + FromPrimitive + ToPrimitive {
    /// Whether `diff` counts as zero next to a coefficient of size `scale`.
    fn negligible(diff: &Self, scale: &Self) -> bool;
}

impl FormalScalar for f64 {
    fn negligible(diff: &f64, scale: &f64) -> bool {
        diff.abs() <= FLOAT_COEFFICIENT_TOL * scale.max(1.0)
    }
}

impl FormalScalar for BigRational {
    fn negligible(diff: &BigRational, _: &BigRational) -> bool {
        diff.is_zero()
    }
}

/// Compares `sum_j (sum_k a_jk x_k)^p` with `sum_k x_k^p` coefficient by
/// coefficient, then checks `sum_j a_jk^(p-2) a_jl^2 = delta_kl` for all
/// `k, l`. The first mismatch becomes the witness.
pub fn formal_check<T: FormalScalar>(a: &[Vec<T>], p: u32) -> Result<PreservationVerdict, NormLawError> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(NormLawError::NotSquare {
            rows: n,
            cols: a.first().map_or(0, Vec::len),
        });
    }
    if !(2..=8).contains(&p) || p % 2 != 0 {
        return Err(NormLawError::UnsupportedP(p));
    }
    if n > 6 {
        return Err(NormLawError::TooLarge(n));
    }
    let pe = p as usize;
    // powers[j][k][e] = a_jk^e
    let powers: Vec<Vec<Vec<T>>> = a
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let mut v = vec![T::one()];
                    for e in 1..=pe {
                        v.push(v[e - 1].clone() * x.clone());
                    }
                    v
                })
                .collect()
        })
        .collect();
    let factorial: Vec<u64> = (0..=pe as u64).scan(1u64, |f, k| {
        if k > 0 {
            *f *= k;
        }
        Some(*f)
    }).collect();

    let mut first: Option<Witness> = None;
    let mut worst: f64 = 0.0;
    let mut note = |witness: Witness, diff: &T, scale: &T| {
        let size = diff.abs().to_f64().unwrap_or(f64::INFINITY);
        worst = worst.max(size);
        if !T::negligible(diff, scale) && first.is_none() {
            first = Some(witness);
        }
    };

    for alpha in compositions(n, p) {
        let multinomial = alpha
            .iter()
            .fold(factorial[pe], |acc, &e| acc / factorial[e as usize]);
        let mut sum = T::zero();
        let mut scale = T::zero();
        for row in &powers {
            let term = alpha
                .iter()
                .enumerate()
                .fold(T::one(), |acc, (k, &e)| acc * row[k][e as usize].clone());
            scale = scale + term.abs();
            sum = sum + term;
        }
        let m = T::from_u64(multinomial).expect("small multinomial");
        let lhs = m.clone() * sum;
        let rhs = if alpha.contains(&p) { T::one() } else { T::zero() };
        note(Witness::Monomial(alpha), &(lhs - rhs), &(m * scale));
    }

    if p >= 4 {
        for k in 0..n {
            for l in 0..n {
                let mut sum = T::zero();
                let mut scale = T::zero();
                for row in &powers {
                    let term = row[k][pe - 2].clone() * row[l][2].clone();
                    scale = scale + term.abs();
                    sum = sum + term;
                }
                let delta = if k == l { T::one() } else { T::zero() };
                note(Witness::Constraint { k, l }, &(sum - delta), &scale);
            }
        }
    }

    Ok(PreservationVerdict {
        preserves: first.is_none(),
        witness: first,
        residual: worst,
    })
}

/// Floating-point formal check on a real matrix.
pub fn preserves_pnorm_formal_even(a: &Matrix, p: u32) -> Result<PreservationVerdict, NormLawError> {
    require_square(a)?;
    let imag = a.max_imag();
    if imag > 1e-12 {
        return Err(NormLawError::NotReal(imag));
    }
    let rows: Vec<Vec<f64>> = (0..a.rows()).map(|i| a.row(i).iter().map(|z| z.re).collect()).collect();
    formal_check(&rows, p)
}

/// Exact formal check over the rationals.
pub fn preserves_pnorm_formal_exact(a: &[Vec<BigRational>], p: u32) -> Result<PreservationVerdict, NormLawError> {
    formal_check(a, p)
}

/// All exponent vectors of length `n` with entries summing to `total`, in
/// lexicographically decreasing order.
fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            go(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, total, &mut Vec::with_capacity(n), &mut out);
    }
    out
}
