use std::f64::consts::PI;

use serde::Serialize;

use super::{check_d, check_p, ProtocolError};
use crate::numerics::{complete_to_unitary, Complex, Matrix, Vector};
use crate::report::CheckReport;
use crate::state::{sample_distribution, MeasurementRule};

/// A `d x d` unitary whose first two columns are `sqrt(2/d) cos(pi k/d)`
/// and `sqrt(2/d) sin(pi k/d)`, and the `d` qubit states
/// `cos(pi j/d)|0> + sin(pi j/d)|1>` it separates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscriminationSetup {
    pub d: usize,
    pub p: f64,
    pub unitary: Matrix,
    /// `(cos, sin)` of each state.
    pub states: Vec<[f64; 2]>,
    /// `max |U^dagger U - I|`.
    pub unitarity_residual: f64,
}

/// Builds the setup. The two prescribed columns have 2-norm `1/sqrt 2`, so
/// they are scaled by `sqrt 2` before completion; the p-norm rule divides
/// by the total weight, so no probability changes.
pub fn build_discrimination_setup(d: usize, p: f64) -> Result<DiscriminationSetup, ProtocolError> {
    check_d(d)?;
    check_p(p)?;
    let scale = (2.0 / d as f64).sqrt();
    let angle = |k: usize| PI * k as f64 / d as f64;
    let cos_col = Vector::from_real(&(0..d).map(|k| scale * angle(k).cos()).collect::<Vec<_>>())?;
    let sin_col = Vector::from_real(&(0..d).map(|k| scale * angle(k).sin()).collect::<Vec<_>>())?;
    let unitary = complete_to_unitary(&[cos_col, sin_col])?;
    Ok(DiscriminationSetup {
        d,
        p,
        unitarity_residual: unitary.unitarity_residual(),
        states: (0..d).map(|j| [angle(j).cos(), angle(j).sin()]).collect(),
        unitary,
    })
}

/// Outcome distribution when state `j` is sent through the unitary and
/// measured with the p-norm rule.
pub fn discrimination_distribution(setup: &DiscriminationSetup, j: usize) -> Result<Vec<f64>, ProtocolError> {
    if j >= setup.d {
        return Err(ProtocolError::StateOutOfRange { j, d: setup.d });
    }
    let mut input = vec![Complex::new(0.0, 0.0); setup.d];
    input[0] = Complex::new(setup.states[j][0], 0.0);
    input[1] = Complex::new(setup.states[j][1], 0.0);
    let out = setup.unitary.apply_to(&input);
    Ok(MeasurementRule::new(setup.p)?.weights(&out))
}

/// Probability that guessing the measured outcome misidentifies state `j`.
pub fn discrimination_error(setup: &DiscriminationSetup, j: usize) -> Result<f64, ProtocolError> {
    let dist = discrimination_distribution(setup, j)?;
    Ok(1.0 - dist[j])
}

/// `2 sum_{k=1}^{(d-1)/2} |cos(pi k/d)|^p`: the weight leaking away from
/// the right outcome, relative to it, for odd `d`.
pub fn leak_weight(d: usize, p: f64) -> f64 {
    2.0 * (1..=(d - 1) / 2)
        .map(|k| (PI * k as f64 / d as f64).cos().abs().powf(p))
        .sum::<f64>()
}

/// Evaluates each link of
/// `q <= 2 sum (1 - x^2/2 + x^4/24)^p <= 2 sum (1 - x^2/4)^(2p)
///    <= 2 sum exp(-x^2 p / 2)`
/// with `x = pi k / d`, and that the exact error equals `q / (q + 1)`.
pub fn discrimination_bound_check(d: usize, p: f64) -> Result<CheckReport, ProtocolError> {
    check_d(d)?;
    check_p(p)?;
    if d % 2 == 0 {
        return Err(ProtocolError::EvenDimension(d));
    }
    let mut report = CheckReport::new(format!("leak weight bound chain for d = {d}, p = {p}"), 0);
    let xs: Vec<f64> = (1..=(d - 1) / 2).map(|k| PI * k as f64 / d as f64).collect();
    let sum = |f: &dyn Fn(f64) -> f64| 2.0 * xs.iter().map(|&x| f(x)).sum::<f64>();
    let sides = [
        ("q", leak_weight(d, p)),
        ("taylor", sum(&|x| (1.0 - x * x / 2.0 + x.powi(4) / 24.0).powf(p))),
        ("square", sum(&|x| (1.0 - x * x / 4.0).powf(2.0 * p))),
        ("exponential", sum(&|x| (-x * x * p / 2.0).exp())),
    ];
    for w in sides.windows(2) {
        let (lname, l) = w[0];
        let (rname, r) = w[1];
        let slack = r - l;
        report.residual(&format!("{lname}_minus_{rname}"), -slack);
        report.require(
            l <= r * (1.0 + 1e-12) + f64::MIN_POSITIVE,
            serde_json::json!({ "link": format!("{lname} <= {rname}"), "lhs": l, "rhs": r }),
        );
    }
    for (name, value) in sides {
        report.residual(name, value);
    }
    let q = sides[0].1;
    let setup = build_discrimination_setup(d, p)?;
    let error = discrimination_error(&setup, 0)?;
    report.residual("error_formula_gap", (error - q / (q + 1.0)).abs());
    report.require(
        (error - q / (q + 1.0)).abs() <= 1e-12,
        serde_json::json!({ "error": error, "q_over_q_plus_one": q / (q + 1.0) }),
    );
    report.note("columns rescaled by sqrt 2 for unitarity; probabilities are unchanged");
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    pub errors: usize,
    pub rate: f64,
    pub exact: f64,
    /// `sqrt(exact (1 - exact) / samples)`.
    pub sigma: f64,
    pub within_three_sigma: bool,
}

/// Seeded sampling estimate of [`discrimination_error`].
pub fn discrimination_monte_carlo(
    setup: &DiscriminationSetup,
    j: usize,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate, ProtocolError> {
    let dist = discrimination_distribution(setup, j)?;
    let exact = 1.0 - dist[j];
    let errors = sample_distribution(&dist, seed, samples)
        .into_iter()
        .filter(|&k| k != j)
        .count();
    let rate = errors as f64 / samples as f64;
    let sigma = (exact * (1.0 - exact) / samples as f64).sqrt();
    Ok(MonteCarloEstimate {
        samples,
        errors,
        rate,
        exact,
        sigma,
        within_three_sigma: (rate - exact).abs() <= 3.0 * sigma,
    })
}
