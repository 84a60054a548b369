use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use super::{
    is_generalized_diagonal, log_uniform, preserves_pnorm_numeric, require_positive, Domain, NormLawError,
    NumericCheck,
};
use crate::numerics::random::{gaussian_matrix, generalized_diagonal, haar_orthogonal, random_permutation};
use crate::numerics::{Complex, Matrix};
use crate::report::CheckReport;

/// Settings for [`island_scan_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IslandScan {
    pub num_matrices: usize,
    /// Random generalized diagonal matrices that must all pass.
    pub controls: usize,
    pub seed: u64,
    /// Norm deviation that counts as a violation.
    pub tol: f64,
    /// Random vectors per matrix, after the basis vectors.
    pub trials: usize,
    /// Entries below this modulus count as zero when classifying.
    pub zero_tol: f64,
}

impl IslandScan {
    pub fn new(num_matrices: usize, seed: u64) -> Self {
        Self {
            num_matrices,
            controls: num_matrices / 10,
            seed,
            tol: 1e-8,
            trials: 32,
            zero_tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Family {
    HaarOrthogonal,
    PerturbedGeneralizedDiagonal,
    DenseGaussian,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::HaarOrthogonal => "haar_orthogonal",
            Family::PerturbedGeneralizedDiagonal => "perturbed_generalized_diagonal",
            Family::DenseGaussian => "dense_gaussian",
        }
    }
}

#[derive(Serialize)]
struct Exception<'a> {
    family: Family,
    matrix: &'a Matrix,
    deviation: f64,
}

fn sample(rng: &mut ChaCha8Rng, family: Family, n: usize) -> Matrix {
    match family {
        Family::HaarOrthogonal => haar_orthogonal(rng, n),
        Family::PerturbedGeneralizedDiagonal => {
            let complex = rng.random_bool(0.5);
            let eps = log_uniform(rng, 1e-4, 1e-1);
            let noise = gaussian_matrix(rng, n, n, complex);
            generalized_diagonal(rng, n, complex).add(&noise.scale(Complex::new(eps, 0.0)))
        }
        Family::DenseGaussian => {
            let complex = rng.random_bool(0.5);
            gaussian_matrix(rng, n, n, complex).scale(Complex::new(1.0 / (n as f64).sqrt(), 0.0))
        }
    }
}

/// [`island_scan_with`] using `num_matrices / 10` controls and tolerance
/// `1e-8`.
pub fn island_scan(n: usize, p: f64, num_matrices: usize, seed: u64) -> Result<CheckReport, NormLawError> {
    island_scan_with(n, p, &IslandScan::new(num_matrices, seed))
}

/// Samples Haar-orthogonal, perturbed generalized diagonal and dense
/// Gaussian matrices in rotation and checks that every one that passes the
/// numeric preservation test is generalized diagonal. Random generalized
/// diagonal controls must all pass.
pub fn island_scan_with(n: usize, p: f64, scan: &IslandScan) -> Result<CheckReport, NormLawError> {
    require_positive(p)?;
    if p == 2.0 {
        return Err(NormLawError::PEqualsTwo);
    }
    let mut report = CheckReport::new(
        format!("for p = {p}, n = {n}: every sampled p-norm preserver is generalized diagonal"),
        scan.seed,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(scan.seed);
    let families = [
        Family::HaarOrthogonal,
        Family::PerturbedGeneralizedDiagonal,
        Family::DenseGaussian,
    ];
    let mut smallest_violation = f64::INFINITY;
    for i in 0..scan.num_matrices {
        let family = families[i % families.len()];
        let a = sample(&mut rng, family, n);
        let check = NumericCheck {
            trials: scan.trials,
            seed: rng.random(),
            tol: scan.tol,
            ..NumericCheck::default()
        };
        let verdict = preserves_pnorm_numeric(&a, p, &check)?;
        report.count(&format!("sampled_{}", family.name()), 1);
        if verdict.preserves {
            report.count("preservers", 1);
            report.residual("max_preserver_deviation", verdict.residual);
            if !is_generalized_diagonal(&a, scan.zero_tol)?.is_generalized_diagonal {
                report.fail_with(Exception {
                    family,
                    matrix: &a,
                    deviation: verdict.residual,
                });
            }
        } else {
            smallest_violation = smallest_violation.min(verdict.residual);
        }
    }
    if smallest_violation.is_finite() {
        report.residuals.insert("smallest_violation".into(), smallest_violation);
    }

    for _ in 0..scan.controls {
        let complex = rng.random_bool(0.5);
        let a = generalized_diagonal(&mut rng, n, complex);
        let check = NumericCheck {
            trials: scan.trials,
            seed: rng.random(),
            tol: scan.tol,
            ..NumericCheck::default()
        };
        let verdict = preserves_pnorm_numeric(&a, p, &check)?;
        report.count("controls", 1);
        report.residual("max_control_deviation", verdict.residual);
        if verdict.preserves {
            report.count("controls_passed", 1);
        } else {
            report.fail_with(serde_json::json!({ "control": &a, "witness": verdict.witness }));
        }
    }
    report.note("controls are random generalized diagonal matrices with unimodular entries");
    Ok(report)
}

/// Column-stochastic matrix with Dirichlet(1, ..., 1) columns.
fn random_stochastic(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for k in 0..n {
        let col: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = col.iter().sum();
        for (j, x) in col.iter().enumerate() {
            m[(j, k)] = Complex::new(x / total, 0.0);
        }
    }
    m
}

fn permutation_matrix(perm: &[usize]) -> Matrix {
    let mut m = Matrix::zeros(perm.len(), perm.len());
    for (j, &k) in perm.iter().enumerate() {
        m[(j, k)] = Complex::new(1.0, 0.0);
    }
    m
}

/// At p = 1: stochastic matrices preserve the 1-norm of nonnegative vectors,
/// but on signed vectors only permutation matrices do.
pub fn stochastic_cone_check(n: usize, num_matrices: usize, seed: u64) -> Result<CheckReport, NormLawError> {
    let mut report = CheckReport::new(
        format!("for p = 1, n = {n}: stochastic matrices preserve the cone, only permutations preserve signed vectors"),
        seed,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..num_matrices {
        let is_perm = i % 4 == 0;
        let a = if is_perm {
            permutation_matrix(&random_permutation(&mut rng, n))
        } else {
            random_stochastic(&mut rng, n)
        };
        let cone = NumericCheck {
            seed: rng.random(),
            tol: 1e-10,
            domain: Domain::NonnegativeReal,
            ..NumericCheck::default()
        };
        let signed = NumericCheck {
            domain: Domain::Real,
            ..cone
        };
        let on_cone = preserves_pnorm_numeric(&a, 1.0, &cone)?;
        let on_signed = preserves_pnorm_numeric(&a, 1.0, &signed)?;
        report.residual("max_cone_deviation", on_cone.residual);
        report.count(if is_perm { "permutations" } else { "stochastic" }, 1);
        report.require(on_cone.preserves, serde_json::json!({ "cone_violation": &a }));
        let gd = is_generalized_diagonal(&a, 1e-12)?.is_generalized_diagonal;
        report.require(
            on_signed.preserves == gd,
            serde_json::json!({ "signed_mismatch": &a, "preserves": on_signed.preserves }),
        );
        if on_signed.preserves {
            report.count("signed_preservers", 1);
        }
    }
    Ok(report)
}
