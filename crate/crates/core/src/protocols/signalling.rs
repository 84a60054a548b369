use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::discrimination::build_discrimination_setup;
use super::{check_d, check_p, total_variation, ProtocolError};
use crate::numerics::{Complex, Matrix};
use crate::state::{
    apply_gate, postselect, qubit_marginal, Gate, MeasurementRule, NormalizationMode, StateVector,
};

/// Leak amplitude that keeps the steering maps invertible.
pub const STEERING_LEAK: f64 = 1e-3;

/// Target error for the pair count in option (i).
const TARGET_ERROR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignallingReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, f64>,
    pub actions: Vec<String>,
    /// Bob's outcome distribution for each of Alice's actions.
    pub bob_marginals: Vec<Vec<f64>>,
    /// Largest pairwise total variation distance between the marginals.
    pub tvd: f64,
    /// Average probability that Bob's best guess names Alice's action.
    pub success: f64,
    pub bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs_needed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steering_residual: Option<f64>,
    pub notes: Vec<String>,
}

fn max_tvd(marginals: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, x) in marginals.iter().enumerate() {
        for y in &marginals[a + 1..] {
            worst = worst.max(total_variation(x, y));
        }
    }
    worst
}

/// `(|00> + |11>) / sqrt 2` with Alice's half first and Bob's half as the
/// least significant of `bob_qubits` qubits.
fn epr_pair(bob_qubits: usize) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = vec![Complex::new(0.0, 0.0); 1 << (bob_qubits + 1)];
    a[0] = Complex::new(h, 0.0);
    a[(1 << bob_qubits) | 1] = Complex::new(h, 0.0);
    StateVector::new(bob_qubits + 1, a).expect("nonzero")
}

/// Bob's marginal over his register (every qubit except the first).
fn bob_distribution(state: &StateVector, rule: &MeasurementRule) -> Vec<f64> {
    let half = state.dim() / 2;
    let w = rule.weights(state.amplitudes());
    (0..half).map(|k| w[k] + w[half + k]).collect()
}

/// Alice applies `diag(1, eps)` or `diag(eps, 1)` to her half of an EPR pair
/// under global normalization; Bob measures his half with the 2-norm rule.
/// At `eps = 0` the maps are singular and the condition guard is waived.
pub fn signalling_option_ii(eps: f64) -> Result<SignallingReport, ProtocolError> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(ProtocolError::InvalidEpsilon(eps));
    }
    let mut notes = vec!["Alice's maps are applied with global normalization".to_string()];
    let limit = if eps == 0.0 {
        notes.push("eps = 0 makes Alice's maps singular; the condition-number guard was overridden".into());
        None
    } else {
        Some(crate::state::CONDITION_LIMIT)
    };
    let one = Complex::new(1.0, 0.0);
    let e = Complex::new(eps, 0.0);
    let rule = MeasurementRule::born();
    let mut marginals = Vec::new();
    for diag in [[one, e], [e, one]] {
        let gate = Gate::invertible_with_limit(Matrix::diagonal(&diag), limit)?;
        let out = apply_gate(&epr_pair(1), &gate, &[0], NormalizationMode::Global)?;
        marginals.push(qubit_marginal(&out, &rule, 1).to_vec());
    }
    let tvd = max_tvd(&marginals);
    let success = (1.0 + tvd) / 2.0;
    Ok(SignallingReport {
        scenario: "option_ii".into(),
        parameters: BTreeMap::from([("epsilon".into(), eps), ("p".into(), 2.0)]),
        actions: vec!["diag(1, eps)".into(), "diag(eps, 1)".into()],
        bob_marginals: marginals,
        tvd,
        success,
        bits: if success >= 2.0 / 3.0 { 1.0 } else { 0.0 },
        pairs_needed: None,
        steering_residual: None,
        notes,
    })
}

fn register_qubits(d: usize) -> usize {
    (usize::BITS - (d - 1).leading_zeros()).max(1) as usize
}

/// The discrimination unitary padded with the identity to `2^b` rows.
fn padded_unitary(u: &Matrix, b: usize) -> Matrix {
    let mut m = Matrix::identity(1 << b);
    for i in 0..u.rows() {
        for j in 0..u.cols() {
            m[(i, j)] = u[(i, j)];
        }
    }
    m
}

/// Alice steers Bob's half of one EPR pair to `|psi_j>` with the map whose
/// rows are `psi_j` and `eps psi_j^perp`, leaving
/// `|0>|psi_j> + eps |1>|psi_j^perp>`. Bob applies the discrimination
/// unitary and measures with the p-norm rule.
pub fn signalling_multistate_ii(d: usize, p: f64) -> Result<SignallingReport, ProtocolError> {
    check_d(d)?;
    check_p(p)?;
    let setup = build_discrimination_setup(d, p)?;
    let b = register_qubits(d);
    let bob_gate = Gate::unitary(padded_unitary(&setup.unitary, b))?;
    let bob_targets: Vec<usize> = (1..=b).collect();
    let rule = MeasurementRule::new(p)?;
    let eps = STEERING_LEAK;
    let mut marginals = Vec::with_capacity(d);
    let mut residual: f64 = 0.0;
    for [c, s] in &setup.states {
        let steer = Matrix::from_real(2, 2, &[*c, *s, -eps * s, eps * c])?;
        let gate = Gate::invertible(steer)?;
        let steered = apply_gate(&epr_pair(b), &gate, &[0], NormalizationMode::Global)?;
        residual = residual.max(steering_residual(&steered, b, [*c, *s]));
        let out = apply_gate(&steered, &bob_gate, &bob_targets, NormalizationMode::UnitaryOnly)?;
        marginals.push(bob_distribution(&out, &rule)[..d].to_vec());
    }
    let success = (0..d).map(|j| marginals[j][j]).sum::<f64>() / d as f64;
    let tvd = max_tvd(&marginals);
    Ok(SignallingReport {
        scenario: "multistate_ii".into(),
        parameters: BTreeMap::from([("d".into(), d as f64), ("p".into(), p), ("epsilon".into(), eps)]),
        actions: (0..d).map(|j| format!("steer to state {j}")).collect(),
        bob_marginals: marginals,
        tvd,
        success,
        bits: if success >= 2.0 / 3.0 { (d as f64).log2() } else { 0.0 },
        pairs_needed: None,
        steering_residual: Some(residual),
        notes: vec![
            "one EPR pair per use; bits reported as log2 d of distinguished states".into(),
            "columns rescaled by sqrt 2 for unitarity; probabilities are unchanged".into(),
        ],
    })
}

/// Frobenius distance between Bob's normalized reduced state on his EPR
/// qubit and `|psi><psi|`.
fn steering_residual(state: &StateVector, b: usize, psi: [f64; 2]) -> f64 {
    let a = state.amplitudes();
    let mut rho = [[Complex::new(0.0, 0.0); 2]; 2];
    for alice in 0..2 {
        let v = [a[alice << b], a[(alice << b) | 1]];
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] += v[i] * v[j].conj();
            }
        }
    }
    let trace = rho[0][0].re + rho[1][1].re;
    let mut sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            sum += (rho[i][j] / trace - Complex::new(psi[i] * psi[j], 0.0)).norm_sqr();
        }
    }
    sum.sqrt()
}

/// Bob's outcome distribution averaged over Alice's results when she
/// measures her half in the Z basis (`x_basis = false`) or X basis.
fn ensemble(d: usize, p: f64, x_basis: bool) -> Result<Vec<f64>, ProtocolError> {
    let setup = build_discrimination_setup(d, p)?;
    let b = register_qubits(d);
    let rule = MeasurementRule::new(p)?;
    let mut pair = epr_pair(b);
    if x_basis {
        pair = apply_gate(&pair, &Gate::hadamard(), &[0], NormalizationMode::UnitaryOnly)?;
    }
    let alice = qubit_marginal(&pair, &rule, 0);
    let bob_gate = Gate::unitary(padded_unitary(&setup.unitary, b))?;
    let targets: Vec<usize> = (1..=b).collect();
    let mut avg = vec![0.0; d];
    for (bit, weight) in alice.iter().enumerate() {
        let collapsed = postselect(&pair, 0, bit as u8)?;
        let out = apply_gate(&collapsed, &bob_gate, &targets, NormalizationMode::UnitaryOnly)?;
        for (slot, w) in avg.iter_mut().zip(bob_distribution(&out, &rule)) {
            *slot += weight * w;
        }
    }
    Ok(avg)
}

/// Per-pair TVD between the Z and X ensembles; 0 at `p = 2`.
pub fn option_i_ensemble_tvd(p: f64, d: usize) -> Result<f64, ProtocolError> {
    check_d(d)?;
    check_p(p)?;
    Ok(total_variation(&ensemble(d, p, false)?, &ensemble(d, p, true)?))
}

/// Pairs so a threshold test on `N` independent outcomes errs with
/// probability at most `delta`: Hoeffding gives `exp(-N tvd^2 / 2)`.
pub fn pairs_needed(tvd: f64, delta: f64) -> Option<u64> {
    (tvd > 0.0).then(|| (2.0 * (1.0 / delta).ln() / (tvd * tvd)).ceil() as u64)
}

/// Alice measures her halves of `pairs` EPR pairs in Z (bit 0) or X (bit 1);
/// Bob sends each of his halves through the discrimination unitary.
pub fn signalling_option_i(p: f64, d: usize, pairs: u64) -> Result<SignallingReport, ProtocolError> {
    check_d(d)?;
    check_p(p)?;
    if p == 2.0 {
        return Err(ProtocolError::PEqualsTwo);
    }
    let z = ensemble(d, p, false)?;
    let x = ensemble(d, p, true)?;
    let tvd = total_variation(&z, &x);
    let needed = pairs_needed(tvd, TARGET_ERROR);
    let error_bound = (-(pairs as f64) * tvd * tvd / 2.0).exp();
    let mut notes = vec![
        "each basis yields an antipodal pair of states; two-outcome measurements cannot separate the ensembles, so d >= 4 outcomes are used".to_string(),
        format!("Hoeffding error bound with {pairs} pairs: {error_bound:e}"),
    ];
    if d < 4 {
        notes.push("d < 4 may leave the ensembles indistinguishable".into());
    }
    Ok(SignallingReport {
        scenario: "option_i".into(),
        parameters: BTreeMap::from([("d".into(), d as f64), ("p".into(), p), ("pairs".into(), pairs as f64)]),
        actions: vec!["measure Z".into(), "measure X".into()],
        bob_marginals: vec![z, x],
        tvd,
        success: 1.0 - error_bound.min(0.5),
        bits: if needed.is_some_and(|n| n <= pairs) { 1.0 } else { 0.0 },
        pairs_needed: needed,
        steering_residual: None,
        notes,
    })
}

/// Fraction of `runs` simulated transmissions decoded wrongly with `pairs`
/// pairs each. The decoder counts outcomes where the Z ensemble is more
/// likely and compares the count with the midpoint of the two expectations.
pub fn option_i_monte_carlo(p: f64, d: usize, pairs: u64, runs: usize, seed: u64) -> Result<f64, ProtocolError> {
    let z = ensemble(d, p, false)?;
    let x = ensemble(d, p, true)?;
    let favors_z: Vec<bool> = z.iter().zip(&x).map(|(a, b)| a > b).collect();
    let mass = |dist: &[f64]| dist.iter().zip(&favors_z).filter(|(_, &f)| f).map(|(w, _)| w).sum::<f64>();
    let cut = (mass(&z) + mass(&x)) / 2.0 * pairs as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cumulative = |dist: &[f64]| {
        dist.iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect::<Vec<f64>>()
    };
    let tables = [cumulative(&z), cumulative(&x)];
    let mut wrong = 0usize;
    for run in 0..runs {
        let bit = run % 2;
        let hits = (0..pairs)
            .filter(|_| {
                let u: f64 = rng.random();
                let k = tables[bit].iter().position(|&c| u < c).unwrap_or(d - 1);
                favors_z[k]
            })
            .count() as f64;
        let decoded = if hits > cut { 0 } else { 1 };
        if decoded != bit {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / runs as f64)
}
