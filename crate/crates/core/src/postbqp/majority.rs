use serde::Serialize;

use super::{BooleanFunction, PostBqpError};
use crate::numerics::{Complex, ZERO};
use crate::state::{
    apply_gate, postselect, run_circuit, sample_many, Circuit, Gate, MeasurementRule, NormalizationMode,
    StateVector,
};

/// `(1 + sqrt 2) / sqrt 6`: some `i` reaches at least this overlap when
/// fewer than half the inputs are ones.
pub const GOOD_CASE_BOUND: f64 = 0.985_598_559_653_488_9;
/// `1 / sqrt 2`: no `i` exceeds this overlap when more than half are ones.
pub const BAD_CASE_BOUND: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Largest `n` simulated densely (`n + 2` qubits).
const MAX_DENSE_INPUTS: usize = 18;

/// Midpoint of the two overlap bounds.
pub fn majority_threshold() -> f64 {
    (GOOD_CASE_BOUND + BAD_CASE_BOUND) / 2.0
}

/// Midpoint of the squared bounds, used on the observed fraction of `+`.
fn sampled_threshold() -> f64 {
    (GOOD_CASE_BOUND * GOOD_CASE_BOUND + 0.5) / 2.0
}

fn check_padding(n: usize, s: usize) -> Result<(), PostBqpError> {
    if n == 0 || s == 0 || s > 1 << n || s == 1 << (n - 1) {
        return Err(PostBqpError::PaddingViolation { s, n });
    }
    Ok(())
}

fn check_index(n: usize, i: i32) -> Result<(), PostBqpError> {
    if i.unsigned_abs() as usize > n {
        return Err(PostBqpError::IndexOutOfRange { i, n });
    }
    Ok(())
}

fn check_dense(n: usize) -> Result<(), PostBqpError> {
    if n > MAX_DENSE_INPUTS {
        return Err(PostBqpError::TooLarge {
            what: "n",
            value: n,
            max: MAX_DENSE_INPUTS,
        });
    }
    Ok(())
}

/// `2^(-n/2) sum_x |x>|f(x)>` with the answer qubit last.
pub(crate) fn oracle_state(f: &BooleanFunction) -> StateVector {
    let n = f.n();
    let amp = Complex::new((0.5f64).powf(n as f64 / 2.0), 0.0);
    let mut a = vec![ZERO; 1 << (n + 1)];
    for x in 0..1usize << n {
        a[(x << 1) | f.eval(x) as usize] = amp;
    }
    StateVector::new(n + 1, a).expect("nonzero")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiPreparation {
    /// The one-qubit answer register after postselection.
    pub state: StateVector,
    /// 2-norm weight of the all-zero input register before postselecting.
    pub success_weight: f64,
}

/// Hadamards on the input register of `sum_x |x>|f(x)>`, then postselection
/// of every input qubit on 0, leaving `((2^n - s)|0> + s|1>)` normalized.
pub fn prepare_psi_s(f: &BooleanFunction) -> Result<PsiPreparation, PostBqpError> {
    let n = f.n();
    check_padding(n, f.ones())?;
    check_dense(n)?;
    let mut state = oracle_state(f);
    let h = Gate::hadamard();
    for q in 0..n {
        state = apply_gate(&state, &h, &[q], NormalizationMode::UnitaryOnly)?;
    }
    let success_weight = state.amplitude(0).norm_sqr() + state.amplitude(1).norm_sqr();
    for q in 0..n {
        state = postselect(&state, q, 0)?;
    }
    let state = StateVector::new(1, vec![state.amplitude(0), state.amplitude(1)])?;
    Ok(PsiPreparation { state, success_weight })
}

/// Amplitudes of `((2^n - s)|0> + s|1>) / sqrt((2^n - s)^2 + s^2)`.
pub fn psi_s_closed_form(s: usize, n: usize) -> [f64; 2] {
    let a = (1u64 << n) as f64 - s as f64;
    let b = s as f64;
    let norm = a.hypot(b);
    [a / norm, b / norm]
}

/// `|<+|phi_{s, 2^i}>|` in closed form, with `alpha = 1`, `beta = 2^i`.
pub fn varphi_overlap(s: usize, n: usize, i: i32) -> Result<f64, PostBqpError> {
    check_padding(n, s)?;
    check_index(n, i)?;
    let beta = 2f64.powi(i);
    let s = s as f64;
    let d = (1u64 << n) as f64 - 2.0 * s;
    let first = s;
    let second = beta * d * std::f64::consts::FRAC_1_SQRT_2;
    Ok((first + second).abs() / (std::f64::consts::SQRT_2 * first.hypot(second)))
}

/// Selection angle for `cos(t/2) |0> + sin(t/2) |1>` proportional to
/// `|0> + 2^i |1>`.
fn selection_angle(i: i32) -> f64 {
    2.0 * 2f64.powi(i).atan()
}

/// The same overlap from a full simulation: selection qubit first, then the
/// input register, then the answer qubit.
pub fn varphi_overlap_circuit(f: &BooleanFunction, i: i32) -> Result<f64, PostBqpError> {
    let n = f.n();
    check_padding(n, f.ones())?;
    check_index(n, i)?;
    check_dense(n)?;
    let answer = n + 1;
    let mut c = Circuit::new(n + 2);
    for q in 1..=n {
        c.push_gate(Gate::hadamard(), &[q], NormalizationMode::UnitaryOnly)?;
    }
    for q in 1..=n {
        c.push_postselect(q, 0)?;
    }
    c.push_gate(Gate::ry(selection_angle(i)), &[0], NormalizationMode::UnitaryOnly)?;
    c.push_gate(Gate::controlled(&Gate::hadamard()), &[0, answer], NormalizationMode::UnitaryOnly)?;
    c.push_postselect(answer, 1)?;
    c.push_gate(Gate::hadamard(), &[0], NormalizationMode::UnitaryOnly)?;
    let initial = StateVector::zero_state(1).tensor(&oracle_state(f));
    let out = run_circuit(&c, &initial)?;
    // Selection qubit 0, inputs 0, answer 1.
    Ok(out.amplitude(1).norm())
}

/// Second stage on `|0>|psi_s>`: selection rotation, controlled Hadamard,
/// postselection of the answer qubit on 1, Hadamard on the selection qubit.
/// Returns the selection qubit's amplitudes.
fn second_stage(psi: &StateVector, i: i32) -> Result<[Complex; 2], PostBqpError> {
    let mut c = Circuit::new(2);
    c.push_gate(Gate::ry(selection_angle(i)), &[0], NormalizationMode::UnitaryOnly)?;
    c.push_gate(Gate::controlled(&Gate::hadamard()), &[0, 1], NormalizationMode::UnitaryOnly)?;
    c.push_postselect(1, 1)?;
    c.push_gate(Gate::hadamard(), &[0], NormalizationMode::UnitaryOnly)?;
    let out = run_circuit(&c, &StateVector::zero_state(1).tensor(psi))?;
    Ok([out.amplitude(0b01), out.amplitude(0b11)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    LessThanHalf,
    GreaterThanHalf,
}

impl Verdict {
    /// The answer read off a known count.
    pub fn from_count(n: usize, ones: usize) -> Verdict {
        if 2 * ones < 1 << n {
            Verdict::LessThanHalf
        } else {
            Verdict::GreaterThanHalf
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DecisionMode {
    Exact,
    /// `trials` measurements per `i`; `None` means `n`.
    Sampled { seed: u64, trials: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerIndex {
    pub i: i32,
    pub overlap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plus_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plus_probability: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorityDecision {
    pub verdict: Verdict,
    pub per_i_overlaps: Vec<PerIndex>,
    /// Measurements per `i` (0 in exact mode).
    pub trials: usize,
    pub threshold: f64,
    pub good_case_bound: f64,
    pub bad_case_bound: f64,
    pub success_weight: f64,
}

/// Decides whether fewer or more than half of `f`'s inputs are ones by
/// preparing `|psi_s>` and, for each `i` in `[-n, n]`, the state
/// `|phi_{s, 2^i}>`. Exact mode thresholds the overlaps with `|+>`;
/// sampled mode measures in the `|+>, |->` basis and thresholds the
/// observed fraction of `+`.
pub fn postbqp_decide(f: &BooleanFunction, mode: DecisionMode) -> Result<MajorityDecision, PostBqpError> {
    let n = f.n();
    let prep = prepare_psi_s(f)?;
    let (trials, threshold) = match mode {
        DecisionMode::Exact => (0, majority_threshold()),
        DecisionMode::Sampled { trials, .. } => (trials.unwrap_or(n).max(1), sampled_threshold()),
    };
    let mut per_i = Vec::with_capacity(2 * n + 1);
    let mut good = false;
    for i in -(n as i32)..=n as i32 {
        let amps = second_stage(&prep.state, i)?;
        let overlap = amps[0].norm();
        let mut entry = PerIndex {
            i,
            overlap,
            plus_fraction: None,
            plus_probability: None,
        };
        match mode {
            DecisionMode::Exact => good |= overlap >= threshold,
            DecisionMode::Sampled { seed, .. } => {
                let qubit = StateVector::new(1, amps.to_vec())?;
                let stream = seed ^ ((i + n as i32) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let plus = sample_many(&qubit, &MeasurementRule::born(), stream, trials)
                    .into_iter()
                    .filter(|&k| k == 0)
                    .count();
                let fraction = plus as f64 / trials as f64;
                good |= fraction >= threshold;
                entry.plus_fraction = Some(fraction);
            }
        }
        per_i.push(entry);
    }
    Ok(MajorityDecision {
        verdict: if good { Verdict::LessThanHalf } else { Verdict::GreaterThanHalf },
        per_i_overlaps: per_i,
        trials,
        threshold,
        good_case_bound: GOOD_CASE_BOUND,
        bad_case_bound: BAD_CASE_BOUND,
        success_weight: prep.success_weight,
    })
}
