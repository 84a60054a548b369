use serde::Serialize;

use super::majority::{oracle_state, GOOD_CASE_BOUND};
use super::{BooleanFunction, MajorityDecision, PerIndex, PostBqpError, Verdict};
use crate::numerics::{compensated_sum, Complex, Matrix};
use crate::state::{
    apply_gate, qubit_marginal, run_circuit, Circuit, Gate, MeasurementRule, NormalizationMode, StateVector,
};

/// Total qubits allowed in a dense gadget simulation.
const MAX_GADGET_QUBITS: usize = 24;
const MAX_DECIDE_INPUTS: usize = 12;

fn check_p(p: f64) -> Result<(), PostBqpError> {
    if p.is_nan() || p <= 0.0 {
        return Err(PostBqpError::NonPositiveP(p));
    }
    if p == 2.0 {
        return Err(PostBqpError::PEqualsTwo);
    }
    Ok(())
}

/// `ceil(10 p n / |2 - p|)` ancillas per postselection.
pub fn gadget_size(p: f64, n: usize) -> Result<usize, PostBqpError> {
    check_p(p)?;
    Ok((10.0 * p * n as f64 / (2.0 - p).abs()).ceil() as usize)
}

/// Hadamard on the second qubit when the first equals `control`.
fn conditional_hadamard(control: u8) -> Gate {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Matrix::identity(4);
    let base = 2 * control as usize;
    m[(base, base)] = Complex::new(h, 0.0);
    m[(base, base + 1)] = Complex::new(h, 0.0);
    m[(base + 1, base)] = Complex::new(h, 0.0);
    m[(base + 1, base + 1)] = Complex::new(-h, 0.0);
    Gate::unitary(m).expect("conditional Hadamard is unitary")
}

/// Sum of `|a_x|^p` over basis states with `qubit = bit`.
fn p_weight(state: &StateVector, qubit: usize, bit: u8, p: f64) -> f64 {
    let shift = state.num_qubits() - 1 - qubit;
    compensated_sum(
        state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(x, _)| ((x >> shift) & 1) as u8 == bit)
            .map(|(_, z)| z.norm().powf(p)),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GadgetOutcome {
    /// The input state with `ancillas` extra qubits appended.
    pub state: StateVector,
    pub qubit: usize,
    pub favored_bit: u8,
    /// Value of `qubit` that triggers the Hadamards.
    pub conditioned_bit: u8,
    pub ancillas: usize,
    pub p: f64,
    /// `2^(m (1 - p/2))`.
    pub expected_factor: f64,
    /// Observed p-norm weight ratio (after / before) on the conditioned
    /// branch; absent when that branch was empty.
    pub measured_factor: Option<f64>,
    /// Same ratio on the other branch, which must be 1.
    pub other_factor: Option<f64>,
    /// p-norm marginal of `qubit` after the gadget.
    pub marginal: [f64; 2],
}

/// Favors `qubit = 1`; see [`postselection_gadget_for`].
pub fn postselection_gadget(state: &StateVector, qubit: usize, p: f64, m: usize) -> Result<GadgetOutcome, PostBqpError> {
    postselection_gadget_for(state, qubit, 1, p, m)
}

/// Appends `m` ancillas in `|0>` and applies a Hadamard to each, conditioned
/// on `qubit = bit` when `p < 2` and on `qubit != bit` when `p > 2`. Each
/// conditioned amplitude spreads over `2^m` entries of size `2^(-m/2)`, so
/// the conditioned branch's p-norm weight changes by `2^(m (1 - p/2))`.
pub fn postselection_gadget_for(
    state: &StateVector,
    qubit: usize,
    bit: u8,
    p: f64,
    m: usize,
) -> Result<GadgetOutcome, PostBqpError> {
    check_p(p)?;
    let n = state.num_qubits();
    if qubit >= n {
        return Err(crate::state::StateError::QubitOutOfRange { qubit, num_qubits: n }.into());
    }
    if bit > 1 {
        return Err(crate::state::StateError::InvalidBit(bit).into());
    }
    if n + m > MAX_GADGET_QUBITS {
        return Err(PostBqpError::TooLarge {
            what: "qubits",
            value: n + m,
            max: MAX_GADGET_QUBITS,
        });
    }
    let conditioned_bit = if p < 2.0 { bit } else { 1 - bit };
    let gate = conditional_hadamard(conditioned_bit);
    let mut out = state.tensor(&StateVector::zero_state(m));
    for k in 0..m {
        out = apply_gate(&out, &gate, &[qubit, n + k], NormalizationMode::UnitaryOnly)?;
    }
    let ratio = |b: u8| {
        let before = p_weight(state, qubit, b, p);
        (before > 0.0).then(|| p_weight(&out, qubit, b, p) / before)
    };
    Ok(GadgetOutcome {
        marginal: qubit_marginal(&out, &MeasurementRule::new(p)?, qubit),
        qubit,
        favored_bit: bit,
        conditioned_bit,
        ancillas: m,
        p,
        expected_factor: 2f64.powf(m as f64 * (1.0 - p / 2.0)),
        measured_factor: ratio(conditioned_bit),
        other_factor: ratio(1 - conditioned_bit),
        state: out,
    })
}

/// [`decide_via_bqp_p_with`] using [`gadget_size`] ancillas per gadget.
pub fn decide_via_bqp_p(f: &BooleanFunction, p: f64) -> Result<MajorityDecision, PostBqpError> {
    decide_via_bqp_p_with(f, p, None)
}

/// Lower bound on `P(+)` in the good case: `c^p / (c^p + (1 - c^2)^(p/2))`
/// with `c` the good-case overlap.
fn good_case_plus_probability(p: f64) -> f64 {
    let c = GOOD_CASE_BOUND;
    let good = c.powf(p);
    good / (good + (1.0 - c * c).powf(p / 2.0))
}

/// Runs the majority algorithm with every postselection replaced by a
/// gadget and a final p-norm measurement of the selection qubit.
///
/// The gadgets act on qubits that are never touched again, so instead of
/// materializing `2^(m (n + 1))` ancilla amplitudes the weight of each
/// basis state is multiplied by `2^(m (1 - p/2))` per triggered gadget, in
/// the log domain. [`postselection_gadget_for`] checks that factor against
/// explicit ancillas.
pub fn decide_via_bqp_p_with(f: &BooleanFunction, p: f64, ancillas: Option<usize>) -> Result<MajorityDecision, PostBqpError> {
    check_p(p)?;
    let n = f.n();
    if n == 0 || f.ones() == 0 || f.ones() == 1 << (n - 1) {
        return Err(PostBqpError::PaddingViolation { s: f.ones(), n });
    }
    if n > MAX_DECIDE_INPUTS {
        return Err(PostBqpError::TooLarge {
            what: "n",
            value: n,
            max: MAX_DECIDE_INPUTS,
        });
    }
    let m = match ancillas {
        Some(m) => m,
        None => gadget_size(p, n)?,
    };
    let step = m as f64 * (1.0 - p / 2.0);
    let answer = n + 1;
    // (qubit, favored bit): every input qubit on 0, the answer qubit on 1.
    let plan: Vec<(usize, u8)> = (1..=n).map(|q| (q, 0)).chain([(answer, 1)]).collect();
    let total = n + 2;
    let log2_multiplier = |z: usize| -> f64 {
        plan.iter()
            .filter(|&&(q, favored)| {
                let value = ((z >> (total - 1 - q)) & 1) as u8;
                let conditioned = if p < 2.0 { favored } else { 1 - favored };
                value == conditioned
            })
            .count() as f64
            * step
    };
    let threshold = (0.5 + good_case_plus_probability(p)) / 2.0;
    let initial = StateVector::zero_state(1).tensor(&oracle_state(f));
    let mut per_i = Vec::with_capacity(2 * n + 1);
    let mut good = false;
    let mut min_favored_share = f64::INFINITY;
    for i in -(n as i32)..=n as i32 {
        let mut c = Circuit::new(total);
        for q in 1..=n {
            c.push_gate(Gate::hadamard(), &[q], NormalizationMode::UnitaryOnly)?;
        }
        c.push_gate(Gate::ry(2.0 * 2f64.powi(i).atan()), &[0], NormalizationMode::UnitaryOnly)?;
        c.push_gate(Gate::controlled(&Gate::hadamard()), &[0, answer], NormalizationMode::UnitaryOnly)?;
        c.push_gate(Gate::hadamard(), &[0], NormalizationMode::UnitaryOnly)?;
        let out = run_circuit(&c, &initial)?;

        let logs: Vec<(usize, f64)> = out
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(z, a)| (z, p * a.norm().log2() + log2_multiplier(z)))
            .collect();
        let top = logs.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
        let mut plus = 0.0;
        let mut all = 0.0;
        let mut favored = 0.0;
        let favored_index = |z: usize| z & ((1 << (n + 1)) - 1) == 1;
        for &(z, l) in &logs {
            let w = (l - top).exp2();
            all += w;
            if z >> (total - 1) == 0 {
                plus += w;
            }
            if favored_index(z) {
                favored += w;
            }
        }
        let plus_probability = plus / all;
        min_favored_share = min_favored_share.min(favored / all);
        let (a0, a1) = (out.amplitude(1), out.amplitude((1 << (total - 1)) | 1));
        let overlap = a0.norm() / a0.norm().hypot(a1.norm());
        good |= plus_probability >= threshold;
        per_i.push(PerIndex {
            i,
            overlap,
            plus_fraction: None,
            plus_probability: Some(plus_probability),
        });
    }
    Ok(MajorityDecision {
        verdict: if good { Verdict::LessThanHalf } else { Verdict::GreaterThanHalf },
        per_i_overlaps: per_i,
        trials: 0,
        threshold,
        good_case_bound: good_case_plus_probability(p),
        bad_case_bound: 0.5,
        success_weight: min_favored_share,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrSolve {
    pub satisfiable: bool,
    /// Simulated probability that the answer register reads 1.
    pub prob_one: f64,
    /// `s / (s + (2^n - s) 2^(-4n))`.
    pub expected_prob_one: f64,
}

/// Prepares `sum_x |x>|f(x)>`, applies `diag(2^(-2n), 1)` to the answer
/// register under global normalization and reads it with the 2-norm rule.
pub fn or_solve_gate_g(f: &BooleanFunction) -> Result<OrSolve, PostBqpError> {
    let n = f.n();
    if n + 1 > MAX_GADGET_QUBITS {
        return Err(PostBqpError::TooLarge {
            what: "n",
            value: n,
            max: MAX_GADGET_QUBITS - 1,
        });
    }
    let shrink = Complex::new(2f64.powi(-2 * n as i32), 0.0);
    let g = Matrix::diagonal(&[shrink, Complex::new(1.0, 0.0)]);
    // The gate is deliberately ill-conditioned for large n.
    let gate = Gate::invertible_with_limit(g, None)?;
    let out = apply_gate(&oracle_state(f), &gate, &[n], NormalizationMode::Global)?;
    let prob_one = qubit_marginal(&out, &MeasurementRule::born(), n)[1];
    let s = f.ones() as f64;
    let expected_prob_one = s / (s + ((1u64 << n) as f64 - s) * 2f64.powi(-4 * n as i32));
    Ok(OrSolve {
        satisfiable: prob_one > 0.5,
        prob_one,
        expected_prob_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::measure_distribution;

    fn plus() -> StateVector {
        StateVector::from_real(1, &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn gadget_at_p_one_amplifies_branch_one() {
        let g = postselection_gadget(&plus(), 0, 1.0, 4).unwrap();
        assert!((g.marginal[1] - 0.8).abs() < 1e-12);
        assert!((g.measured_factor.unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(g.other_factor, Some(1.0));
    }

    #[test]
    fn gadget_with_no_ancillas_is_identity() {
        let g = postselection_gadget(&plus(), 0, 3.0, 0).unwrap();
        assert_eq!(g.state, plus());
        assert_eq!(g.expected_factor, 1.0);
    }

    #[test]
    fn gadget_at_p_four_suppresses_other_branch() {
        let g = postselection_gadget(&plus(), 0, 4.0, 2).unwrap();
        assert_eq!(g.conditioned_bit, 0);
        assert!((g.measured_factor.unwrap() - 0.25).abs() < 1e-12);
        // Branch 1 is favored four to one.
        assert!((g.marginal[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn gadget_rejects_p_two() {
        assert_eq!(postselection_gadget(&plus(), 0, 2.0, 3), Err(PostBqpError::PEqualsTwo));
        assert_eq!(decide_via_bqp_p(&BooleanFunction::with_count(2, 1).unwrap(), 2.0), Err(PostBqpError::PEqualsTwo));
    }

    #[test]
    fn gadget_sizes() {
        assert_eq!(gadget_size(1.0, 3).unwrap(), 30);
        assert_eq!(gadget_size(4.0, 3).unwrap(), 60);
        assert_eq!(gadget_size(1.5, 1).unwrap(), 30);
    }

    /// The log-domain weights equal a run with explicit ancillas.
    #[test]
    fn compressed_weights_match_explicit_ancillas() {
        let f = BooleanFunction::with_count(2, 1).unwrap();
        for p in [1.0, 3.0] {
            let m = 2;
            let fast = decide_via_bqp_p_with(&f, p, Some(m)).unwrap();
            for entry in &fast.per_i_overlaps {
                let mut c = Circuit::new(4);
                for q in 1..=2 {
                    c.push_gate(Gate::hadamard(), &[q], NormalizationMode::UnitaryOnly).unwrap();
                }
                c.push_gate(Gate::ry(2.0 * 2f64.powi(entry.i).atan()), &[0], NormalizationMode::UnitaryOnly)
                    .unwrap();
                c.push_gate(Gate::controlled(&Gate::hadamard()), &[0, 3], NormalizationMode::UnitaryOnly)
                    .unwrap();
                c.push_gate(Gate::hadamard(), &[0], NormalizationMode::UnitaryOnly).unwrap();
                let mut s = run_circuit(&c, &StateVector::zero_state(1).tensor(&oracle_state(&f))).unwrap();
                for (q, bit) in [(1, 0), (2, 0), (3, 1)] {
                    s = postselection_gadget_for(&s, q, bit, p, m).unwrap().state;
                }
                let dist = measure_distribution(&s, &MeasurementRule::new(p).unwrap());
                let half = dist.len() / 2;
                let plus: f64 = dist[..half].iter().sum();
                assert!((plus - entry.plus_probability.unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn or_solver_examples() {
        let f = BooleanFunction::with_count(2, 1).unwrap();
        let r = or_solve_gate_g(&f).unwrap();
        assert!(r.satisfiable);
        assert!((r.prob_one - 256.0 / 259.0).abs() < 1e-12);
        let none = or_solve_gate_g(&BooleanFunction::with_count(3, 0).unwrap()).unwrap();
        assert!(!none.satisfiable && none.prob_one == 0.0);
        let all = or_solve_gate_g(&BooleanFunction::with_count(3, 8).unwrap()).unwrap();
        assert!(all.satisfiable && all.prob_one == 1.0);
    }
}
