//! State vectors, gates and measurement rules for variant quantum theories.
//!
//! States are stored unnormalized. Measurement divides by the total
//! `sum_y |a_y|^p`, so only the direction of the vector matters unless a
//! gate is applied in local-normalization mode.
//!
//! Basis ordering: qubit 0 is the most significant bit of the index.

mod circuit;
mod gate;
mod recursive;

pub use circuit::{random_circuit, run_circuit, run_prefix, Circuit, Step};
pub use gate::{apply_gate, apply_nonlinear, Gate, GateKind, NonlinearKind, NormalizationMode, CONDITION_LIMIT};
pub use recursive::{amplitude_recursive, amplitude_recursive_from, RecursiveEvaluator, DEFAULT_CACHE_SLOTS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{Complex, NumericsError, ZERO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("the zero vector is not a state")]
    ZeroState,
    #[error("expected {expected} amplitudes, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("local normalization divides by zero on branch {branch}")]
    ZeroBranch { branch: usize },
    #[error("gate of kind {0:?} is not allowed under unitary-only evolution")]
    NonUnitaryInModeI(GateKind),
    #[error("postselecting qubit {qubit} = {bit} selects a branch of zero weight")]
    ZeroProbabilityBranch { qubit: usize, bit: u8 },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("target qubits must be distinct")]
    DuplicateTarget,
    #[error("gate acts on {arity} qubits but {targets} targets were given")]
    ArityMismatch { arity: usize, targets: usize },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("condition number {condition:e} exceeds limit {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },
    #[error("gate matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("measurement exponent must be positive and finite, got {0}")]
    InvalidExponent(f64),
    #[error("bit must be 0 or 1, got {0}")]
    InvalidBit(u8),
    #[error("recursive evaluation supports gates on at most 2 qubits, got {0}")]
    ArityTooLarge(usize),
    #[error("step index {t} exceeds circuit length {len}")]
    StepOutOfRange { t: usize, len: usize },
    #[error("unknown gate name {0:?}")]
    UnknownGate(String),
    #[error("gate {0:?} requires a matrix")]
    MissingMatrix(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// An n-qubit register of (not necessarily normalized) amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex>,
}

impl StateVector {
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex>) -> Result<Self, StateError> {
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(StateError::WrongLength {
                expected,
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(StateError::Numerics(NumericsError::NonFinite));
        }
        if amplitudes.iter().all(|z| *z == ZERO) {
            return Err(StateError::ZeroState);
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn from_real(num_qubits: usize, amplitudes: &[f64]) -> Result<Self, StateError> {
        Self::new(
            num_qubits,
            amplitudes.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        )
    }

    /// The computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(index < 1usize << num_qubits, "basis index out of range");
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = Complex::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex {
        self.amplitudes[index]
    }

    pub fn norm2(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescaled to unit 2-norm.
    pub fn normalized(&self) -> StateVector {
        let n = self.norm2();
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|z| z / n).collect(),
        }
    }

    pub fn scaled(&self, c: Complex) -> Result<StateVector, StateError> {
        StateVector::new(self.num_qubits, self.amplitudes.iter().map(|z| z * c).collect())
    }

    /// Sum of `|a_x|^2` over basis states with `qubit = bit`.
    pub fn branch_weight(&self, qubit: usize, bit: u8) -> f64 {
        let shift = self.num_qubits - 1 - qubit;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(x, _)| ((x >> shift) & 1) as u8 == bit)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// Tensor product `self (x) other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        }
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<(), StateError> {
        if qubit >= self.num_qubits {
            return Err(StateError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(num_qubits: usize, amplitudes: Vec<Complex>) -> Self {
        Self {
            num_qubits,
            amplitudes,
        }
    }
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            qubits: usize,
            amplitudes: Vec<[f64; 2]>,
        }
        Repr {
            qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            qubits: usize,
            amplitudes: Vec<[f64; 2]>,
        }
        let r = Repr::deserialize(d)?;
        StateVector::new(
            r.qubits,
            r.amplitudes.into_iter().map(|[a, b]| Complex::new(a, b)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Outcome probabilities `|a_x|^p / sum_y |a_y|^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRule {
    p: f64,
}

impl MeasurementRule {
    pub fn new(p: f64) -> Result<Self, StateError> {
        if !p.is_finite() || p <= 0.0 {
            return Err(StateError::InvalidExponent(p));
        }
        Ok(Self { p })
    }

    /// The usual Born rule, p = 2.
    pub fn born() -> Self {
        Self { p: 2.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Normalized weights `|a|^p / sum |a|^p` for an arbitrary amplitude list.
    pub fn weights(&self, amplitudes: &[Complex]) -> Vec<f64> {
        let max = amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return vec![0.0; amplitudes.len()];
        }
        let raw: Vec<f64> = amplitudes
            .iter()
            .map(|z| {
                if self.p == 2.0 {
                    (z.norm() / max).powi(2)
                } else {
                    (z.norm() / max).powf(self.p)
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }
}

/// Probability of each basis outcome under the p-norm rule.
pub fn measure_distribution(state: &StateVector, rule: &MeasurementRule) -> Vec<f64> {
    rule.weights(state.amplitudes())
}

/// Marginal distribution of one qubit under the p-norm rule.
pub fn qubit_marginal(state: &StateVector, rule: &MeasurementRule, qubit: usize) -> [f64; 2] {
    let shift = state.num_qubits() - 1 - qubit;
    let mut out = [0.0; 2];
    for (x, w) in measure_distribution(state, rule).into_iter().enumerate() {
        out[(x >> shift) & 1] += w;
    }
    out
}

/// Conditions on `qubit = bit` and renormalizes to unit 2-norm.
pub fn postselect(state: &StateVector, qubit: usize, bit: u8) -> Result<StateVector, StateError> {
    state.check_qubit(qubit)?;
    if bit > 1 {
        return Err(StateError::InvalidBit(bit));
    }
    let shift = state.num_qubits - 1 - qubit;
    let weight = state.branch_weight(qubit, bit);
    if weight == 0.0 {
        return Err(StateError::ZeroProbabilityBranch { qubit, bit });
    }
    let norm = weight.sqrt();
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(x, z)| if ((x >> shift) & 1) as u8 == bit { z / norm } else { ZERO })
        .collect();
    Ok(StateVector::from_parts_unchecked(state.num_qubits, amplitudes))
}

fn draw(probabilities: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// One seeded draw from [`measure_distribution`].
pub fn sample(state: &StateVector, rule: &MeasurementRule, seed: u64) -> usize {
    let probs = measure_distribution(state, rule);
    draw(&probs, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `count` seeded draws from one generator.
pub fn sample_many(state: &StateVector, rule: &MeasurementRule, seed: u64, count: usize) -> Vec<usize> {
    sample_distribution(&measure_distribution(state, rule), seed, count)
}

/// Seeded draws from an explicit probability list.
pub fn sample_distribution(probabilities: &[f64], seed: u64, count: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| draw(probabilities, &mut rng)).collect()
}
