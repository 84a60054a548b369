use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gate::{check_mode, check_targets};
use super::{apply_gate, postselect, Gate, NonlinearKind, NormalizationMode, StateError, StateVector};
use crate::numerics::random::{gaussian_matrix, haar_unitary};
use crate::numerics::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Gate {
        gate: Gate,
        targets: Vec<usize>,
        mode: NormalizationMode,
    },
    Postselect {
        qubit: usize,
        bit: u8,
    },
}

/// A finite circuit: gates with targets and normalization modes, plus
/// optional postselection steps, applied in order.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    steps: Vec<Step>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            steps: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push_gate(&mut self, gate: Gate, targets: &[usize], mode: NormalizationMode) -> Result<&mut Self, StateError> {
        check_targets(self.num_qubits, &gate, targets)?;
        check_mode(&gate, mode)?;
        self.steps.push(Step::Gate {
            gate,
            targets: targets.to_vec(),
            mode,
        });
        Ok(self)
    }

    pub fn push_postselect(&mut self, qubit: usize, bit: u8) -> Result<&mut Self, StateError> {
        if qubit >= self.num_qubits {
            return Err(StateError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        if bit > 1 {
            return Err(StateError::InvalidBit(bit));
        }
        self.steps.push(Step::Postselect { qubit, bit });
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self, CircuitParseError> {
        let raw: CircuitJson = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CircuitJson::from(self)).expect("circuit serializes")
    }
}

/// Runs every step from `initial`.
pub fn run_circuit(c: &Circuit, initial: &StateVector) -> Result<StateVector, StateError> {
    run_prefix(c, initial, c.len())
}

/// Runs the first `t` steps.
pub fn run_prefix(c: &Circuit, initial: &StateVector, t: usize) -> Result<StateVector, StateError> {
    if initial.num_qubits() != c.num_qubits {
        return Err(StateError::WrongLength {
            expected: 1 << c.num_qubits,
            found: initial.dim(),
        });
    }
    if t > c.len() {
        return Err(StateError::StepOutOfRange { t, len: c.len() });
    }
    c.steps[..t].iter().try_fold(initial.clone(), |state, step| match step {
        Step::Gate { gate, targets, mode } => apply_gate(&state, gate, targets, *mode),
        Step::Postselect { qubit, bit } => postselect(&state, *qubit, *bit),
    })
}

/// Random circuit on arity-1 and arity-2 gates mixing every kind and mode:
/// Haar unitaries under mode (i), Frobenius-normalized Gaussian matrices
/// under global or local normalization, and occasional nonlinear gates.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize, num_gates: usize) -> Circuit {
    let mut c = Circuit::new(num_qubits);
    while c.len() < num_gates {
        let arity = if num_qubits >= 2 && rng.random_bool(0.5) { 2 } else { 1 };
        let mut targets = vec![rng.random_range(0..num_qubits)];
        while targets.len() < arity {
            let q = rng.random_range(0..num_qubits);
            if !targets.contains(&q) {
                targets.push(q);
            }
        }
        let dim = 1 << arity;
        let (gate, mode) = match rng.random_range(0..10) {
            0..=3 => (
                Gate::unitary(haar_unitary(rng, dim)).expect("Haar sample is unitary"),
                NormalizationMode::UnitaryOnly,
            ),
            4..=8 => {
                let m = gaussian_matrix(rng, dim, dim, true);
                let m = m.scale((1.0 / m.frobenius_norm()).into());
                let Ok(g) = Gate::invertible(m) else { continue };
                let mode = if rng.random_bool(0.5) {
                    NormalizationMode::Global
                } else {
                    NormalizationMode::Local
                };
                (g, mode)
            }
            _ => {
                let kind = if rng.random_bool(0.5) { NonlinearKind::W } else { NonlinearKind::G };
                targets.truncate(1);
                (Gate::nonlinear(kind), NormalizationMode::Global)
            }
        };
        c.push_gate(gate, &targets, mode).expect("targets are distinct and in range");
    }
    c
}

#[derive(Debug, thiserror::Error)]
pub enum CircuitParseError {
    #[error("invalid circuit JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    qubits: usize,
    steps: Vec<StepJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StepJson {
    Postselect {
        postselect: PostselectJson,
    },
    Gate {
        gate: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Matrix>,
        targets: Vec<usize>,
        #[serde(default = "default_mode")]
        mode: NormalizationMode,
    },
}

#[derive(Serialize, Deserialize)]
struct PostselectJson {
    qubit: usize,
    bit: u8,
}

fn default_mode() -> NormalizationMode {
    NormalizationMode::UnitaryOnly
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = CircuitParseError;

    fn try_from(raw: CircuitJson) -> Result<Self, Self::Error> {
        let mut c = Circuit::new(raw.qubits);
        for step in raw.steps {
            match step {
                StepJson::Postselect { postselect } => {
                    c.push_postselect(postselect.qubit, postselect.bit)?;
                }
                StepJson::Gate {
                    gate,
                    matrix,
                    targets,
                    mode,
                } => {
                    let g = match gate.as_str() {
                        "H" => Gate::hadamard(),
                        "X" => Gate::pauli_x(),
                        "CNOT" => Gate::cnot(),
                        "W" => Gate::nonlinear(NonlinearKind::W),
                        "G" => Gate::nonlinear(NonlinearKind::G),
                        "custom" => {
                            let m = matrix.ok_or_else(|| StateError::MissingMatrix(gate.clone()))?;
                            Gate::from_matrix(m)?
                        }
                        other => return Err(StateError::UnknownGate(other.to_string()).into()),
                    };
                    c.push_gate(g, &targets, mode)?;
                }
            }
        }
        Ok(c)
    }
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        let steps = c
            .steps
            .iter()
            .map(|s| match s {
                Step::Postselect { qubit, bit } => StepJson::Postselect {
                    postselect: PostselectJson {
                        qubit: *qubit,
                        bit: *bit,
                    },
                },
                Step::Gate { gate, targets, mode } => {
                    let named = matches!(gate.name(), "H" | "X" | "CNOT" | "W" | "G");
                    StepJson::Gate {
                        gate: if named { gate.name().to_string() } else { "custom".to_string() },
                        matrix: if named { None } else { gate.matrix().cloned() },
                        targets: targets.clone(),
                        mode: *mode,
                    }
                }
            })
            .collect();
        CircuitJson {
            qubits: c.num_qubits,
            steps,
        }
    }
}
