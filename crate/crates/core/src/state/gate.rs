use serde::{Deserialize, Serialize};

use super::{StateError, StateVector};
use crate::numerics::{singular_values, Complex, Matrix, Tolerances, ZERO};

/// Default ceiling on the condition number of invertible gates. Near-singular
/// maps can send states arbitrarily close to zero.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Unitary,
    Invertible,
    NonlinearW,
    NonlinearG,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonlinearKind {
    /// `(x, y) -> (x, e^{i|y|} y)`
    W,
    /// `(x, y) -> (x^2 - conj(y)^2, 2 Re(x y))`
    G,
}

/// How the state is treated after a gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Only unitary gates allowed.
    #[serde(rename = "unitary")]
    UnitaryOnly,
    /// Any invertible gate; normalization deferred to measurement.
    Global,
    /// After the gate, each branch of the untouched qubits is rescaled back
    /// to its prior 2-norm weight.
    Local,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    matrix: Option<Matrix>,
    arity: usize,
    name: String,
}

fn arity_of(m: &Matrix) -> Result<usize, StateError> {
    if !m.is_square() {
        return Err(crate::numerics::NumericsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    let n = m.rows();
    if !n.is_power_of_two() || n < 2 {
        return Err(StateError::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

impl Gate {
    /// A unitary gate; rejects matrices with `||U^dagger U - I||_max > 1e-10`.
    pub fn unitary(matrix: Matrix) -> Result<Self, StateError> {
        Self::unitary_named(matrix, "custom")
    }

    pub fn unitary_named(matrix: Matrix, name: &str) -> Result<Self, StateError> {
        let arity = arity_of(&matrix)?;
        let residual = matrix.unitarity_residual();
        if residual > Tolerances::default().orthonormality {
            return Err(StateError::NotUnitary { residual });
        }
        Ok(Self {
            kind: GateKind::Unitary,
            matrix: Some(matrix),
            arity,
            name: name.to_string(),
        })
    }

    /// An invertible gate guarded by [`CONDITION_LIMIT`].
    pub fn invertible(matrix: Matrix) -> Result<Self, StateError> {
        Self::invertible_with_limit(matrix, Some(CONDITION_LIMIT))
    }

    /// `limit = None` disables the singularity guard entirely.
    pub fn invertible_with_limit(matrix: Matrix, limit: Option<f64>) -> Result<Self, StateError> {
        let arity = arity_of(&matrix)?;
        if let Some(limit) = limit {
            let condition = condition_number(&matrix);
            if !(condition <= limit) {
                return Err(StateError::IllConditioned { condition, limit });
            }
        }
        Ok(Self {
            kind: GateKind::Invertible,
            matrix: Some(matrix),
            arity,
            name: "custom".to_string(),
        })
    }

    /// Unitary when the matrix passes the unitarity check, invertible otherwise.
    pub fn from_matrix(matrix: Matrix) -> Result<Self, StateError> {
        if matrix.is_square() && matrix.unitarity_residual() <= Tolerances::default().orthonormality {
            Self::unitary(matrix)
        } else {
            Self::invertible(matrix)
        }
    }

    pub fn nonlinear(kind: NonlinearKind) -> Self {
        let (kind, name) = match kind {
            NonlinearKind::W => (GateKind::NonlinearW, "W"),
            NonlinearKind::G => (GateKind::NonlinearG, "G"),
        };
        Self {
            kind,
            matrix: None,
            arity: 1,
            name: name.to_string(),
        }
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::unitary_named(Matrix::from_real(2, 2, &[h, h, h, -h]).unwrap(), "H").unwrap()
    }

    pub fn pauli_x() -> Self {
        Self::unitary_named(Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(), "X").unwrap()
    }

    /// Control is the first target.
    pub fn cnot() -> Self {
        Self::controlled(&Self::pauli_x()).renamed("CNOT")
    }

    /// `[[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]`
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::unitary_named(Matrix::from_real(2, 2, &[c, -s, s, c]).unwrap(), "RY").unwrap()
    }

    /// Applies `self` to the remaining targets when the first target is 1.
    pub fn controlled(inner: &Gate) -> Self {
        let m = inner.matrix.as_ref().expect("controlled gate needs a matrix");
        let d = m.rows();
        let mut full = Matrix::identity(2 * d);
        for i in 0..d {
            for j in 0..d {
                full[(d + i, d + j)] = m[(i, j)];
            }
        }
        Self {
            kind: inner.kind,
            matrix: Some(full),
            arity: inner.arity + 1,
            name: "custom".to_string(),
        }
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn matrix(&self) -> Option<&Matrix> {
        self.matrix.as_ref()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Maps one branch sub-vector in place (linear or nonlinear).
    pub(crate) fn act(&self, input: &[Complex], out: &mut [Complex]) {
        match self.kind {
            GateKind::Unitary | GateKind::Invertible => {
                self.matrix.as_ref().unwrap().apply_slice(input, out)
            }
            GateKind::NonlinearW => {
                let (x, y) = nonlinear_w(input[0], input[1]);
                out[0] = x;
                out[1] = y;
            }
            GateKind::NonlinearG => {
                let (x, y) = nonlinear_g(input[0], input[1]);
                out[0] = x;
                out[1] = y;
            }
        }
    }
}

pub(crate) fn condition_number(m: &Matrix) -> f64 {
    let sv = singular_values(m);
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn nonlinear_w(x: Complex, y: Complex) -> (Complex, Complex) {
    (x, Complex::from_polar(1.0, y.norm()) * y)
}

fn nonlinear_g(x: Complex, y: Complex) -> (Complex, Complex) {
    let yc = y.conj();
    (x * x - yc * yc, Complex::new(2.0 * (x * y).re, 0.0))
}

/// Offsets of the `2^k` local basis states within the full index, with
/// `targets[0]` the most significant local bit.
pub(crate) fn local_offsets(num_qubits: usize, targets: &[usize]) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|local| {
            targets
                .iter()
                .enumerate()
                .filter(|(i, _)| (local >> (k - 1 - i)) & 1 == 1)
                .map(|(_, &q)| 1usize << (num_qubits - 1 - q))
                .sum()
        })
        .collect()
}

pub(crate) fn check_targets(num_qubits: usize, gate: &Gate, targets: &[usize]) -> Result<(), StateError> {
    if targets.len() != gate.arity {
        return Err(StateError::ArityMismatch {
            arity: gate.arity,
            targets: targets.len(),
        });
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= num_qubits {
            return Err(StateError::QubitOutOfRange { qubit: q, num_qubits });
        }
        if targets[..i].contains(&q) {
            return Err(StateError::DuplicateTarget);
        }
    }
    Ok(())
}

pub(crate) fn check_mode(gate: &Gate, mode: NormalizationMode) -> Result<(), StateError> {
    if mode == NormalizationMode::UnitaryOnly && gate.kind != GateKind::Unitary {
        return Err(StateError::NonUnitaryInModeI(gate.kind));
    }
    Ok(())
}

/// Rescales `out` to carry the 2-norm weight of `input`. A branch that had
/// no weight stays empty.
pub(crate) fn restore_branch_weight(input: &[Complex], out: &mut [Complex], branch: usize) -> Result<(), StateError> {
    let before: f64 = input.iter().map(|z| z.norm_sqr()).sum();
    if before == 0.0 {
        return Ok(());
    }
    let after: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    if after == 0.0 {
        return Err(StateError::ZeroBranch { branch });
    }
    let factor = (before / after).sqrt();
    out.iter_mut().for_each(|z| *z *= factor);
    Ok(())
}

/// Applies `gate` to `targets` under the given normalization mode.
pub fn apply_gate(
    state: &StateVector,
    gate: &Gate,
    targets: &[usize],
    mode: NormalizationMode,
) -> Result<StateVector, StateError> {
    check_mode(gate, mode)?;
    let n = state.num_qubits();
    check_targets(n, gate, targets)?;
    let offsets = local_offsets(n, targets);
    let mask: usize = offsets.iter().fold(0, |acc, o| acc | o);
    let width = offsets.len();
    let src = state.amplitudes();
    let mut out = vec![ZERO; src.len()];
    let mut input = vec![ZERO; width];
    let mut local = vec![ZERO; width];
    for base in (0..src.len()).filter(|b| b & mask == 0) {
        for (slot, off) in input.iter_mut().zip(&offsets) {
            *slot = src[base | off];
        }
        gate.act(&input, &mut local);
        if mode == NormalizationMode::Local {
            restore_branch_weight(&input, &mut local, base)?;
        }
        for (v, off) in local.iter().zip(&offsets) {
            out[base | off] = *v;
        }
    }
    StateVector::new(n, out)
}

/// Applies a nonlinear single-qubit map to every `(target=0, target=1)`
/// amplitude pair, without renormalizing.
pub fn apply_nonlinear(state: &StateVector, kind: NonlinearKind, target: usize) -> Result<StateVector, StateError> {
    apply_gate(state, &Gate::nonlinear(kind), &[target], NormalizationMode::Global)
}
