use super::gate::{local_offsets, restore_branch_weight};
use super::{Circuit, NormalizationMode, StateError, Step};
use crate::numerics::{Complex, ZERO};

/// Default number of branch results remembered per step. The cache size is
/// fixed up front, so memory is `O(steps * slots)` whatever the number of
/// qubits.
pub const DEFAULT_CACHE_SLOTS: usize = 256;

enum Level {
    Gate {
        offsets: Vec<usize>,
        mask: usize,
        slots: Vec<Option<(usize, [Complex; 4])>>,
    },
    Postselect {
        weight: Option<f64>,
    },
}

/// Depth-first evaluation of single amplitudes `a_x^(t)`.
///
/// Each amplitude after a gate on at most two qubits depends on at most four
/// amplitudes one step earlier (the gate's branch), so the recursion never
/// builds the state vector. A postselection step needs the weight of its
/// branch, which is summed by recursion as well and then remembered.
pub struct RecursiveEvaluator<'a, F> {
    circuit: &'a Circuit,
    initial: F,
    levels: Vec<Level>,
    slot_shift: u32,
    calls: u64,
}

impl<'a, F: Fn(usize) -> Complex> RecursiveEvaluator<'a, F> {
    pub fn new(circuit: &'a Circuit, initial: F) -> Result<Self, StateError> {
        Self::with_cache_slots(circuit, initial, DEFAULT_CACHE_SLOTS)
    }

    /// `slots` is rounded up to a power of two.
    pub fn with_cache_slots(circuit: &'a Circuit, initial: F, slots: usize) -> Result<Self, StateError> {
        let slots = slots.max(1).next_power_of_two();
        let n = circuit.num_qubits();
        let levels = circuit
            .steps()
            .iter()
            .map(|step| match step {
                Step::Gate { gate, targets, .. } => {
                    if gate.arity() > 2 {
                        return Err(StateError::ArityTooLarge(gate.arity()));
                    }
                    let offsets = local_offsets(n, targets);
                    let mask = offsets.iter().fold(0, |a, o| a | o);
                    Ok(Level::Gate {
                        offsets,
                        mask,
                        slots: vec![None; slots],
                    })
                }
                Step::Postselect { .. } => Ok(Level::Postselect { weight: None }),
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            circuit,
            initial,
            levels,
            slot_shift: 64 - slots.trailing_zeros(),
            calls: 0,
        })
    }

    /// Number of recursive calls made so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Amplitude slots held by the caches; independent of `2^n`.
    pub fn cache_capacity(&self) -> usize {
        self.levels
            .iter()
            .map(|l| match l {
                Level::Gate { slots, .. } => slots.len() * 4,
                Level::Postselect { .. } => 1,
            })
            .sum()
    }

    /// `a_x^(t)`: amplitude of `|x>` after the first `t` steps.
    pub fn amplitude(&mut self, x: usize, t: usize) -> Result<Complex, StateError> {
        let len = self.circuit.len();
        if t > len {
            return Err(StateError::StepOutOfRange { t, len });
        }
        let n = self.circuit.num_qubits();
        if x >> n != 0 {
            return Err(StateError::QubitOutOfRange {
                qubit: usize::BITS as usize - x.leading_zeros() as usize - 1,
                num_qubits: n,
            });
        }
        self.eval(x, t)
    }

    fn eval(&mut self, x: usize, t: usize) -> Result<Complex, StateError> {
        self.calls += 1;
        if t == 0 {
            return Ok((self.initial)(x));
        }
        let circuit = self.circuit;
        match &circuit.steps()[t - 1] {
            Step::Gate { gate, mode, .. } => {
                let (base, local, width) = match &self.levels[t - 1] {
                    Level::Gate { offsets, mask, slots } => {
                        let base = x & !mask;
                        let local = offsets.iter().position(|&o| o == x & mask).unwrap();
                        let slot = slot_of(base, self.slot_shift);
                        if let Some((key, vals)) = &slots[slot] {
                            if *key == base {
                                return Ok(vals[local]);
                            }
                        }
                        (base, local, offsets.len())
                    }
                    Level::Postselect { .. } => unreachable!("level kinds follow the steps"),
                };
                let mut input = [ZERO; 4];
                for (j, slot) in input.iter_mut().enumerate().take(width) {
                    let off = match &self.levels[t - 1] {
                        Level::Gate { offsets, .. } => offsets[j],
                        Level::Postselect { .. } => unreachable!(),
                    };
                    *slot = self.eval(base | off, t - 1)?;
                }
                let mut out = [ZERO; 4];
                gate.act(&input[..width], &mut out[..width]);
                if *mode == NormalizationMode::Local {
                    restore_branch_weight(&input[..width], &mut out[..width], base)?;
                }
                if let Level::Gate { slots, .. } = &mut self.levels[t - 1] {
                    slots[slot_of(base, self.slot_shift)] = Some((base, out));
                }
                Ok(out[local])
            }
            Step::Postselect { qubit, bit } => {
                let shift = circuit.num_qubits() - 1 - qubit;
                if ((x >> shift) & 1) as u8 != *bit {
                    return Ok(ZERO);
                }
                let cached = match &self.levels[t - 1] {
                    Level::Postselect { weight } => *weight,
                    Level::Gate { .. } => unreachable!(),
                };
                let weight = match cached {
                    Some(w) => w,
                    None => {
                        let mut w = 0.0;
                        for z in 0..1usize << circuit.num_qubits() {
                            if ((z >> shift) & 1) as u8 == *bit {
                                w += self.eval(z, t - 1)?.norm_sqr();
                            }
                        }
                        if w == 0.0 {
                            return Err(StateError::ZeroProbabilityBranch {
                                qubit: *qubit,
                                bit: *bit,
                            });
                        }
                        if let Level::Postselect { weight } = &mut self.levels[t - 1] {
                            *weight = Some(w);
                        }
                        w
                    }
                };
                Ok(self.eval(x, t - 1)? / weight.sqrt())
            }
        }
    }
}

fn slot_of(base: usize, shift: u32) -> usize {
    if shift == 64 {
        return 0;
    }
    ((base as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> shift) as usize
}

/// `a_x^(t)` starting from `|0...0>`.
pub fn amplitude_recursive(c: &Circuit, x: usize, t: usize) -> Result<Complex, StateError> {
    amplitude_recursive_from(c, |y| if y == 0 { Complex::new(1.0, 0.0) } else { ZERO }, x, t)
}

/// `a_x^(t)` starting from the state whose amplitudes `initial` returns.
pub fn amplitude_recursive_from<F: Fn(usize) -> Complex>(
    c: &Circuit,
    initial: F,
    x: usize,
    t: usize,
) -> Result<Complex, StateError> {
    RecursiveEvaluator::new(c, initial)?.amplitude(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::state::{run_prefix, Gate, NonlinearKind, StateVector};

    fn bell() -> Circuit {
        let mut c = Circuit::new(2);
        c.push_gate(Gate::hadamard(), &[0], NormalizationMode::UnitaryOnly).unwrap();
        c.push_gate(Gate::cnot(), &[0, 1], NormalizationMode::UnitaryOnly).unwrap();
        c
    }

    #[test]
    fn zero_steps_returns_initial() {
        let c = bell();
        assert_eq!(amplitude_recursive(&c, 0, 0).unwrap(), Complex::new(1.0, 0.0));
        assert_eq!(amplitude_recursive(&c, 3, 0).unwrap(), ZERO);
    }

    #[test]
    fn bell_amplitude() {
        let a = amplitude_recursive(&bell(), 0b11, 2).unwrap();
        assert!((a.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15 && a.im == 0.0);
        assert_eq!(amplitude_recursive(&bell(), 0b01, 2).unwrap(), ZERO);
    }

    #[test]
    fn rejects_out_of_range() {
        let c = bell();
        assert!(matches!(amplitude_recursive(&c, 0, 3), Err(StateError::StepOutOfRange { .. })));
        assert!(amplitude_recursive(&c, 4, 1).is_err());
    }

    #[test]
    fn matches_dense_with_local_nonlinear_and_postselect() {
        let mut c = Circuit::new(3);
        let a = Matrix::from_real(2, 2, &[1.0, 0.5, -0.2, 2.0]).unwrap();
        c.push_gate(Gate::hadamard(), &[0], NormalizationMode::UnitaryOnly).unwrap();
        c.push_gate(Gate::hadamard(), &[2], NormalizationMode::UnitaryOnly).unwrap();
        c.push_gate(Gate::invertible(a.clone()).unwrap(), &[1], NormalizationMode::Local).unwrap();
        c.push_gate(Gate::cnot(), &[2, 1], NormalizationMode::UnitaryOnly).unwrap();
        c.push_gate(Gate::nonlinear(NonlinearKind::G), &[0], NormalizationMode::Global).unwrap();
        c.push_postselect(1, 1).unwrap();
        c.push_gate(Gate::controlled(&Gate::invertible(a).unwrap()), &[1, 0], NormalizationMode::Local).unwrap();
        let init = StateVector::zero_state(3);
        for t in 0..=c.len() {
            let dense = run_prefix(&c, &init, t).unwrap();
            for x in 0..8 {
                let got = amplitude_recursive(&c, x, t).unwrap();
                assert!((got - dense.amplitude(x)).norm() < 1e-12, "t={t} x={x}");
            }
        }
    }

    #[test]
    fn rejects_three_qubit_gates() {
        let mut c = Circuit::new(3);
        c.push_gate(Gate::controlled(&Gate::cnot()), &[0, 1, 2], NormalizationMode::UnitaryOnly).unwrap();
        assert!(matches!(amplitude_recursive(&c, 0, 1), Err(StateError::ArityTooLarge(3))));
    }
}
