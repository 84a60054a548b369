//! Gates, normalization modes and p-norm measurement on small registers.

use qvariant::numerics::{Complex, Matrix};
use qvariant::state::{
    apply_gate, apply_nonlinear, measure_distribution, postselect, Circuit, Gate, MeasurementRule, NonlinearKind,
    NormalizationMode, StateVector, run_circuit,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let mut bell = Circuit::new(2);
    bell.push_gate(Gate::hadamard(), &[0], NormalizationMode::UnitaryOnly)?;
    bell.push_gate(Gate::cnot(), &[0, 1], NormalizationMode::UnitaryOnly)?;
    let state = run_circuit(&bell, &StateVector::zero_state(2))?;
    println!("Bell state under the 2-norm rule: {:?}", measure_distribution(&state, &MeasurementRule::born()));

    let skewed = StateVector::from_real(1, &[1.0, 2.0])?;
    for p in [1.0, 2.0, 4.0] {
        let dist = measure_distribution(&skewed, &MeasurementRule::new(p)?);
        println!("(1, 2) with p = {p}: {dist:?}");
    }

    let squeeze = Gate::invertible(Matrix::diagonal(&[Complex::new(1.0, 0.0), Complex::new(0.25, 0.0)]))?;
    let pair = StateVector::from_real(2, &[1.0, 0.0, 1.0, 1.0])?;
    for mode in [NormalizationMode::Global, NormalizationMode::Local] {
        let out = apply_gate(&pair, &squeeze, &[1], mode)?;
        let branches = [out.branch_weight(0, 0), out.branch_weight(0, 1)];
        println!("{mode:?}: branch weights of qubit 0 after squeezing qubit 1 = {branches:?}");
    }

    let v = StateVector::from_real(1, &[0.6, 0.3])?;
    let g = apply_nonlinear(&v, NonlinearKind::G, 0)?;
    println!("squaring gate: |v|^2 = {:.6}, |G v| = {:.6}", v.norm2().powi(2), g.norm2());

    let conditioned = postselect(&state, 0, 1)?;
    println!(
        "Bell state postselected on qubit 0 = 1: {:?}",
        measure_distribution(&conditioned, &MeasurementRule::born())
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("state engine example");
}
