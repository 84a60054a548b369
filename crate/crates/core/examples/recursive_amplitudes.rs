//! Single amplitudes of mixed-mode circuits without storing the full state.

use qvariant::state::{random_circuit, run_circuit, RecursiveEvaluator, StateVector};
use qvariant::numerics::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let circuit = random_circuit(&mut rng, 10, 16);
    let dense = run_circuit(&circuit, &StateVector::zero_state(10))?;
    let start = |y: usize| if y == 0 { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) };
    let mut evaluator = RecursiveEvaluator::new(&circuit, start)?;
    let mut worst: f64 = 0.0;
    for x in [0, 1, 37, 512, 1023] {
        let a = evaluator.amplitude(x, circuit.len())?;
        worst = worst.max((a - dense.amplitude(x)).norm());
    }
    println!(
        "10 qubits, {} steps: max deviation from dense {worst:e}, {} recursive calls, cache capacity {} entries",
        circuit.len(),
        evaluator.calls(),
        evaluator.cache_capacity()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("recursive amplitude example");
}
