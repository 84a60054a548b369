//! Simulating postselection with a p-norm rule, and the squaring gate as a
//! satisfiability oracle.

use qvariant::postbqp::{decide_via_bqp_p, or_solve_gate_g, postselection_gadget, BooleanFunction};
use qvariant::state::StateVector;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let plus = StateVector::from_real(1, &[1.0, 1.0])?;
    for p in [1.0, 4.0] {
        for m in [2, 6] {
            let g = postselection_gadget(&plus, 0, p, m)?;
            println!(
                "p = {p}, {m} ancillas: factor {:?} (expected {}), P(favored) = {:.6}",
                g.measured_factor, g.expected_factor, g.marginal[1]
            );
        }
    }
    let f = BooleanFunction::with_count(3, 3)?;
    for p in [1.0, 4.0] {
        println!("3 ones of 8, p = {p}: {:?}", decide_via_bqp_p(&f, p)?.verdict);
    }
    for ones in [0, 1] {
        let solve = or_solve_gate_g(&BooleanFunction::with_count(4, ones)?)?;
        println!("{ones} satisfying inputs: satisfiable = {}, P(1) = {:.6}", solve.satisfiable, solve.prob_one);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("gadget example");
}
