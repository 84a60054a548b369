//! Telling apart d non-orthogonal qubit states under a p-norm rule.

use qvariant::protocols::{
    build_discrimination_setup, discrimination_bound_check, discrimination_error, discrimination_monte_carlo,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for (d, p) in [(3, 2.0), (3, 4.0), (5, 100.0), (7, 196.0)] {
        let setup = build_discrimination_setup(d, p)?;
        println!("d = {d}, p = {p}: error {:.6}", discrimination_error(&setup, 0)?);
    }
    let bound = discrimination_bound_check(9, 1024.0)?;
    println!("bound chain at d = 9, p = 1024: pass = {}, residuals = {:?}", bound.pass, bound.residuals);
    let setup = build_discrimination_setup(3, 4.0)?;
    let mc = discrimination_monte_carlo(&setup, 0, 20_000, 42)?;
    println!("sampled error {:.5} vs exact {:.5} (sigma {:.5})", mc.rate, mc.exact, mc.sigma);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("discrimination example");
}
