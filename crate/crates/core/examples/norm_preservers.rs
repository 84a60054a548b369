//! Which linear maps preserve a p-norm other than the 2-norm.

use qvariant::norm_laws::{
    is_generalized_diagonal, island_scan, preserves_pnorm_formal_even, preserves_pnorm_numeric, NumericCheck,
};
use qvariant::numerics::Matrix;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = Matrix::from_real(2, 2, &[h, h, h, -h])?;
    let signed_swap = Matrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0])?;
    for (name, m) in [("Hadamard", &hadamard), ("signed swap", &signed_swap)] {
        for p in [2.0, 4.0] {
            let v = preserves_pnorm_numeric(m, p, &NumericCheck::default())?;
            println!("{name}, p = {p}: preserves = {}, witness = {:?}", v.preserves, v.witness);
        }
        let formal = preserves_pnorm_formal_even(m, 4)?;
        let shape = is_generalized_diagonal(m, 1e-12)?;
        println!(
            "{name}: coefficient expansion at p = 4 preserves = {}, generalized diagonal = {}",
            formal.preserves, shape.is_generalized_diagonal
        );
    }
    let report = island_scan(3, 4.0, 300, 1)?;
    println!("random scan, n = 3, p = 4: pass = {}, counts = {:?}", report.pass, report.counts);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("norm preserver example");
}
