//! Superluminal signalling from nonunitary gates and from a p-norm rule.

use qvariant::protocols::{
    option_i_ensemble_tvd, option_i_monte_carlo, signalling_multistate_ii, signalling_option_i, signalling_option_ii,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for eps in [0.0, 0.5, 0.9] {
        let r = signalling_option_ii(eps)?;
        println!("nonunitary steering, eps = {eps}: Bob sees {:?}, distance {:.6}", r.bob_marginals, r.tvd);
    }
    let multi = signalling_multistate_ii(5, 100.0)?;
    println!("5-way steering at p = 100: success {:.4}, {:.3} bits", multi.success, multi.bits);

    let r = signalling_option_i(4.0, 4, 125)?;
    println!("measurement choice at p = 4: per-pair distance {:.6}, pairs needed {:?}", r.tvd, r.pairs_needed);
    println!("  simulated decoding error rate: {}", option_i_monte_carlo(4.0, 4, 125, 400, 1)?);
    println!("  same protocol at p = 2: distance {:e}", option_i_ensemble_tvd(2.0, 4)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("signalling example");
}
