//! Deciding whether a Boolean function is true on fewer than half its inputs
//! with a postselected circuit.

use qvariant::postbqp::{postbqp_decide, varphi_overlap, BooleanFunction, DecisionMode, Verdict};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    println!("best overlap for s = 1, n = 2: {:.12}", varphi_overlap(1, 2, -1)?);
    let f: BooleanFunction = "4\n0x0107".parse()?;
    println!("table {} has {} ones", f.table().iter().map(|&b| if b { '1' } else { '0' }).collect::<String>(), f.ones());
    let exact = postbqp_decide(&f, DecisionMode::Exact)?;
    println!("exact verdict {:?} (threshold {:.6})", exact.verdict, exact.threshold);
    for row in &exact.per_i_overlaps {
        println!("  i = {:>2}: overlap {:.6}", row.i, row.overlap);
    }
    let sampled = postbqp_decide(&f, DecisionMode::Sampled { seed: 3, trials: Some(200) })?;
    println!("sampled verdict {:?}; counting oracle says {:?}", sampled.verdict, Verdict::from_count(f.n(), f.ones()));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("majority example");
}
