//! Square roots of transformations with complex and with real amplitudes.

use qvariant::numerics::{quaternion_sqrt, Matrix, Quaternion};
use qvariant::sqrt::{embed_sqrt, kth_root_scan, phase_flip_rotation, real_orthogonal_sqrt, unitary_sqrt, Field};

fn rounded(m: &Matrix) -> Vec<Vec<f64>> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(|z| (z.re * 1e9).round() / 1e9 + 0.0).collect())
        .collect()
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let flip = Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])?;
    let complex = unitary_sqrt(&flip)?;
    println!("phase flip, complex root exists = {}, residual {:e}", complex.exists, complex.residual);
    let real = real_orthogonal_sqrt(&flip)?;
    println!("phase flip, real root exists = {}, obstruction {:?}", real.exists, real.obstruction);
    let lifted = embed_sqrt(&flip)?;
    println!("one dimension up: residual {:e}, root {:?}", lifted.residual, lifted.root.as_ref().map(rounded));
    println!("fixed 3x3 rotation squared: {:?}", rounded(&phase_flip_rotation().pow(2)));
    for k in [2, 3] {
        let r = kth_root_scan(&flip, k, Field::Real)?;
        println!("real root of order {k} of the phase flip exists = {}", r.exists);
    }
    let q = Quaternion { w: -1.0, x: 0.0, y: 0.0, z: 0.0 };
    println!("a square root of -1 among quaternions: {:?}", quaternion_sqrt(q));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("root example");
}
