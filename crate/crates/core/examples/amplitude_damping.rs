//! Amplitude damping of the buffered photon and its effect on the
//! six-estimator Werner probability.

use qbuffer::channels::{amplitude_damping_kraus, apply_kraus, damp_werner, AmplitudeDampingParams};
use qbuffer::state::{make_werner, validate};
use qbuffer::tomography::werner_estimators;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (p, xi) = (0.9, 0.02);
    let (g0, g1) = amplitude_damping_kraus(AmplitudeDampingParams::new(xi)?);
    let rho = apply_kraus(&make_werner(p)?, &[g0, g1]);
    assert_eq!(rho, damp_werner(p, xi)?);

    println!("damped Werner state, p = {p}, xi = {xi}:");
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:>9.6}", rho.get(i, j).re)).collect();
        println!("  [{}]", row.join(" "));
    }
    println!("{}", validate(&rho));

    let est = werner_estimators(&rho);
    println!("estimators: {:?}", est.estimators.map(|e| (e * 1e6).round() / 1e6));
    println!("mean {:.6}, closed form {:.6}", est.p, p * (4.0 - 4.0 * xi + 2.0 * (1.0 - xi).sqrt()) / 6.0);
    println!("linearized p(6 - 5xi)/6 = {:.6}", p * (6.0 - 5.0 * xi) / 6.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
