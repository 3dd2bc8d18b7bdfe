//! Sixteen-setting tomography: Poisson counts with accidentals, linear
//! inversion, and the maximum-likelihood estimate.

use qbuffer::channels::damp_werner;
use qbuffer::state::{fidelity, validate};
use qbuffer::tomography::{
    estimate_werner_probability, linear_inversion, reconstruct_mle, simulate_counts, subtract_accidentals,
    CountModel, MleOptions,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let truth = damp_werner(0.9, 0.02)?;
    let model = CountModel {
        accidental_rate: 2e-6,
        ..CountModel::default()
    };
    let records = simulate_counts(&truth, &model, 2024)?;
    for r in records.iter().take(4) {
        println!(
            "{}{}: {:>6} coincidences, {:>4} accidentals",
            r.setting.signal, r.setting.idler, r.coincidences, r.accidentals
        );
    }
    let corrected = subtract_accidentals(&records);

    let li = linear_inversion(&corrected)?;
    println!("linear inversion: min eigenvalue {:+.2e}", li.eigenvalues()[0]);

    let mle = reconstruct_mle(&corrected, &MleOptions::default())?;
    println!(
        "MLE: converged {} after {} iterations, min eigenvalue {:+.2e}",
        mle.converged,
        mle.iterations,
        mle.rho_hat.eigenvalues()[0]
    );
    println!("{}", validate(&mle.rho_hat));
    println!("fidelity to truth {:.5}", fidelity(&truth, &mle.rho_hat));
    println!(
        "P_hat {:.4} (noiseless value {:.4})",
        estimate_werner_probability(&mle.rho_hat),
        estimate_werner_probability(&truth)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
