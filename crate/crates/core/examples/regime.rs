//! Markovian versus non-Markovian decay of the cavity model, and the
//! reservoir spectrum behind it.

use qbuffer::dynamics::{cavity_p, classify_regime, lorentzian_spectral_density, CavityModelParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fitted = CavityModelParams::published();
    let kappa = fitted.total_kappa();
    let report = classify_regime(kappa, fitted.gamma0);
    println!(
        "kappa1 + kappa2 = {kappa} /s, 4 kappa = {} /s, gamma0 = {} /s -> {:?}, delta = {:.2} /s",
        4.0 * kappa,
        fitted.gamma0,
        report.regime,
        report.delta
    );

    let gamma0 = 100.0;
    for kappa in [1.0, 25.0, 100.0] {
        let r = classify_regime(kappa, gamma0);
        let curve: Vec<String> = (0..=6).map(|i| format!("{:.3}", cavity_p(i as f64 * 0.02, kappa, gamma0))).collect();
        println!("kappa {kappa:>5}: {:<12} p(t) = {}", format!("{:?}", r.regime), curve.join(" "));
    }

    let width = 50.0;
    let spectrum: Vec<String> = [-100.0, -50.0, 0.0, 50.0, 100.0]
        .iter()
        .map(|d| format!("{:.1}", lorentzian_spectral_density(*d, 0.0, gamma0, width)))
        .collect();
    println!("J(omega0 + d), d = -100..100: {}", spectrum.join(" "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
