//! Fits both decay models and a plain exponential to synthetic data drawn
//! from the cavity model with 2% noise, then ranks them.

use qbuffer::dynamics::{classify_regime, p3, CavityModelParams, PmdModelParams};
use qbuffer::fitting::{
    fit_exponential, fit_p3, fit_pasy, initial_p3, initial_pasy, linspace, model_comparison, Bounds, DataPoint,
    DataSeries,
};
use qbuffer::units::UnitContext;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let truth = CavityModelParams::published();
    let units = UnitContext::default();
    let noise = Normal::new(0.0, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points = linspace(0.0, 1.5e-3, 50)
        .into_iter()
        .map(|t| {
            let p = p3(t, &truth);
            DataPoint {
                t,
                p: p * (1.0 + 0.02 * noise.sample(&mut rng)),
                sigma: 0.02 * p,
            }
        })
        .collect();
    let data = DataSeries::new(points)?;

    let p3_fit = fit_p3(&data, &initial_p3(&data, &truth)?, &Bounds::default())?;
    let c = p3_fit.cavity().expect("cavity fit");
    println!(
        "p3:   kappa1 {:.0}  kappa2 {:.0}  gamma0 {:.0} /s  w {:.3}/{:.3}  chi2 {:.1}",
        c.kappa1,
        c.kappa2,
        c.gamma0,
        c.w1,
        c.w2,
        p3_fit.chi_square()
    );
    println!("      regime {:?}", classify_regime(c.total_kappa(), c.gamma0).regime);

    let template = PmdModelParams::published();
    let pasy_fit = fit_pasy(&data, &initial_pasy(&data, &template, &units)?, &Bounds::default(), &units)?;
    println!("pasy: chi2 {:.1}, warnings {:?}", pasy_fit.chi_square(), pasy_fit.warnings);

    let exp_fit = fit_exponential(&data)?;
    let e = exp_fit.exponential().expect("exponential fit");
    println!("exp:  P0 {:.3}, rate {:.0} /s, chi2 {:.3e}", e.p0, e.rate_per_s, exp_fit.chi_square());

    let cmp = model_comparison(&data, &p3_fit, &pasy_fit)?;
    println!(
        "reduced chi2 p3 {:.3} vs pasy {:.3}: winner {:?}",
        cmp.reduced_chi_square_first, cmp.reduced_chi_square_second, cmp.winner
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
