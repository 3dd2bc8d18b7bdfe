//! Polarization mode dispersion on the idler: the rotation operator, the
//! fidelity-like overlap for equal and unequal phases, and the
//! small-angle expansion.

use qbuffer::channels::{pmd_operator, PmdPhases};
use qbuffer::dynamics::{asym_series_residual, pmd_phase, prob_asym, prob_pf, SignBranch};
use qbuffer::units::{ghz_to_rad_per_s, km, per_km, ps_per_sqrt_km};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dw = ghz_to_rad_per_s(200.0);
    let mu = per_km(0.006);
    for l_km in [10.0, 50.0, 100.0, 190.0] {
        let l = km(l_km);
        let h = pmd_phase(dw, ps_per_sqrt_km(0.047), l);
        let v = pmd_phase(dw, ps_per_sqrt_km(0.0017), l);
        let phases = PmdPhases::new(h, v);
        println!(
            "L {l_km:>5} km: phi_h {h:.4}, phi_v {v:.4}, unitarity residual {:.2e}, P_f {:.5}, expanded/4 {:.5}, series residual {:.2e}",
            pmd_operator(phases).unitarity_residual(),
            prob_pf(phases, mu, l),
            prob_asym(phases, mu, l, SignBranch::Plus) / 4.0,
            asym_series_residual(phases, mu, l),
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
