//! Buffer times at which each model decays to the separability level
//! P = 1/3, and to the level where concurrence first exceeds discord.

use qbuffer::crossing::solve_level_crossing;
use qbuffer::dynamics::{markovian_exponential, p3, prob_pasy, CavityModelParams, PmdModelParams};
use qbuffer::measures::discord_concurrence_crossover;
use qbuffer::units::{length_from_time, UnitContext, SPEED_OF_LIGHT};

type Curve<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let units = UnitContext::default();
    let pmd = PmdModelParams::published();
    let cavity = CavityModelParams::published();
    let rate = 2.0 * pmd.mu * SPEED_OF_LIGHT / units.n_r;
    let window = (0.0, 10e-3);

    for level in [1.0 / 3.0, discord_concurrence_crossover()] {
        println!("level {level:.5}");
        let models: [(&str, Curve<'_>); 3] = [
            ("pasy", Box::new(|t| prob_pasy(t, &pmd, &units))),
            ("p3", Box::new(|t| p3(t, &cavity))),
            ("exp", Box::new(|t| markovian_exponential(t, 1.0, rate))),
        ];
        for (name, model) in models {
            let t = solve_level_crossing(model, level, window)?;
            println!(
                "  {name:>4}: t* = {:.4} ms, L* = {:.2} km",
                t * 1e3,
                length_from_time(t, &units)? / 1e3
            );
        }
    }
    println!("closed form for exp at 1/3: {:.2} km", 3f64.ln() / (2.0 * pmd.mu) / 1e3);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
