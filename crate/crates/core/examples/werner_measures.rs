//! Correlation measures of the Werner family and where concurrence
//! overtakes discord.

use qbuffer::measures::{discord_concurrence_crossover, CorrelationReport};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>9} {:>9} {:>9} {:>11}", "P", "total", "classical", "discord", "concurrence");
    for i in 0..=10 {
        let r = CorrelationReport::at(i as f64 / 10.0)?;
        println!(
            "{:>6.2} {:>9.5} {:>9.5} {:>9.5} {:>11.5}",
            r.p, r.total, r.classical, r.discord, r.concurrence
        );
    }
    let sep = CorrelationReport::at(1.0 / 3.0)?;
    println!("separable point P = 1/3: discord {:.4}, concurrence {}", sep.discord, sep.concurrence);
    println!("concurrence exceeds discord above P = {:.5}", discord_concurrence_crossover());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
