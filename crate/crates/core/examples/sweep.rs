//! Both decay models and their correlation measures on a time grid,
//! written as CSV.

use qbuffer::cli::{cmd_sweep, Format, Output, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig {
        t_end_s: 1.5e-3,
        n_points: 11,
        ..RunConfig::default()
    };
    let out = cmd_sweep(&config)?;
    print!("{}", out.render(Format::Csv)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
