use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbuffer::cli::{self, Format, Output, RunConfig};
use qbuffer::error::{Error, Result};
use qbuffer::fitting::ModelKind;

#[derive(Parser)]
#[command(name = "qbuffer", version, about = "Fiber quantum-buffer decoherence toolkit")]
struct Args {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = parse_model)]
    model: Option<ModelKind>,
    #[arg(long, global = true)]
    level: Option<f64>,
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Both decay models and their correlation measures over the time grid.
    Sweep,
    /// Simulated tomography of a damped Werner state.
    Tomo {
        /// Werner probability of the source state.
        #[arg(long)]
        p: Option<f64>,
        /// Amplitude-damping probability on the idler.
        #[arg(long)]
        xi: Option<f64>,
        /// Use expected counts instead of Poisson draws.
        #[arg(long)]
        noiseless: bool,
        /// Also write the count records CSV here.
        #[arg(long, value_name = "PATH")]
        records: Option<PathBuf>,
    },
    /// Fit a `t_s,p,sigma` CSV with the chosen model.
    Fit {
        #[arg(value_name = "DATA")]
        data: PathBuf,
    },
    /// First time the chosen model falls to the level.
    Threshold,
    /// Markovian / non-Markovian regime of a coupling pair.
    Classify {
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        gamma0: Option<f64>,
    },
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(args: Args) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(model) = args.model {
        config.model = model;
    }
    if let Some(level) = args.level {
        config.level = level;
    }
    let out = args.out.as_deref();

    match args.command {
        Command::Sweep => {
            let output = cli::cmd_sweep(&config)?;
            emit(out, &output.render(args.format.unwrap_or(Format::Csv))?)
        }
        Command::Tomo {
            p,
            xi,
            noiseless,
            records,
        } => {
            config.werner_p = p.unwrap_or(config.werner_p);
            config.xi = xi.unwrap_or(config.xi);
            config.noiseless |= noiseless;
            let output = cli::cmd_tomo(&config)?;
            emit(out, &output.render(args.format.unwrap_or(Format::Json))?)?;
            if let Some(path) = records {
                fs::write(path, output.records_csv()?)?;
            }
            if !output.report.converged {
                return Err(Error::NotConverged("maximum-likelihood reconstruction".into()));
            }
            Ok(())
        }
        Command::Fit { data } => {
            let output = cli::cmd_fit_file(&config, &data)?;
            emit(out, &output.render(args.format.unwrap_or(Format::Json))?)?;
            if !output.fit.converged {
                return Err(Error::NotConverged(format!("{} fit", output.fit.model)));
            }
            Ok(())
        }
        Command::Threshold => {
            let output = cli::cmd_threshold(&config)?;
            emit(out, &output.render(args.format.unwrap_or(Format::Json))?)
        }
        Command::Classify { kappa, gamma0 } => {
            if kappa.is_some() {
                config.kappa_per_s = kappa;
            }
            if let Some(g) = gamma0 {
                config.models.cavity.gamma0 = g;
            }
            let output = cli::cmd_classify(&config)?;
            emit(out, &output.render(args.format.unwrap_or(Format::Json))?)
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
