use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pfe_core::config::Config;
use pfe_core::driver;
use pfe_core::Error;

/// Diffuse-interface electrolyte solver (all quantities nondimensional).
#[derive(Parser)]
#[command(name = "pfe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write snapshots and scalar time series.
    Simulate(Common),
    /// Run the δ-convergence study of the interface conditions.
    Study(Common),
    /// Solve the inner-layer profiles.
    Profiles(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file (flat `section.key = value` TOML).
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated, decreasing list of interface widths (study only).
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Output directory; `PFE_OUT_DIR` takes precedence.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn load(&self) -> Result<(Config, PathBuf), Error> {
        let mut config = Config::from_path(&self.config)?;
        if let Some(d) = &self.deltas {
            config.study.deltas = d.clone();
            config.validate()?;
        }
        let out = std::env::var_os("PFE_OUT_DIR").map_or_else(|| self.out.clone(), PathBuf::from);
        Ok((config, out))
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(c) => {
            let (config, out) = c.load()?;
            let s = driver::run_simulation(&config, &out)?;
            println!(
                "steps {}  t {:.6}  snapshots {}  mass drift {:.3e}  floor events {}",
                s.steps, s.final_time, s.snapshots, s.mass_drift, s.floor_events
            );
            println!(
                "energy decay: {} (max violation {:.3e})",
                if s.decay.passed { "ok" } else { "violated" },
                s.decay.max_violation
            );
        }
        Command::Study(c) => {
            let (config, out) = c.load()?;
            let r = driver::run_study(&config, &out)?;
            println!(
                "{:>8} {:>6} {:>12} {:>12} {:>12} {:>12}",
                "delta", "cells", "i1", "i4", "i5", "i6"
            );
            for row in &r.rows {
                let res = &row.primary.residuals;
                println!(
                    "{:>8.4} {:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
                    row.delta,
                    row.cells,
                    res.i1_norm(),
                    res.i4.abs(),
                    res.i5.abs(),
                    res.i6.abs()
                );
            }
            println!("order i1 {:?}", r.orders("i1"));
            println!("order i4 {:?}", r.orders("i4"));
        }
        Command::Profiles(c) => {
            let (config, out) = c.load()?;
            let (profile, inner) = driver::run_profiles(&config, &out)?;
            println!("profile residual {:.3e}", profile.residual);
            println!("I_sigma {:.12}  I_j {:.12}", inner.surface_tension, inner.flux_integral);
            println!("right state {:?}", inner.right_state);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
