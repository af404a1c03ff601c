//! File-producing drivers behind the `simulate`, `study` and `profiles`
//! commands.

use std::fs;
use std::path::Path;

use crate::config::Config;
use crate::energy::{check_decay, DecayReport, EnergySample};
use crate::error::{Error, Result};
use crate::output::{
    snapshot_name, write_meta, write_profiles, write_sensitivity, write_snapshot, write_study, ScalarRecord,
    ScalarWriter,
};
use crate::presets;
use crate::sharp::{
    delta_convergence_study, phase_profile, solve_inner_profiles, InnerProfileSolution, PhaseProfile, StudyResult,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub steps: usize,
    pub snapshots: usize,
    pub final_time: f64,
    pub floor_events: usize,
    pub mass_drift: f64,
    pub decay: DecayReport,
}

/// Runs the configured simulation and writes snapshots, `scalars.csv` and
/// `meta` into `out`. On a step failure the last valid state is written to
/// `final_state.csv` before the error is returned.
pub fn run_simulation(config: &Config, out: &Path) -> Result<SimulationSummary> {
    fs::create_dir_all(out)?;
    write_meta(&out.join("meta"), &config.to_toml())?;
    let mut sim = presets::simulation(config, config.delta)?;
    let mut scalars = ScalarWriter::create(&out.join("scalars.csv"))?;
    let first = ScalarRecord::measure(&sim.model, &sim.state, 0.0)?;
    scalars.write(&first)?;
    write_snapshot(&out.join(snapshot_name(0)), &sim.model, &sim.state)?;
    let mut snapshots = 1;
    let mut samples = vec![EnergySample {
        time: first.time,
        dt: 0.0,
        available: first.energy.available,
    }];
    let mut last_mass = first.mass;
    let every = config.time.output_every;
    let mut pending: Option<Error> = None;
    let outcome = sim.run(|s, info| {
        if pending.is_some() {
            return;
        }
        let result = (|| -> Result<()> {
            let rec = ScalarRecord::measure(&s.model, &s.state, info.dt)?;
            scalars.write(&rec)?;
            samples.push(EnergySample {
                time: rec.time,
                dt: info.dt,
                available: rec.energy.available,
            });
            last_mass = rec.mass;
            if info.step % every == 0 {
                write_snapshot(&out.join(snapshot_name(snapshots)), &s.model, &s.state)?;
                snapshots += 1;
            }
            Ok(())
        })();
        if let Err(e) = result {
            pending = Some(e);
        }
    });
    scalars.finish()?;
    if let Err(failure) = outcome {
        write_snapshot(&out.join("final_state.csv"), &sim.model, &failure.state)?;
        return Err(failure.error);
    }
    if let Some(e) = pending {
        return Err(e);
    }
    if sim.steps() % every != 0 {
        write_snapshot(&out.join(snapshot_name(snapshots)), &sim.model, &sim.state)?;
        snapshots += 1;
    }
    Ok(SimulationSummary {
        steps: sim.steps(),
        snapshots,
        final_time: sim.state.time,
        floor_events: sim.floor_events.len(),
        mass_drift: (last_mass - first.mass).abs() / first.mass.abs(),
        decay: check_decay(&samples, config.split_constant),
    })
}

/// Runs the δ-convergence study and writes `jump_residuals.csv`,
/// `jump_sensitivity.csv` and `meta`.
pub fn run_study(config: &Config, out: &Path) -> Result<StudyResult> {
    fs::create_dir_all(out)?;
    write_meta(&out.join("meta"), &config.to_toml())?;
    let result = delta_convergence_study(|d| presets::simulation(config, d), &config.study)?;
    write_study(&out.join("jump_residuals.csv"), &result)?;
    write_sensitivity(&out.join("jump_sensitivity.csv"), &result)?;
    Ok(result)
}

/// Solves the inner profiles for the configured vapor state and `inner.j0`
/// and writes `profiles.csv` and `meta`.
pub fn run_profiles(config: &Config, out: &Path) -> Result<(PhaseProfile, InnerProfileSolution)> {
    fs::create_dir_all(out)?;
    write_meta(&out.join("meta"), &config.to_toml())?;
    let thermo = presets::thermo(config)?;
    let profile = phase_profile(config.gamma, config.study.inner.nodes)?;
    let inner = solve_inner_profiles(&thermo, &config.rho_vapor, config.inner_j0, &config.study.inner)?;
    write_profiles(&out.join("profiles.csv"), &inner)?;
    Ok((profile, inner))
}
