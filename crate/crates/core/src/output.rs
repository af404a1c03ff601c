//! CSV emission. Every float is written with 17 significant digits.
//!
//! | file | columns |
//! |------|---------|
//! | `snapshots_XXXX.csv` | `x, rho_1 … rho_N, v, chi, phi, nF` |
//! | `scalars.csv` | `t, dt, A, A_available, boundary_work, T_viscous, T_diffusive, T_reactive, T_phase_field, T_total, mass, charge` |
//! | `jump_residuals.csv` | `delta, cells, steps, interface, w, j0, i1 … b5, surface_charge, oracle_jump, order_i1, order_i4` |
//! | `jump_sensitivity.csv` | `delta, factor, i1, i4, i5` |
//! | `profiles.csv` | `z, X0, R_1 … R_N` |

use std::fs::File;
use std::io::Write;
use std::path::Path;

use csv::Writer;

use crate::energy::{EnergyBreakdown, EntropyProduction};
use crate::error::Result;
use crate::evolution::{Model, SimState};
use crate::sharp::{InnerProfileSolution, StudyResult};

/// Formats a float with 17 significant digits.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn row(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt(v)).collect()
}

pub fn snapshot_name(index: usize) -> String {
    format!("snapshots_{index:04}.csv")
}

pub fn write_snapshot(path: &Path, model: &Model, state: &SimState) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    let nsp = model.n_species();
    let mut header = vec!["x".to_string()];
    header.extend((1..=nsp).map(|a| format!("rho_{a}")));
    header.extend(["v", "chi", "phi", "nF"].map(String::from));
    w.write_record(&header)?;
    let xs = model.grid.centers();
    let v = state.cell_velocity();
    let nf = model.charge_density(&state.rho);
    for i in 0..state.cells() {
        let mut r = vec![xs[i]];
        r.extend(state.rho.iter().map(|rho| rho[i]));
        r.extend([v[i], state.chi[i], state.phi[i], nf[i]]);
        w.write_record(row(&r))?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the scalar time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarRecord {
    pub time: f64,
    pub dt: f64,
    pub energy: EnergyBreakdown,
    pub entropy: EntropyProduction,
    pub mass: f64,
    pub charge: f64,
}

impl ScalarRecord {
    pub fn measure(model: &Model, state: &SimState, dt: f64) -> Result<Self> {
        let energy = crate::energy::total_energy(model, state)?;
        let entropy = crate::energy::entropy_production(model, state)?;
        let grid = &model.grid;
        Ok(Self {
            time: state.time,
            dt,
            energy,
            entropy,
            mass: grid.integrate(&state.total_density()),
            charge: grid.integrate(&model.charge_density(&state.rho)),
        })
    }
}

pub const SCALAR_HEADER: [&str; 12] = [
    "t",
    "dt",
    "A",
    "A_available",
    "boundary_work",
    "T_viscous",
    "T_diffusive",
    "T_reactive",
    "T_phase_field",
    "T_total",
    "mass",
    "charge",
];

pub struct ScalarWriter {
    inner: Writer<File>,
}

impl ScalarWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut inner = Writer::from_path(path)?;
        inner.write_record(SCALAR_HEADER)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &ScalarRecord) -> Result<()> {
        let e = &r.energy;
        let s = &r.entropy;
        self.inner.write_record(row(&[
            r.time,
            r.dt,
            e.total,
            e.available,
            e.boundary_work,
            s.viscous,
            s.diffusive,
            s.reactive,
            s.phase_field,
            s.total,
            r.mass,
            r.charge,
        ]))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_meta(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub const STUDY_CONDITIONS: [&str; 10] = ["i1", "i2", "i2b", "i3", "i3b", "i4", "i5", "i6", "i6b", "b5"];

pub fn write_study(path: &Path, result: &StudyResult) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    let mut header: Vec<String> = ["delta", "cells", "steps", "interface", "w", "j0"]
        .map(String::from)
        .to_vec();
    header.extend(STUDY_CONDITIONS.map(String::from));
    header.extend(["surface_charge", "oracle_jump", "order_i1", "order_i4"].map(String::from));
    w.write_record(&header)?;
    let o1 = result.orders("i1");
    let o4 = result.orders("i4");
    for (k, r) in result.rows.iter().enumerate() {
        let named = r.primary.residuals.named();
        let mut rec = vec![
            fmt(r.delta),
            r.cells.to_string(),
            r.steps.to_string(),
            fmt(r.interface_position),
            fmt(r.primary.interface.normal_speed),
            fmt(r.primary.interface.mass_flux),
        ];
        for c in STUDY_CONDITIONS {
            rec.push(
                named
                    .iter()
                    .find(|(n, _)| *n == c)
                    .map_or(String::new(), |(_, v)| fmt(*v)),
            );
        }
        rec.push(fmt(r.primary.surface_charge));
        rec.push(fmt(r.primary.oracle_displacement_jump));
        let order = |o: &[f64]| if k == 0 { String::new() } else { fmt(o[k - 1]) };
        rec.push(order(&o1));
        rec.push(order(&o4));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sensitivity(path: &Path, result: &StudyResult) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["delta", "factor", "i1", "i4", "i5"])?;
    for r in &result.rows {
        for e in std::iter::once(&r.primary).chain(&r.sensitivity) {
            w.write_record(row(&[
                r.delta,
                e.factor,
                e.residuals.i1_norm(),
                e.residuals.i4.abs(),
                e.residuals.i5.abs(),
            ]))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_profiles(path: &Path, inner: &InnerProfileSolution) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    let mut header = vec!["z".to_string(), "X0".to_string()];
    header.extend((1..=inner.rho.len()).map(|a| format!("R_{a}")));
    w.write_record(&header)?;
    for k in 0..inner.nodes() {
        let mut r = vec![inner.z[k], inner.x0[k]];
        r.extend(inner.rho.iter().map(|x| x[k]));
        w.write_record(row(&r))?;
    }
    w.flush()?;
    Ok(())
}
