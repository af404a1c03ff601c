//! Empirical δ-convergence of the interface conditions: run the diffuse
//! model for a sequence of interface widths, extract bulk traces on both
//! sides of the layer and evaluate the jump residuals.

use std::thread;

use super::inner::{solve_inner_profiles, InnerSolverOptions};
use super::jumps::{
    inner_poisson_displacement_jump, jump_residuals_coupled, jump_residuals_uncoupled, BulkSide, BulkState,
    InterfaceData, JumpResiduals,
};
use crate::error::{Error, Result};
use crate::evolution::{Regime, SimState, Simulation};
use crate::linalg::solve_dense;

/// Locates the `χ = 0` crossing by linear interpolation between cell
/// centers; the leftmost vapor→liquid crossing is returned.
pub fn locate_interface(centers: &[f64], chi: &[f64]) -> Result<f64> {
    for i in 0..chi.len().saturating_sub(1) {
        let (a, b) = (chi[i], chi[i + 1]);
        if a == 0.0 {
            return Ok(centers[i]);
        }
        if a < 0.0 && b >= 0.0 {
            let t = -a / (b - a);
            return Ok(centers[i] + t * (centers[i + 1] - centers[i]));
        }
    }
    Err(Error::NoInterface)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOptions {
    pub deltas: Vec<f64>,
    /// Bulk traces use cells farther than `extraction · δ` from the interface.
    pub extraction: f64,
    /// Additional extraction factors evaluated for the sensitivity report.
    pub sensitivity: Vec<f64>,
    /// Fraction of the run over which the interface speed is fitted.
    pub speed_window: f64,
    pub inner: InnerSolverOptions,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            deltas: vec![0.1, 0.05, 0.025],
            extraction: 5.0,
            sensitivity: vec![4.0, 7.0],
            speed_window: 0.1,
            inner: InnerSolverOptions::default(),
        }
    }
}

impl StudyOptions {
    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::config("study.deltas", "must not be empty"));
        }
        if self.deltas.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::config("study.deltas", "must be strictly decreasing"));
        }
        if !(self.extraction > 0.0) {
            return Err(Error::config("study.extraction", "must be > 0"));
        }
        if !(self.speed_window > 0.0 && self.speed_window <= 1.0) {
            return Err(Error::config("study.speed_window", "must be in (0, 1]"));
        }
        Ok(())
    }
}

/// Traces and residuals extracted from one final state.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub factor: f64,
    pub bulk: BulkState,
    pub interface: InterfaceData,
    pub residuals: JumpResiduals,
    /// Excess layer charge `∫ n^F dz` (coupled regime).
    pub surface_charge: f64,
    /// Displacement jump of a Poisson solve across the layer with the
    /// excess charge (coupled regime).
    pub oracle_displacement_jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub delta: f64,
    pub cells: usize,
    pub steps: usize,
    pub interface_position: f64,
    pub primary: Extraction,
    pub sensitivity: Vec<Extraction>,
    pub floor_events: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub regime: Regime,
    pub rows: Vec<StudyRow>,
}

impl StudyResult {
    /// Residual magnitudes of one condition, one per δ.
    pub fn series(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                r.primary
                    .residuals
                    .named()
                    .into_iter()
                    .find(|(n, _)| *n == name)
                    .map_or(f64::NAN, |(_, v)| v)
            })
            .collect()
    }

    /// Empirical orders `log(r_k/r_{k+1}) / log(δ_k/δ_{k+1})`.
    pub fn orders(&self, name: &str) -> Vec<f64> {
        let r = self.series(name);
        empirical_orders(&self.rows.iter().map(|x| x.delta).collect::<Vec<_>>(), &r)
    }
}

pub fn empirical_orders(deltas: &[f64], residuals: &[f64]) -> Vec<f64> {
    deltas
        .windows(2)
        .zip(residuals.windows(2))
        .map(|(d, r)| (r[0] / r[1]).ln() / (d[0] / d[1]).ln())
        .collect()
}

fn least_squares_slope(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    if samples.len() < 2 {
        return 0.0;
    }
    let mt = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mx = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let num: f64 = samples.iter().map(|s| (s.0 - mt) * (s.1 - mx)).sum();
    let den: f64 = samples.iter().map(|s| (s.0 - mt) * (s.0 - mt)).sum();
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Least-squares quadratic through `f` over the cells `window`, in the
/// variable `s = (x − origin)/scale`.
#[derive(Debug, Clone, Copy)]
struct Fit {
    origin: f64,
    scale: f64,
    coef: [f64; 3],
}

impl Fit {
    fn new(xs: &[f64], f: &[f64], window: &[usize], origin: f64, scale: f64) -> Result<Self> {
        let mut a = vec![0.0; 9];
        let mut b = vec![0.0; 3];
        for &i in window {
            let s = (xs[i] - origin) / scale;
            let basis = [1.0, s, s * s];
            for r in 0..3 {
                b[r] += basis[r] * f[i];
                for c in 0..3 {
                    a[3 * r + c] += basis[r] * basis[c];
                }
            }
        }
        let c = solve_dense(a, b)?;
        Ok(Self {
            origin,
            scale,
            coef: [c[0], c[1], c[2]],
        })
    }

    fn at(&self, x: f64) -> f64 {
        let s = (x - self.origin) / self.scale;
        self.coef[0] + s * (self.coef[1] + s * self.coef[2])
    }

    fn slope(&self, x: f64) -> f64 {
        let s = (x - self.origin) / self.scale;
        (self.coef[1] + 2.0 * s * self.coef[2]) / self.scale
    }
}

/// Extracts the bulk traces from a least-squares quadratic through the cells at
/// distances between `factor·δ` and `2·factor·δ` from the interface and
/// evaluates the interface conditions for the regime of `sim`.
pub fn extract(
    sim: &Simulation,
    position: f64,
    normal_speed: f64,
    factor: f64,
    inner: &InnerSolverOptions,
) -> Result<Extraction> {
    let model = &sim.model;
    let st: &SimState = &sim.state;
    let grid = &model.grid;
    let xs = grid.centers();
    let n = xs.len();
    let nsp = model.n_species();
    let delta = model.regime.delta;
    let d = factor * delta;
    let h = grid.dx();

    let window = |sign: f64| -> Vec<usize> {
        (0..n)
            .filter(|&i| {
                let r = sign * (xs[i] - position);
                r > d && r <= 2.0 * d
            })
            .collect()
    };
    let minus_cells = window(-1.0);
    let plus_cells = window(1.0);
    if minus_cells.len() < 3 {
        return Err(Error::InvalidParameter(
            "vapor bulk region too small for trace extraction".into(),
        ));
    }
    if plus_cells.len() < 3 {
        return Err(Error::InvalidParameter(
            "liquid bulk region too small for trace extraction".into(),
        ));
    }

    let thermo = &model.thermo;
    let mut mu = vec![vec![0.0; n]; nsp];
    for i in 0..n {
        let local = st.cell_densities(i);
        let m = thermo.chemical_potentials(&local, st.chi[i])?;
        for a in 0..nsp {
            mu[a][i] = m[a];
        }
    }
    let v = st.cell_velocity();

    let side = |cells: &[usize]| -> Result<BulkSide> {
        let fit = |f: &[f64]| Fit::new(&xs, f, cells, position, d);
        let rho = (0..nsp)
            .map(|a| Ok(fit(&st.rho[a])?.at(position)))
            .collect::<Result<Vec<f64>>>()?;
        if let Some((species, &value)) = rho.iter().enumerate().find(|(_, &r)| !(r > 0.0)) {
            return Err(Error::NonpositiveDensity { species, value });
        }
        let phi = fit(&st.phi)?;
        Ok(BulkSide {
            normal_velocity: fit(&v)?.at(position),
            tangential_velocity: 0.0,
            phi: phi.at(position),
            grad_phi_normal: phi.slope(position),
            grad_phi_tangential: 0.0,
            grad_mu_normal: mu
                .iter()
                .map(|m| Ok(fit(m)?.slope(position)))
                .collect::<Result<Vec<f64>>>()?,
            rho,
        })
    };
    let bulk = BulkState {
        minus: side(&minus_cells)?,
        plus: side(&plus_cells)?,
    };
    let iface = InterfaceData::from_bulk(&bulk, normal_speed, 0.0);
    let inner_solution = solve_inner_profiles(thermo, &bulk.minus.rho, iface.mass_flux, inner)?;

    let charge = model.charge_density(&st.rho);
    let minus_charge = Fit::new(&xs, &charge, &minus_cells, position, d)?;
    let plus_charge = Fit::new(&xs, &charge, &plus_cells, position, d)?;
    let lo_cell = minus_cells[minus_cells.len() - 1] + 1;
    let hi_cell = plus_cells[0] - 1;
    let mut excess = Vec::with_capacity(hi_cell + 1 - lo_cell);
    for i in lo_cell..=hi_cell {
        let bulk_charge = if xs[i] < position {
            minus_charge.at(xs[i])
        } else {
            plus_charge.at(xs[i])
        };
        excess.push(charge[i] - bulk_charge);
    }
    let surface_charge = excess.iter().sum::<f64>() * h / delta;
    let z: Vec<f64> = (lo_cell..=hi_cell).map(|i| (xs[i] - position) / delta).collect();
    let s: Vec<f64> = (lo_cell..=hi_cell)
        .map(|i| thermo.susceptibility(st.chi[i]).0)
        .collect();
    let oracle_displacement_jump = if z.len() >= 8 {
        inner_poisson_displacement_jump(&z, &excess, &s, thermo.susceptibility.vacuum_permittivity)?
    } else {
        -surface_charge
    };

    let residuals = match model.regime.regime {
        Regime::Uncoupled => jump_residuals_uncoupled(&bulk, &iface, &inner_solution, thermo, &model.mobility)?,
        Regime::Coupled => {
            jump_residuals_coupled(&bulk, &iface, &inner_solution, thermo, &model.mobility, surface_charge)?
        }
    };
    Ok(Extraction {
        factor,
        bulk,
        interface: iface,
        residuals,
        surface_charge,
        oracle_displacement_jump,
    })
}

/// Runs one member of the study and evaluates the residuals.
pub fn study_member(mut sim: Simulation, options: &StudyOptions) -> Result<StudyRow> {
    let xs = sim.model.grid.centers();
    locate_interface(&xs, &sim.state.chi)?;
    let end = sim.config.end_time;
    let window_start = end * (1.0 - options.speed_window);
    let mut history: Vec<(f64, f64)> = Vec::new();
    let mut failure: Option<Error> = None;
    let outcome = sim.run(|s, info| {
        if info.time >= window_start && failure.is_none() {
            match locate_interface(&xs, &s.state.chi) {
                Ok(x) => history.push((info.time, x)),
                Err(e) => failure = Some(e),
            }
        }
    });
    if let Err(e) = outcome {
        return Err(e.error);
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let position = locate_interface(&xs, &sim.state.chi)?;
    let speed = least_squares_slope(&history);
    let primary = extract(&sim, position, speed, options.extraction, &options.inner)?;
    let sensitivity = options
        .sensitivity
        .iter()
        .map(|&f| extract(&sim, position, speed, f, &options.inner))
        .collect::<Result<Vec<_>>>()?;
    Ok(StudyRow {
        delta: sim.model.regime.delta,
        cells: sim.model.grid.cells(),
        steps: sim.steps(),
        interface_position: position,
        primary,
        sensitivity,
        floor_events: sim.floor_events.len(),
    })
}

/// Runs the study members concurrently. `build` creates the simulation for
/// one value of δ.
pub fn delta_convergence_study<F>(build: F, options: &StudyOptions) -> Result<StudyResult>
where
    F: Fn(f64) -> Result<Simulation> + Sync,
{
    options.validate()?;
    let sims = options.deltas.iter().map(|&d| build(d)).collect::<Result<Vec<_>>>()?;
    let regime = sims[0].model.regime.regime;
    let rows = thread::scope(|scope| {
        let handles: Vec<_> = sims
            .into_iter()
            .map(|sim| scope.spawn(move || study_member(sim, options)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("study member panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(StudyResult { regime, rows })
}
