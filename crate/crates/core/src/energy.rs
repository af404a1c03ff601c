//! Discrete free energy, entropy production and the decay check for
//! closed-box runs.
//!
//! The quadratures mirror the operators of [`crate::evolution`]: gradient
//! energies are sums over faces, bulk terms are midpoint sums over cells and
//! the kinetic energy lives on the momentum faces.

use crate::error::Result;
use crate::evolution::{cell_average_sq, cell_thermo, chi_gradient_sq, phase_potential, Model, SimState};
use crate::grid::Boundary;
use crate::poisson::face_permittivity;
use crate::thermo::double_well_eval;

/// Free energy `A` split by contribution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyBreakdown {
    /// `∫ W(χ)/M_W²`
    pub double_well: f64,
    /// `∫ γδ²/(2M_W²) |∇χ|²`
    pub gradient: f64,
    /// `∫ ρf / M_ρf²`
    pub bulk: f64,
    /// `∫ ε̄ε₀/2 (1+s) |∇φ|²`
    pub electric: f64,
    /// `∫ ρ|v|²/2`
    pub kinetic: f64,
    /// Sum of the above.
    pub total: f64,
    /// Work term `[φ D]` of fixed-potential ends, `D = ε ∂φ/∂x`.
    pub boundary_work: f64,
    /// `total − boundary_work`, the Lyapunov functional of a closed box.
    pub available: f64,
}

/// Entropy production `Tζ` split by mechanism; each entry is `≥ 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EntropyProduction {
    pub viscous: f64,
    pub diffusive: f64,
    pub reactive: f64,
    pub phase_field: f64,
    pub total: f64,
}

impl EntropyProduction {
    pub fn components(&self) -> [f64; 4] {
        [self.viscous, self.diffusive, self.reactive, self.phase_field]
    }
}

fn face_weights(model: &Model, n: usize) -> Vec<f64> {
    let h = model.grid.dx();
    let mut w = vec![h; n + 1];
    w[0] = match model.phi_lo {
        Boundary::Dirichlet(_) => 0.5 * h,
        _ => 0.0,
    };
    w[n] = match model.phi_hi {
        Boundary::Dirichlet(_) => 0.5 * h,
        _ => 0.0,
    };
    w
}

/// Discrete free energy of `state` (the stored potential is used as is).
pub fn total_energy(model: &Model, state: &SimState) -> Result<EnergyBreakdown> {
    let reg = &model.regime;
    let grid = &model.grid;
    let h = grid.dx();
    let n = state.cells();
    let gamma = model.thermo.double_well.gamma;
    let mut out = EnergyBreakdown::default();

    let mut local = vec![0.0; model.n_species()];
    for i in 0..n {
        for (a, r) in state.rho.iter().enumerate() {
            local[a] = r[i];
        }
        out.bulk += h * model.thermo.rho_f(&local, state.chi[i])? / reg.mach_rhof_sq();
        out.double_well += h * double_well_eval(state.chi[i]).w / reg.mach_w_sq();
    }
    let grad_sq = chi_gradient_sq(grid, &state.chi);
    out.gradient = 0.5 * gamma * reg.delta * reg.delta / reg.mach_w_sq() * h * grad_sq.iter().sum::<f64>();

    let perm = model.permittivity(&state.chi);
    let eps_face = face_permittivity(&perm);
    let g = model.potential_face_gradient(&state.phi);
    let weights = face_weights(model, n);
    out.electric = (0..=n).map(|f| 0.5 * weights[f] * eps_face[f] * g[f] * g[f]).sum();
    if let Boundary::Dirichlet(v) = model.phi_hi {
        out.boundary_work += v * eps_face[n] * g[n];
    }
    if let Boundary::Dirichlet(v) = model.phi_lo {
        out.boundary_work -= v * eps_face[0] * g[0];
    }

    let rho = state.total_density();
    out.kinetic = (1..n)
        .map(|f| {
            let m = state.momentum[f];
            h * m * m / (rho[f - 1] + rho[f])
        })
        .sum();

    out.total = out.double_well + out.gradient + out.bulk + out.electric + out.kinetic;
    out.available = out.total - out.boundary_work;
    Ok(out)
}

/// Entropy production of `state` with the discrete fluxes of the integrator.
pub fn entropy_production(model: &Model, state: &SimState) -> Result<EntropyProduction> {
    let reg = &model.regime;
    let h = model.grid.dx();
    let n = state.cells();
    let nsp = model.n_species();
    let thermo = cell_thermo(model, &state.rho, &state.chi)?;
    let rho = state.total_density();
    let mut out = EntropyProduction::default();

    let v = state.face_velocity();
    let viscosity = reg.inv_reynolds() * reg.longitudinal_viscosity();
    out.viscous = (0..n)
        .map(|i| {
            let dv = (v[i + 1] - v[i]) / h;
            h * viscosity * dv * dv
        })
        .sum();

    let dim = nsp - 1;
    if dim > 0 {
        let e0 = model.thermo.elementary_charge;
        let q: Vec<f64> = model.thermo.species.iter().map(|s| s.specific_charge()).collect();
        let mut p = vec![0.0; dim];
        for f in 1..n {
            for b in 0..dim {
                let dmu = (thermo.mu[b][f] - thermo.mu[dim][f]) - (thermo.mu[b][f - 1] - thermo.mu[dim][f - 1]);
                p[b] = (dmu + e0 * (q[b] - q[dim]) * (state.phi[f] - state.phi[f - 1])) / h;
            }
            out.diffusive += h * model.mobility.quadratic_form(&p);
        }
    }

    if !model.reactions.is_empty() {
        let mut mu = vec![0.0; nsp];
        for i in 0..n {
            for a in 0..nsp {
                mu[a] = thermo.mu[a][i];
            }
            out.reactive += h * model.reactions.entropy_production(&mu);
        }
    }

    let g2 = cell_average_sq(&model.potential_face_gradient(&state.phi));
    let mu_chi = phase_potential(model, &state.chi, &thermo.d_rho_f_dchi, &g2);
    let tau = model.thermo.double_well.tau;
    let mobility = reg.tau_bar() * tau * reg.mach_w_sq();
    out.phase_field = (0..n).map(|i| h * mobility / rho[i] * mu_chi[i] * mu_chi[i]).sum();

    out.total = out.viscous + out.diffusive + out.reactive + out.phase_field;
    Ok(out)
}

/// One sample of the Lyapunov functional along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub time: f64,
    /// Step size that produced this sample (0 for the initial state).
    pub dt: f64,
    pub available: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub steps: usize,
    /// Largest `A_{k+1} − A_k − tol_k`; nonpositive when the check passes.
    pub max_violation: f64,
    /// Largest raw increase `A_{k+1} − A_k` (may be negative).
    pub max_increase: f64,
    pub worst_step: Option<usize>,
    pub passed: bool,
}

/// Default splitting constant `C` of the per-step allowance `C·dt²`.
pub const DEFAULT_SPLIT_CONSTANT: f64 = 1.0;

/// Checks `A_{k+1} ≤ A_k + 10⁻⁸|A_k| + C·dt²` along consecutive samples.
pub fn check_decay(samples: &[EnergySample], split_constant: f64) -> DecayReport {
    let mut report = DecayReport {
        steps: samples.len().saturating_sub(1),
        max_violation: f64::NEG_INFINITY,
        max_increase: f64::NEG_INFINITY,
        worst_step: None,
        passed: true,
    };
    for (k, w) in samples.windows(2).enumerate() {
        let increase = w[1].available - w[0].available;
        let tol = 1e-8 * w[0].available.abs() + split_constant * w[1].dt * w[1].dt;
        let violation = increase - tol;
        report.max_increase = report.max_increase.max(increase);
        if violation > report.max_violation {
            report.max_violation = violation;
            report.worst_step = Some(k + 1);
        }
        if violation > 0.0 {
            report.passed = false;
        }
    }
    report
}
