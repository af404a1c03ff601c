//! Operator-split time integration of the nondimensional coupled system.
//!
//! Discrete layout: densities `ρ_α`, phase field `χ` and potential `φ` live
//! at cell centers; the momentum `ρv` lives on the cell faces (staggered),
//! with wall faces pinned to zero. One step performs, in order:
//!
//! 1. Poisson solve for `φ` from the current `(ρ_α, χ)`;
//! 2. semi-implicit Allen–Cahn update of `χ` (implicit `γδ²Δχ` plus a linear
//!    stabilization term, explicit `W′`, `∂ρf/∂χ`, electric term, advection);
//! 3. explicit conservative update of `ρ_α`, `α < N`, and of `ρ`, with
//!    upwind convection, diffusion/electromigration fluxes and reactions;
//!    `ρ_N := ρ − Σ_{α<N} ρ_α`;
//! 4. explicit momentum update from the new densities (forward–backward
//!    coupling keeps the acoustic part stable under the CFL bound).

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid};
use crate::linalg::solve_tridiagonal;
use crate::poisson;
use crate::reactions::ReactionNetwork;
use crate::thermo::{double_well_eval, MixtureThermo};
use crate::transport::MobilityMatrix;

/// Scaling regime of the electrostatic coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `ε̄ = ε̲ = 1`.
    Uncoupled,
    /// `ε̄ = ε̲ = δ`.
    Coupled,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Uncoupled => "uncoupled",
            Regime::Coupled => "coupled",
        }
    }
}

/// Interface-width parameter `δ`, the regime switch and the viscosities.
/// All other nondimensional groups follow from `δ`:
/// `Ā = s^c = M̄_d = M̄_r = M̄_e = M_ρf = 1`, `M_W = √δ`, `Re = 1/δ²`, `τ̄ = 1/δ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeParams {
    pub delta: f64,
    pub regime: Regime,
    /// Bulk viscosity `λ`.
    pub lambda: f64,
    /// Shear viscosity `η`.
    pub eta: f64,
}

impl RegimeParams {
    pub fn new(delta: f64, regime: Regime, lambda: f64, eta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::config("regime.delta", "must be in (0, 0.5]"));
        }
        if !(eta >= 0.0) {
            return Err(Error::config("regime.eta", "must be >= 0"));
        }
        if !(lambda + 2.0 / 3.0 * eta >= 0.0) {
            return Err(Error::config("regime.lambda", "must satisfy lambda + 2/3 eta >= 0"));
        }
        Ok(Self {
            delta,
            regime,
            lambda,
            eta,
        })
    }

    /// `ε̄` (Maxwell stress and electric energy) and `ε̲` (Poisson) coincide.
    pub fn electric_scale(&self) -> f64 {
        match self.regime {
            Regime::Uncoupled => 1.0,
            Regime::Coupled => self.delta,
        }
    }

    /// `M_W² = δ`.
    pub fn mach_w_sq(&self) -> f64 {
        self.delta
    }

    /// `M_ρf² = 1`.
    pub fn mach_rhof_sq(&self) -> f64 {
        1.0
    }

    /// `1/Re = δ²`.
    pub fn inv_reynolds(&self) -> f64 {
        self.delta * self.delta
    }

    /// `τ̄ = 1/δ²`.
    pub fn tau_bar(&self) -> f64 {
        1.0 / (self.delta * self.delta)
    }

    /// Longitudinal viscosity `λ + 2η` (1D reduction of the Navier–Stokes stress).
    pub fn longitudinal_viscosity(&self) -> f64 {
        self.lambda + 2.0 * self.eta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepConfig {
    pub cfl: f64,
    pub max_dt: f64,
    pub end_time: f64,
    /// Snapshot cadence in steps.
    pub output_every: usize,
    pub density_floor: f64,
    /// Allowed phase-field overshoot beyond `±1`.
    pub overshoot_bound: f64,
    /// Linear stabilization constant of the Allen–Cahn step.
    pub stabilization: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            max_dt: 1e-3,
            end_time: 1.0,
            output_every: 100,
            density_floor: 1e-10,
            overshoot_bound: 0.1,
            stabilization: 6.0,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::config("time.cfl", "must be in (0, 1)"));
        }
        if !(self.max_dt > 0.0) {
            return Err(Error::config("time.max_dt", "must be > 0"));
        }
        if !(self.end_time >= 0.0) {
            return Err(Error::config("time.end", "must be >= 0"));
        }
        if self.output_every == 0 {
            return Err(Error::config("time.output_every", "must be >= 1"));
        }
        if !(self.density_floor > 0.0) {
            return Err(Error::config("time.density_floor", "must be > 0"));
        }
        if !(self.overshoot_bound > 0.0 && self.overshoot_bound <= 0.1) {
            return Err(Error::config("time.overshoot_bound", "must be in (0, 0.1]"));
        }
        if !(self.stabilization >= 0.0) {
            return Err(Error::config("time.stabilization", "must be >= 0"));
        }
        Ok(())
    }
}

/// Everything that stays fixed during a run.
#[derive(Debug, Clone)]
pub struct Model {
    pub thermo: MixtureThermo,
    pub reactions: ReactionNetwork,
    pub mobility: MobilityMatrix,
    pub regime: RegimeParams,
    pub grid: Grid,
    pub phi_lo: Boundary,
    pub phi_hi: Boundary,
}

impl Model {
    pub fn new(
        thermo: MixtureThermo,
        reactions: ReactionNetwork,
        mobility: MobilityMatrix,
        regime: RegimeParams,
        grid: Grid,
        phi_lo: Boundary,
        phi_hi: Boundary,
    ) -> Result<Self> {
        let nsp = thermo.n_species();
        if mobility.dim() + 1 != nsp {
            return Err(Error::Dimension {
                what: "mobility matrix (N−1)",
                expected: nsp - 1,
                got: mobility.dim(),
            });
        }
        Ok(Self {
            thermo,
            reactions,
            mobility,
            regime,
            grid,
            phi_lo,
            phi_hi,
        })
    }

    pub fn n_species(&self) -> usize {
        self.thermo.n_species()
    }

    /// Cellwise Poisson permittivity `ε̲ ε₀ (1 + s(χ))`.
    pub fn permittivity(&self, chi: &[f64]) -> Vec<f64> {
        let scale = self.regime.electric_scale() * self.thermo.susceptibility.vacuum_permittivity;
        chi.iter()
            .map(|&c| scale * (1.0 + self.thermo.susceptibility(c).0))
            .collect()
    }

    pub fn charge_density(&self, rho: &[Vec<f64>]) -> Vec<f64> {
        let n = self.grid.cells();
        let mut out = vec![0.0; n];
        let e0 = self.thermo.elementary_charge;
        for (sp, r) in self.thermo.species.iter().zip(rho) {
            let q = e0 * sp.specific_charge();
            if q != 0.0 {
                out.iter_mut().zip(r).for_each(|(o, x)| *o += q * x);
            }
        }
        out
    }

    /// Solves for the potential consistent with `(ρ_α, χ)`.
    pub fn solve_potential(&self, rho: &[Vec<f64>], chi: &[f64]) -> Result<Vec<f64>> {
        let perm = self.permittivity(chi);
        let rhs = self.charge_density(rho);
        Ok(poisson::solve_potential(&self.grid, &perm, &rhs, self.phi_lo, self.phi_hi)?.values)
    }

    /// Face gradients of `φ` (boundary faces from the electric BCs).
    pub fn potential_face_gradient(&self, phi: &[f64]) -> Vec<f64> {
        let n = phi.len();
        let h = self.grid.dx();
        let mut g = vec![0.0; n + 1];
        for f in 1..n {
            g[f] = (phi[f] - phi[f - 1]) / h;
        }
        g[0] = match self.phi_lo {
            Boundary::Dirichlet(v) => (phi[0] - v) / (0.5 * h),
            Boundary::Neumann(s) => s,
            Boundary::NoFlux => 0.0,
        };
        g[n] = match self.phi_hi {
            Boundary::Dirichlet(v) => (v - phi[n - 1]) / (0.5 * h),
            Boundary::Neumann(s) => s,
            Boundary::NoFlux => 0.0,
        };
        g
    }
}

/// Discrete fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Partial densities, `rho[α][cell]`.
    pub rho: Vec<Vec<f64>>,
    /// Momentum `ρv` on faces `0..=n`; the wall faces are zero.
    pub momentum: Vec<f64>,
    pub chi: Vec<f64>,
    pub phi: Vec<f64>,
    pub time: f64,
}

impl SimState {
    pub fn cells(&self) -> usize {
        self.chi.len()
    }

    pub fn total_density(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cells()];
        for r in &self.rho {
            out.iter_mut().zip(r).for_each(|(o, x)| *o += x);
        }
        out
    }

    /// Partial densities of one cell.
    pub fn cell_densities(&self, i: usize) -> Vec<f64> {
        self.rho.iter().map(|r| r[i]).collect()
    }

    /// Face velocities `m_f / ρ_f` with arithmetic-mean face densities.
    pub fn face_velocity(&self) -> Vec<f64> {
        let rho = self.total_density();
        face_velocity(&self.momentum, &rho)
    }

    /// Cell-centered velocity, the average of the two bracketing faces.
    pub fn cell_velocity(&self) -> Vec<f64> {
        let vf = self.face_velocity();
        vf.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn validate(&self, model: &Model) -> Result<()> {
        let n = model.grid.cells();
        if self.rho.len() != model.n_species() {
            return Err(Error::Dimension {
                what: "species fields",
                expected: model.n_species(),
                got: self.rho.len(),
            });
        }
        for (what, len, expected) in [
            ("chi", self.chi.len(), n),
            ("phi", self.phi.len(), n),
            ("momentum (faces)", self.momentum.len(), n + 1),
        ] {
            if len != expected {
                return Err(Error::Dimension {
                    what,
                    expected,
                    got: len,
                });
            }
        }
        for (species, r) in self.rho.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Dimension {
                    what: "species field length",
                    expected: n,
                    got: r.len(),
                });
            }
            if let Some(&value) = r.iter().find(|&&v| !(v > 0.0)) {
                return Err(Error::NonpositiveDensity { species, value });
            }
        }
        Ok(())
    }
}

fn face_velocity(momentum: &[f64], rho: &[f64]) -> Vec<f64> {
    let n = rho.len();
    let mut v = vec![0.0; n + 1];
    for f in 1..n {
        v[f] = momentum[f] / (0.5 * (rho[f - 1] + rho[f]));
    }
    v
}

/// A density value that fell below the floor and was clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorEvent {
    pub time: f64,
    pub species: usize,
    pub cell: usize,
    pub value: f64,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub step: usize,
    pub dt: f64,
    pub time: f64,
    pub floor_events: usize,
}

/// Cell-level thermodynamic quantities at one state.
#[derive(Debug, Clone)]
pub(crate) struct CellThermo {
    /// `mu[α][cell]`
    pub mu: Vec<Vec<f64>>,
    pub d_rho_f_dchi: Vec<f64>,
}

pub(crate) fn cell_thermo(model: &Model, rho: &[Vec<f64>], chi: &[f64]) -> Result<CellThermo> {
    let n = chi.len();
    let nsp = model.n_species();
    let mut mu = vec![vec![0.0; n]; nsp];
    let mut d_chi = vec![0.0; n];
    let mut local = vec![0.0; nsp];
    let mut local_mu = vec![0.0; nsp];
    for i in 0..n {
        for (a, r) in rho.iter().enumerate() {
            local[a] = r[i];
        }
        model.thermo.chemical_potentials_into(&local, chi[i], &mut local_mu)?;
        for a in 0..nsp {
            mu[a][i] = local_mu[a];
        }
        d_chi[i] = model.thermo.d_rho_f_dchi(&local, chi[i])?;
    }
    Ok(CellThermo {
        mu,
        d_rho_f_dchi: d_chi,
    })
}

/// Cell average of the squared face gradients of `χ` (zero on the walls).
pub(crate) fn chi_gradient_sq(grid: &Grid, chi: &[f64]) -> Vec<f64> {
    let n = chi.len();
    let h = grid.dx();
    let face = |f: usize| {
        if f == 0 || f == n {
            0.0
        } else {
            let g = (chi[f] - chi[f - 1]) / h;
            g * g
        }
    };
    (0..n).map(|i| 0.5 * (face(i) + face(i + 1))).collect()
}

/// `Δχ` with homogeneous Neumann ends.
pub(crate) fn chi_laplacian(grid: &Grid, chi: &[f64]) -> Vec<f64> {
    let n = chi.len();
    let h2 = grid.dx() * grid.dx();
    (0..n)
        .map(|i| {
            let left = if i == 0 { 0.0 } else { chi[i - 1] - chi[i] };
            let right = if i + 1 == n { 0.0 } else { chi[i + 1] - chi[i] };
            (left + right) / h2
        })
        .collect()
}

/// Phase-field chemical potential in energy units,
/// `μ_χ = W′/M_W² − γδ²Δχ/M_W² + ∂ρf/∂χ/M_ρf² − ε̄ (ε₀/2) s′ |∇φ|²`.
pub(crate) fn phase_potential(model: &Model, chi: &[f64], d_rho_f_dchi: &[f64], phi_grad_sq: &[f64]) -> Vec<f64> {
    let reg = &model.regime;
    let gamma = model.thermo.double_well.gamma;
    let eps0 = model.thermo.susceptibility.vacuum_permittivity;
    let lap = chi_laplacian(&model.grid, chi);
    let d2 = reg.delta * reg.delta;
    (0..chi.len())
        .map(|i| {
            let dw = double_well_eval(chi[i]).dw;
            let (_, ds) = model.thermo.susceptibility(chi[i]);
            (dw - gamma * d2 * lap[i]) / reg.mach_w_sq() + d_rho_f_dchi[i] / reg.mach_rhof_sq()
                - reg.electric_scale() * 0.5 * eps0 * ds * phi_grad_sq[i]
        })
        .collect()
}

/// Cell average of squared face gradients of `φ`.
pub(crate) fn cell_average_sq(face: &[f64]) -> Vec<f64> {
    face.windows(2).map(|w| 0.5 * (w[0] * w[0] + w[1] * w[1])).collect()
}

/// The time integrator: model, current state and scratch.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub model: Model,
    pub state: SimState,
    pub config: StepConfig,
    pub floor_events: Vec<FloorEvent>,
    steps: usize,
}

impl Simulation {
    pub fn new(model: Model, mut state: SimState, config: StepConfig) -> Result<Self> {
        config.validate()?;
        state.validate(&model)?;
        state.momentum[0] = 0.0;
        let n = state.momentum.len() - 1;
        state.momentum[n] = 0.0;
        state.phi = model.solve_potential(&state.rho, &state.chi)?;
        Ok(Self {
            model,
            state,
            config,
            floor_events: Vec::new(),
            steps: 0,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Stable step size for the current state.
    pub fn stable_dt(&self) -> Result<f64> {
        let model = &self.model;
        let st = &self.state;
        let h = model.grid.dx();
        let cfl = self.config.cfl;
        let rho = st.total_density();
        let u = st.cell_velocity();
        let mut wave = 0.0f64;
        let mut diffusivity = 0.0f64;
        let mobility_norm = model.mobility.norm_inf();
        let nsp = model.n_species();
        for i in 0..st.cells() {
            let local = st.cell_densities(i);
            let c2 = model.thermo.sound_speed_squared(&local, st.chi[i])?;
            wave = wave.max(u[i].abs() + c2.sqrt());
            if mobility_norm > 0.0 {
                let jac = model.thermo.chemical_potential_jacobian(&local, st.chi[i])?;
                let row_max = (0..nsp)
                    .map(|a| (0..nsp).map(|b| jac[a * nsp + b].abs()).sum::<f64>())
                    .fold(0.0, f64::max);
                diffusivity = diffusivity.max(2.0 * mobility_norm * row_max);
            }
        }
        let mut dt = self.config.max_dt;
        if wave > 0.0 {
            dt = dt.min(cfl * h / wave);
        }
        if diffusivity > 0.0 {
            dt = dt.min(cfl * h * h / (2.0 * diffusivity));
        }
        let rho_min = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let nu = model.regime.inv_reynolds() * model.regime.longitudinal_viscosity() / rho_min;
        if nu > 0.0 {
            dt = dt.min(cfl * h * h / (2.0 * nu));
        }
        // charge relaxation of the explicit electromigration
        let e0 = model.thermo.elementary_charge;
        let q_last = model.thermo.species[nsp - 1].specific_charge();
        let dq_max = model.thermo.species[..nsp - 1]
            .iter()
            .map(|s| (s.specific_charge() - q_last).abs())
            .fold(0.0, f64::max);
        let conductivity = e0 * e0 * mobility_norm * dq_max * dq_max * (nsp - 1) as f64;
        if conductivity > 0.0 {
            let perm_min = model.permittivity(&st.chi).into_iter().fold(f64::INFINITY, f64::min);
            dt = dt.min(cfl * perm_min / conductivity);
        }
        Ok(dt)
    }

    /// Advances one step with the given `dt`.
    pub fn step_with(&mut self, dt: f64) -> Result<StepInfo> {
        if !(dt >= 1e-12) {
            return Err(Error::TimeStepUnderflow {
                dt,
                time: self.state.time,
            });
        }
        let model = &self.model;
        let grid = &model.grid;
        let n = grid.cells();
        let h = grid.dx();
        let nsp = model.n_species();
        let reg = &model.regime;
        let gamma = model.thermo.double_well.gamma;
        let tau = model.thermo.double_well.tau;
        let eps0 = model.thermo.susceptibility.vacuum_permittivity;
        let st = &mut self.state;

        // (1) quasi-static potential
        st.phi = model.solve_potential(&st.rho, &st.chi)?;
        let phi_face_grad = model.potential_face_gradient(&st.phi);
        let phi_grad_sq = cell_average_sq(&phi_face_grad);

        // (2) Allen–Cahn
        let rho_tot = st.total_density();
        let thermo_old = cell_thermo(model, &st.rho, &st.chi)?;
        let v_face = face_velocity(&st.momentum, &rho_tot);
        let s_stab = self.config.stabilization;
        let d2 = reg.delta * reg.delta;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let k = gamma * d2 / (h * h);
        for i in 0..n {
            let rate = reg.tau_bar() * tau / rho_tot[i];
            let chi = st.chi[i];
            let dw = double_well_eval(chi).dw;
            let (_, ds) = model.thermo.susceptibility(chi);
            let explicit = dw + reg.mach_w_sq() / reg.mach_rhof_sq() * thermo_old.d_rho_f_dchi[i]
                - reg.electric_scale() * reg.mach_w_sq() * 0.5 * eps0 * ds * phi_grad_sq[i];
            let u = 0.5 * (v_face[i] + v_face[i + 1]);
            let adv = if u > 0.0 {
                if i > 0 {
                    u * (chi - st.chi[i - 1]) / h
                } else {
                    0.0
                }
            } else if i + 1 < n {
                u * (st.chi[i + 1] - chi) / h
            } else {
                0.0
            };
            rhs[i] = chi - dt * adv - dt * rate * (explicit - s_stab * chi);
            diag[i] = 1.0 + dt * rate * s_stab;
            if i > 0 {
                lower[i] = -dt * rate * k;
                diag[i] += dt * rate * k;
            }
            if i + 1 < n {
                upper[i] = -dt * rate * k;
                diag[i] += dt * rate * k;
            }
        }
        let chi_new = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        let bound = 1.0 + self.config.overshoot_bound;
        if let Some(c) = chi_new.iter().find(|c| c.abs() > bound || !c.is_finite()) {
            return Err(Error::PhaseFieldOvershoot {
                overshoot: c.abs() - 1.0,
                time: st.time,
            });
        }
        st.chi = chi_new;

        // (3) species densities
        let thermo_mid = cell_thermo(model, &st.rho, &st.chi)?;
        let e0 = model.thermo.elementary_charge;
        let q: Vec<f64> = model.thermo.species.iter().map(|s| s.specific_charge()).collect();
        let dim = nsp - 1;
        let mut species_flux = vec![vec![0.0; n + 1]; nsp];
        let mut total_flux = vec![0.0; n + 1];
        let mut drive = vec![0.0; dim];
        for f in 1..n {
            let (l, r) = (f - 1, f);
            let vf = v_face[f];
            let up = if vf >= 0.0 { l } else { r };
            total_flux[f] = vf * rho_tot[up];
            for b in 0..dim {
                let dmu = (thermo_mid.mu[b][r] - thermo_mid.mu[nsp - 1][r])
                    - (thermo_mid.mu[b][l] - thermo_mid.mu[nsp - 1][l]);
                drive[b] = (dmu + e0 * (q[b] - q[nsp - 1]) * (st.phi[r] - st.phi[l])) / h;
            }
            for a in 0..dim {
                let mut j = 0.0;
                for b in 0..dim {
                    j -= model.mobility.get(a, b) * drive[b];
                }
                species_flux[a][f] = vf * st.rho[a][up] + j;
            }
        }
        let mut production = vec![vec![0.0; n]; nsp];
        if !model.reactions.is_empty() {
            let mut mu_local = vec![0.0; nsp];
            let mut r_local = vec![0.0; nsp];
            for i in 0..n {
                for a in 0..nsp {
                    mu_local[a] = thermo_mid.mu[a][i];
                }
                model.reactions.mass_production_from_mu(&mu_local, &mut r_local)?;
                for a in 0..nsp {
                    production[a][i] = r_local[a];
                }
            }
        }
        let mut new_total = vec![0.0; n];
        for i in 0..n {
            new_total[i] = rho_tot[i] - dt / h * (total_flux[i + 1] - total_flux[i]);
        }
        let floor = self.config.density_floor;
        let mut events = 0;
        for a in 0..dim {
            for i in 0..n {
                let value =
                    st.rho[a][i] - dt / h * (species_flux[a][i + 1] - species_flux[a][i]) + dt * production[a][i];
                st.rho[a][i] = value;
            }
        }
        for i in 0..n {
            let partial: f64 = (0..dim).map(|a| st.rho[a][i]).sum();
            st.rho[nsp - 1][i] = new_total[i] - partial;
        }
        for (a, r) in st.rho.iter_mut().enumerate() {
            for (i, value) in r.iter_mut().enumerate() {
                if !(*value >= floor) {
                    self.floor_events.push(FloorEvent {
                        time: st.time,
                        species: a,
                        cell: i,
                        value: *value,
                    });
                    *value = floor;
                    events += 1;
                }
            }
        }

        // (4) momentum on interior faces
        let rho_new = st.total_density();
        let thermo_new = cell_thermo(model, &st.rho, &st.chi)?;
        let mu_chi = phase_potential(model, &st.chi, &thermo_new.d_rho_f_dchi, &vec![0.0; n]);
        let perm = model.permittivity(&st.chi);
        let viscosity = reg.inv_reynolds() * reg.longitudinal_viscosity();
        let mut stress = vec![0.0; n];
        for i in 0..n {
            let dv = (v_face[i + 1] - v_face[i]) / h;
            stress[i] = viscosity * dv + 0.5 * perm[i] * phi_grad_sq[i];
        }
        let mut force = vec![0.0; n + 1];
        for f in 1..n {
            let (l, r) = (f - 1, f);
            let mut value = 0.5 * (mu_chi[l] + mu_chi[r]) * (st.chi[r] - st.chi[l]);
            for a in 0..nsp {
                value -= 0.5 * (st.rho[a][l] + st.rho[a][r]) * (thermo_new.mu[a][r] - thermo_new.mu[a][l])
                    / reg.mach_rhof_sq();
            }
            force[f] = value / h;
        }
        let mut conv = vec![0.0; n];
        for i in 0..n {
            let u = 0.5 * (v_face[i] + v_face[i + 1]);
            let m_up = if u >= 0.0 { st.momentum[i] } else { st.momentum[i + 1] };
            conv[i] = u * m_up;
        }
        let mut momentum_new = vec![0.0; n + 1];
        for f in 1..n {
            momentum_new[f] = st.momentum[f] - dt / h * (conv[f] - conv[f - 1])
                + dt / h * (stress[f] - stress[f - 1])
                + dt * force[f];
        }
        st.momentum = momentum_new;
        if st.momentum.iter().any(|m| !m.is_finite()) || rho_new.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite { time: st.time });
        }

        st.time += dt;
        self.steps += 1;
        Ok(StepInfo {
            step: self.steps,
            dt,
            time: st.time,
            floor_events: events,
        })
    }

    /// Advances one step of stable size, clipped to `t_stop`.
    pub fn step_until(&mut self, t_stop: f64) -> Result<StepInfo> {
        let mut dt = self.stable_dt()?;
        let remaining = t_stop - self.state.time;
        if remaining < dt {
            dt = remaining;
        }
        self.step_with(dt)
    }

    /// Runs to the configured end time, calling `observer` after every step.
    pub fn run(&mut self, mut observer: impl FnMut(&Simulation, &StepInfo)) -> std::result::Result<(), RunError> {
        let end = self.config.end_time;
        while self.state.time < end * (1.0 - 1e-14) {
            match self.step_until(end) {
                Ok(info) => observer(self, &info),
                Err(error) => {
                    return Err(RunError {
                        error,
                        state: Box::new(self.state.clone()),
                    })
                }
            }
        }
        Ok(())
    }
}

/// A failed run: the error and the last valid state.
#[derive(Debug)]
pub struct RunError {
    pub error: Error,
    pub state: Box<SimState>,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (t = {})", self.error, self.state.time)
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}
