//! Built-in scenarios and the construction of models and initial states
//! from a [`Config`].

use crate::config::{Config, MobilitySpec};
use crate::error::Result;
use crate::evolution::{Model, Regime, RegimeParams, SimState, Simulation, StepConfig};
use crate::grid::{Boundary, Grid};
use crate::reactions::{Reaction, ReactionNetwork};
use crate::sharp::{InnerSolverOptions, StudyOptions};
use crate::thermo::{DoubleWell, MixtureThermo, PhaseEnergyParams, SpeciesSpec, Susceptibility};
use crate::transport::MobilityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Quiescent single-phase liquid at the reference density.
    UniformEquilibrium,
    /// Two neutral species of equal mass; vapor on the left, liquid on the
    /// right, with a long-wave composition perturbation that relaxes by
    /// diffusion across the interface.
    PlanarInterfaceNeutral,
    /// Cation, anion and neutral parent with the dissociation
    /// `A₃ ⇌ A₁ + A₂` in the coupled regime.
    PlanarInterfaceIons,
    /// Dielectric two-phase layer between fixed potentials; Poisson only.
    Capacitor,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::UniformEquilibrium,
        Preset::PlanarInterfaceNeutral,
        Preset::PlanarInterfaceIons,
        Preset::Capacitor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::UniformEquilibrium => "uniform-equilibrium",
            Preset::PlanarInterfaceNeutral => "planar-interface-neutral",
            Preset::PlanarInterfaceIons => "planar-interface-ions",
            Preset::Capacitor => "capacitor",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|p| p.name()).collect()
    }

    pub fn has_interface(self) -> bool {
        !matches!(self, Preset::UniformEquilibrium)
    }
}

fn base() -> Config {
    Config {
        preset: Preset::UniformEquilibrium,
        species_mass: vec![1.0, 2.0],
        species_charge: vec![0, 0],
        species_psi_ref: vec![0.0, 0.0],
        phase: PhaseEnergyParams {
            bulk_modulus_liquid: 4.0,
            bulk_modulus_vapor: 1.0,
            reference_number_density: 1.0,
            reference_pressure: 1.0,
            thermal_energy: 1.0,
        },
        gamma: 1.0,
        tau: 1.0,
        susceptibility_liquid: 4.0,
        susceptibility_vapor: 0.0,
        eps0: 1.0,
        e0: 1.0,
        reaction_forward: Vec::new(),
        reaction_backward: Vec::new(),
        reaction_rate: Vec::new(),
        mobility: MobilitySpec::Direct(vec![vec![0.05]]),
        delta: 0.1,
        regime: Regime::Uncoupled,
        lambda: 0.0,
        eta: 1.0,
        cells: 0,
        cells_per_delta: 10.0,
        x_lo: 0.0,
        x_hi: 1.0,
        electric_lo: Boundary::Dirichlet(0.0),
        electric_hi: Boundary::Dirichlet(0.0),
        time: StepConfig {
            end_time: 0.1,
            ..StepConfig::default()
        },
        interface_position: 0.5,
        rho_vapor: vec![0.5, 1.0],
        rho_liquid: vec![0.5, 1.0],
        rho_cosine: Vec::new(),
        split_constant: crate::energy::DEFAULT_SPLIT_CONSTANT,
        study: StudyOptions {
            inner: InnerSolverOptions::default(),
            ..StudyOptions::default()
        },
        inner_j0: 0.0,
    }
}

/// Default configuration of a preset.
pub fn defaults(preset: Preset) -> Config {
    let mut c = base();
    c.preset = preset;
    match preset {
        Preset::UniformEquilibrium => {
            c.cells = 64;
        }
        Preset::PlanarInterfaceNeutral => {
            c.x_hi = 2.0;
            c.interface_position = 1.0;
            c.species_mass = vec![1.0, 1.0];
            c.rho_vapor = vec![0.5, 0.5];
            c.rho_liquid = vec![0.5, 0.5];
            c.rho_cosine = vec![-0.2, 0.2];
            c.time.end_time = 0.25;
        }
        Preset::PlanarInterfaceIons => {
            c.species_mass = vec![1.0, 2.0, 3.0];
            c.species_charge = vec![1, -1, 0];
            c.species_psi_ref = vec![0.0, 0.0, 0.0];
            c.reaction_forward = vec![vec![0, 0, 1]];
            c.reaction_backward = vec![vec![1, 1, 0]];
            c.reaction_rate = vec![1.0];
            c.mobility = MobilitySpec::Direct(vec![vec![0.05, 0.0], vec![0.0, 0.02]]);
            c.regime = Regime::Coupled;
            c.delta = 0.05;
            c.x_hi = 3.0;
            c.interface_position = 1.5;
            // dissociation equilibrium x₁x₂ = x₃/e at n = n_R with x₁ = x₂
            let e = std::f64::consts::E;
            let x = ((1.0 + e).sqrt() - 1.0) / e;
            c.rho_vapor = vec![x, 2.0 * x, 3.0 * (1.0 - 2.0 * x)];
            c.rho_liquid = c.rho_vapor.clone();
            c.electric_hi = Boundary::Dirichlet(1.0);
            c.eps0 = 0.0025;
            c.lambda = 100.0;
            c.time.end_time = 0.1;
        }
        Preset::Capacitor => {
            c.species_mass = vec![1.0];
            c.species_charge = vec![0];
            c.species_psi_ref = vec![0.0];
            c.mobility = MobilitySpec::Direct(Vec::new());
            c.rho_vapor = vec![1.0];
            c.rho_liquid = vec![1.0];
            c.electric_hi = Boundary::Dirichlet(1.0);
            c.cells = 200;
            c.time.end_time = 0.0;
        }
    }
    c
}

/// Thermodynamic model of a configuration.
pub fn thermo(config: &Config) -> Result<MixtureThermo> {
    let species = config
        .species_mass
        .iter()
        .zip(&config.species_charge)
        .zip(&config.species_psi_ref)
        .map(|((&m, &z), &psi)| SpeciesSpec::new(m, z, psi))
        .collect();
    MixtureThermo::new(
        species,
        config.phase.clone(),
        DoubleWell {
            gamma: config.gamma,
            tau: config.tau,
        },
        Susceptibility {
            liquid: config.susceptibility_liquid,
            vapor: config.susceptibility_vapor,
            vacuum_permittivity: config.eps0,
        },
        config.e0,
    )
}

pub fn reactions(config: &Config, thermo: &MixtureThermo) -> Result<ReactionNetwork> {
    let list = config
        .reaction_forward
        .iter()
        .zip(&config.reaction_backward)
        .zip(&config.reaction_rate)
        .map(|((a, b), &k)| Reaction::new(a.clone(), b.clone(), k))
        .collect();
    ReactionNetwork::new(list, &thermo.species)
}

pub fn mobility(config: &Config) -> Result<MobilityMatrix> {
    match &config.mobility {
        MobilitySpec::Direct(m) => MobilityMatrix::from_direct(m),
        MobilitySpec::Factors { b, weights } => MobilityMatrix::from_factors(b, weights),
    }
}

/// Model for interface width `delta`.
pub fn model(config: &Config, delta: f64) -> Result<Model> {
    let thermo = thermo(config)?;
    let reactions = reactions(config, &thermo)?;
    let regime = RegimeParams::new(delta, config.regime, config.lambda, config.eta)?;
    let grid = Grid::new(config.cells_for(delta), config.x_lo, config.x_hi)?;
    Model::new(
        thermo,
        reactions,
        mobility(config)?,
        regime,
        grid,
        config.electric_lo,
        config.electric_hi,
    )
}

/// Initial state: a tanh phase profile of width `δ` centred at the
/// configured interface position, with densities blended by `(1+χ)/2`;
/// a uniform liquid for the equilibrium preset.
pub fn initial_state(config: &Config, model: &Model) -> SimState {
    let grid = &model.grid;
    let n = grid.cells();
    let delta = model.regime.delta;
    let k = (2.0 / config.gamma).sqrt();
    let chi: Vec<f64> = if config.preset.has_interface() {
        grid.centers()
            .iter()
            .map(|&x| (k * (x - config.interface_position) / delta).tanh())
            .collect()
    } else {
        vec![1.0; n]
    };
    let amplitude = |a: usize| config.rho_cosine.get(a).copied().unwrap_or(0.0);
    let length = config.x_hi - config.x_lo;
    let rho = (0..model.n_species())
        .map(|a| {
            chi.iter()
                .map(|&c| {
                    let w = 0.5 * (1.0 + c);
                    w * config.rho_liquid[a] + (1.0 - w) * config.rho_vapor[a]
                })
                .zip(grid.centers())
                .map(|(r, x)| r + amplitude(a) * (std::f64::consts::PI * (x - config.x_lo) / length).cos())
                .collect()
        })
        .collect();
    SimState {
        rho,
        momentum: vec![0.0; n + 1],
        chi,
        phi: vec![0.0; n],
        time: 0.0,
    }
}

/// Ready-to-run simulation for interface width `delta`.
pub fn simulation(config: &Config, delta: f64) -> Result<Simulation> {
    let model = model(config, delta)?;
    let state = initial_state(config, &model);
    Simulation::new(model, state, config.time.clone())
}
