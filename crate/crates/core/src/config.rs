//! Run configuration: a preset supplies every default, a TOML file with
//! flat dotted keys (`section.key = value`) overrides them. All quantities
//! are nondimensional.
//!
//! ```toml
//! preset = "planar-interface-neutral"
//! double_well.gamma = 1.0
//! regime.delta = 0.05
//! time.end = 0.2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evolution::{Regime, StepConfig};
use crate::grid::Boundary;
use crate::presets::Preset;
use crate::sharp::{FluxDenominator, InnerSolverOptions, StudyOptions};
use crate::thermo::PhaseEnergyParams;

/// How the mobility matrix is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum MobilitySpec {
    Direct(Vec<Vec<f64>>),
    Factors { b: Vec<Vec<f64>>, weights: Vec<f64> },
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub preset: Preset,
    pub species_mass: Vec<f64>,
    pub species_charge: Vec<i32>,
    pub species_psi_ref: Vec<f64>,
    pub phase: PhaseEnergyParams,
    pub gamma: f64,
    pub tau: f64,
    pub susceptibility_liquid: f64,
    pub susceptibility_vapor: f64,
    pub eps0: f64,
    pub e0: f64,
    pub reaction_forward: Vec<Vec<u32>>,
    pub reaction_backward: Vec<Vec<u32>>,
    pub reaction_rate: Vec<f64>,
    pub mobility: MobilitySpec,
    pub delta: f64,
    pub regime: Regime,
    pub lambda: f64,
    pub eta: f64,
    /// Explicit cell count; 0 derives it from `cells_per_delta`.
    pub cells: usize,
    pub cells_per_delta: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub electric_lo: Boundary,
    pub electric_hi: Boundary,
    pub time: StepConfig,
    pub interface_position: f64,
    pub rho_vapor: Vec<f64>,
    pub rho_liquid: Vec<f64>,
    /// Amplitudes `A_α` of the perturbation `A_α cos(π(x − x_lo)/(x_hi − x_lo))`
    /// added to both phases.
    pub rho_cosine: Vec<f64>,
    pub split_constant: f64,
    pub study: StudyOptions,
    pub inner_j0: f64,
}

type Setter = fn(&mut Config, &str, &toml::Value) -> Result<()>;

fn as_f64(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::config(key, "must be a number")),
    }
}

fn as_usize(key: &str, v: &toml::Value) -> Result<usize> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(Error::config(key, "must be a nonnegative integer")),
    }
}

fn as_str<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::config(key, "must be a string"))
}

fn as_array<'a>(key: &str, v: &'a toml::Value) -> Result<&'a Vec<toml::Value>> {
    v.as_array().ok_or_else(|| Error::config(key, "must be an array"))
}

fn as_f64_list(key: &str, v: &toml::Value) -> Result<Vec<f64>> {
    as_array(key, v)?.iter().map(|x| as_f64(key, x)).collect()
}

fn as_i32_list(key: &str, v: &toml::Value) -> Result<Vec<i32>> {
    as_array(key, v)?
        .iter()
        .map(|x| match x {
            toml::Value::Integer(i) => i32::try_from(*i).map_err(|_| Error::config(key, "out of range")),
            _ => Err(Error::config(key, "must contain integers")),
        })
        .collect()
}

fn as_u32_matrix(key: &str, v: &toml::Value) -> Result<Vec<Vec<u32>>> {
    as_array(key, v)?
        .iter()
        .map(|row| {
            as_array(key, row)?
                .iter()
                .map(|x| match x {
                    toml::Value::Integer(i) => {
                        u32::try_from(*i).map_err(|_| Error::config(key, "must contain nonnegative integers"))
                    }
                    _ => Err(Error::config(key, "must contain nonnegative integers")),
                })
                .collect()
        })
        .collect()
}

fn as_f64_matrix(key: &str, v: &toml::Value) -> Result<Vec<Vec<f64>>> {
    as_array(key, v)?.iter().map(|row| as_f64_list(key, row)).collect()
}

fn boundary_kind(key: &str, kind: &str, value: f64) -> Result<Boundary> {
    match kind {
        "dirichlet" => Ok(Boundary::Dirichlet(value)),
        "neumann" => Ok(Boundary::Neumann(value)),
        "noflux" => Ok(Boundary::NoFlux),
        _ => Err(Error::config(key, "must be one of dirichlet, neumann, noflux")),
    }
}

fn boundary_value(b: Boundary) -> f64 {
    match b {
        Boundary::Dirichlet(v) | Boundary::Neumann(v) => v,
        Boundary::NoFlux => 0.0,
    }
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Dirichlet(_) => "dirichlet",
        Boundary::Neumann(_) => "neumann",
        Boundary::NoFlux => "noflux",
    }
}

fn with_value(b: Boundary, value: f64) -> Boundary {
    match b {
        Boundary::Dirichlet(_) => Boundary::Dirichlet(value),
        Boundary::Neumann(_) => Boundary::Neumann(value),
        Boundary::NoFlux => Boundary::NoFlux,
    }
}

fn setters() -> Vec<(&'static str, Setter)> {
    vec![
        ("species.mass", |c, k, v| {
            c.species_mass = as_f64_list(k, v)?;
            Ok(())
        }),
        ("species.charge", |c, k, v| {
            c.species_charge = as_i32_list(k, v)?;
            Ok(())
        }),
        ("species.psi_ref", |c, k, v| {
            c.species_psi_ref = as_f64_list(k, v)?;
            Ok(())
        }),
        ("phase.k_liquid", |c, k, v| {
            c.phase.bulk_modulus_liquid = as_f64(k, v)?;
            Ok(())
        }),
        ("phase.k_vapor", |c, k, v| {
            c.phase.bulk_modulus_vapor = as_f64(k, v)?;
            Ok(())
        }),
        ("phase.n_ref", |c, k, v| {
            c.phase.reference_number_density = as_f64(k, v)?;
            Ok(())
        }),
        ("phase.p_ref", |c, k, v| {
            c.phase.reference_pressure = as_f64(k, v)?;
            Ok(())
        }),
        ("phase.kt", |c, k, v| {
            c.phase.thermal_energy = as_f64(k, v)?;
            Ok(())
        }),
        ("double_well.gamma", |c, k, v| {
            c.gamma = as_f64(k, v)?;
            Ok(())
        }),
        ("double_well.tau", |c, k, v| {
            c.tau = as_f64(k, v)?;
            Ok(())
        }),
        ("susceptibility.liquid", |c, k, v| {
            c.susceptibility_liquid = as_f64(k, v)?;
            Ok(())
        }),
        ("susceptibility.vapor", |c, k, v| {
            c.susceptibility_vapor = as_f64(k, v)?;
            Ok(())
        }),
        ("susceptibility.eps0", |c, k, v| {
            c.eps0 = as_f64(k, v)?;
            Ok(())
        }),
        ("charge.e0", |c, k, v| {
            c.e0 = as_f64(k, v)?;
            Ok(())
        }),
        ("reactions.forward", |c, k, v| {
            c.reaction_forward = as_u32_matrix(k, v)?;
            Ok(())
        }),
        ("reactions.backward", |c, k, v| {
            c.reaction_backward = as_u32_matrix(k, v)?;
            Ok(())
        }),
        ("reactions.rate", |c, k, v| {
            c.reaction_rate = as_f64_list(k, v)?;
            Ok(())
        }),
        ("mobility.direct", |c, k, v| {
            c.mobility = MobilitySpec::Direct(as_f64_matrix(k, v)?);
            Ok(())
        }),
        ("mobility.factors", |c, k, v| {
            let b = as_f64_matrix(k, v)?;
            let weights = match &c.mobility {
                MobilitySpec::Factors { weights, .. } => weights.clone(),
                MobilitySpec::Direct(_) => vec![1.0; b.len()],
            };
            c.mobility = MobilitySpec::Factors { b, weights };
            Ok(())
        }),
        ("mobility.weights", |c, k, v| {
            let weights = as_f64_list(k, v)?;
            let b = match &c.mobility {
                MobilitySpec::Factors { b, .. } => b.clone(),
                MobilitySpec::Direct(_) => (0..weights.len())
                    .map(|i| (0..weights.len()).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect(),
            };
            c.mobility = MobilitySpec::Factors { b, weights };
            Ok(())
        }),
        ("regime.delta", |c, k, v| {
            c.delta = as_f64(k, v)?;
            Ok(())
        }),
        ("regime.kind", |c, k, v| {
            c.regime = match as_str(k, v)? {
                "uncoupled" => Regime::Uncoupled,
                "coupled" => Regime::Coupled,
                _ => return Err(Error::config(k, "must be uncoupled or coupled")),
            };
            Ok(())
        }),
        ("regime.lambda", |c, k, v| {
            c.lambda = as_f64(k, v)?;
            Ok(())
        }),
        ("regime.eta", |c, k, v| {
            c.eta = as_f64(k, v)?;
            Ok(())
        }),
        ("grid.cells", |c, k, v| {
            c.cells = as_usize(k, v)?;
            Ok(())
        }),
        ("grid.cells_per_delta", |c, k, v| {
            c.cells_per_delta = as_f64(k, v)?;
            Ok(())
        }),
        ("grid.x_lo", |c, k, v| {
            c.x_lo = as_f64(k, v)?;
            Ok(())
        }),
        ("grid.x_hi", |c, k, v| {
            c.x_hi = as_f64(k, v)?;
            Ok(())
        }),
        ("electric.lo", |c, k, v| {
            c.electric_lo = boundary_kind(k, as_str(k, v)?, boundary_value(c.electric_lo))?;
            Ok(())
        }),
        ("electric.hi", |c, k, v| {
            c.electric_hi = boundary_kind(k, as_str(k, v)?, boundary_value(c.electric_hi))?;
            Ok(())
        }),
        ("electric.lo_value", |c, k, v| {
            c.electric_lo = with_value(c.electric_lo, as_f64(k, v)?);
            Ok(())
        }),
        ("electric.hi_value", |c, k, v| {
            c.electric_hi = with_value(c.electric_hi, as_f64(k, v)?);
            Ok(())
        }),
        ("time.cfl", |c, k, v| {
            c.time.cfl = as_f64(k, v)?;
            Ok(())
        }),
        ("time.max_dt", |c, k, v| {
            c.time.max_dt = as_f64(k, v)?;
            Ok(())
        }),
        ("time.end", |c, k, v| {
            c.time.end_time = as_f64(k, v)?;
            Ok(())
        }),
        ("time.output_every", |c, k, v| {
            c.time.output_every = as_usize(k, v)?;
            Ok(())
        }),
        ("time.density_floor", |c, k, v| {
            c.time.density_floor = as_f64(k, v)?;
            Ok(())
        }),
        ("time.overshoot_bound", |c, k, v| {
            c.time.overshoot_bound = as_f64(k, v)?;
            Ok(())
        }),
        ("time.stabilization", |c, k, v| {
            c.time.stabilization = as_f64(k, v)?;
            Ok(())
        }),
        ("initial.interface", |c, k, v| {
            c.interface_position = as_f64(k, v)?;
            Ok(())
        }),
        ("initial.rho_vapor", |c, k, v| {
            c.rho_vapor = as_f64_list(k, v)?;
            Ok(())
        }),
        ("initial.rho_liquid", |c, k, v| {
            c.rho_liquid = as_f64_list(k, v)?;
            Ok(())
        }),
        ("initial.rho_cosine", |c, k, v| {
            c.rho_cosine = as_f64_list(k, v)?;
            Ok(())
        }),
        ("energy.split_constant", |c, k, v| {
            c.split_constant = as_f64(k, v)?;
            Ok(())
        }),
        ("study.deltas", |c, k, v| {
            c.study.deltas = as_f64_list(k, v)?;
            Ok(())
        }),
        ("study.extraction", |c, k, v| {
            c.study.extraction = as_f64(k, v)?;
            Ok(())
        }),
        ("study.sensitivity", |c, k, v| {
            c.study.sensitivity = as_f64_list(k, v)?;
            Ok(())
        }),
        ("study.speed_window", |c, k, v| {
            c.study.speed_window = as_f64(k, v)?;
            Ok(())
        }),
        ("inner.nodes", |c, k, v| {
            c.study.inner.nodes = as_usize(k, v)?;
            Ok(())
        }),
        ("inner.denominator", |c, k, v| {
            c.study.inner.denominator = match as_str(k, v)? {
                "squared-sum" => FluxDenominator::SquaredSum,
                "sum-of-squares" => FluxDenominator::SumOfSquares,
                _ => return Err(Error::config(k, "must be squared-sum or sum-of-squares")),
            };
            Ok(())
        }),
        ("inner.j0", |c, k, v| {
            c.inner_j0 = as_f64(k, v)?;
            Ok(())
        }),
    ]
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

impl Config {
    /// Defaults of a preset.
    pub fn for_preset(preset: Preset) -> Self {
        crate::presets::defaults(preset)
    }

    /// Parses configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("config", format!("is not valid TOML: {}", e.message())))?;
        let mut flat = BTreeMap::new();
        flatten("", &table, &mut flat);
        let preset = match flat.remove("preset") {
            Some(v) => Preset::from_name(as_str("preset", &v)?)
                .ok_or_else(|| Error::config("preset", format!("must be one of {}", Preset::names().join(", "))))?,
            None => Preset::UniformEquilibrium,
        };
        let mut config = Self::for_preset(preset);
        let table = setters();
        let mut keys: Vec<&String> = flat.keys().collect();
        keys.sort_by_key(|k| k.ends_with("_value") || k.as_str() == "mobility.weights");
        for key in keys {
            let setter = table
                .iter()
                .find(|(name, _)| name == key)
                .map(|(_, s)| *s)
                .ok_or_else(|| Error::config(key.clone(), "is not a recognised key"))?;
            setter(&mut config, key, &flat[key])?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn n_species(&self) -> usize {
        self.species_mass.len()
    }

    /// Cell count for interface width `delta`.
    pub fn cells_for(&self, delta: f64) -> usize {
        if self.cells > 0 {
            self.cells
        } else {
            ((self.x_hi - self.x_lo) * self.cells_per_delta / delta).round() as usize
        }
    }

    /// Checks the constraints that are not enforced by the model constructors.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_species();
        if n == 0 {
            return Err(Error::config("species.mass", "must list at least one species"));
        }
        for (key, len) in [
            ("species.charge", self.species_charge.len()),
            ("species.psi_ref", self.species_psi_ref.len()),
            ("initial.rho_vapor", self.rho_vapor.len()),
            ("initial.rho_liquid", self.rho_liquid.len()),
        ] {
            if len != n {
                return Err(Error::config(key, format!("must have {n} entries")));
            }
        }
        if !self.rho_cosine.is_empty() && self.rho_cosine.len() != n {
            return Err(Error::config("initial.rho_cosine", format!("must have {n} entries")));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::config("double_well.gamma", "must be > 0"));
        }
        if !(self.tau > 0.0) {
            return Err(Error::config("double_well.tau", "must be > 0"));
        }
        for (key, rho) in [
            ("initial.rho_vapor", &self.rho_vapor),
            ("initial.rho_liquid", &self.rho_liquid),
        ] {
            if rho.iter().any(|r| !(*r > 0.0)) {
                return Err(Error::config(key, "must be > 0"));
            }
        }
        let nr = self.reaction_rate.len();
        if self.reaction_forward.len() != nr || self.reaction_backward.len() != nr {
            return Err(Error::config(
                "reactions.forward",
                "reactions.forward, reactions.backward and reactions.rate must have equal lengths",
            ));
        }
        if !(self.x_hi > self.x_lo) {
            return Err(Error::config("grid.x_hi", "must be > grid.x_lo"));
        }
        if self.cells == 0 && !(self.cells_per_delta > 0.0) {
            return Err(Error::config("grid.cells_per_delta", "must be > 0"));
        }
        if !(self.split_constant >= 0.0) {
            return Err(Error::config("energy.split_constant", "must be >= 0"));
        }
        if self.study.inner.nodes < 7 || self.study.inner.nodes.is_multiple_of(2) {
            return Err(Error::config("inner.nodes", "must be odd and >= 7"));
        }
        self.time.validate()?;
        self.study.validate()?;
        Ok(())
    }

    pub fn inner_options(&self) -> InnerSolverOptions {
        self.study.inner.clone()
    }

    /// Echo of every resolved key in the input syntax.
    pub fn to_toml(&self) -> String {
        fn list<T: std::fmt::Display>(v: &[T]) -> String {
            let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("[{}]", items.join(", "))
        }
        fn float_list(v: &[f64]) -> String {
            let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            format!("[{}]", items.join(", "))
        }
        fn matrix<T: std::fmt::Display>(m: &[Vec<T>]) -> String {
            let rows: Vec<String> = m.iter().map(|r| list(r)).collect();
            format!("[{}]", rows.join(", "))
        }
        fn float_matrix(m: &[Vec<f64>]) -> String {
            let rows: Vec<String> = m.iter().map(|r| float_list(r)).collect();
            format!("[{}]", rows.join(", "))
        }
        let mut s = String::from("# all quantities nondimensional\n");
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("preset", format!("{:?}", self.preset.name()));
        line("species.mass", float_list(&self.species_mass));
        line("species.charge", list(&self.species_charge));
        line("species.psi_ref", float_list(&self.species_psi_ref));
        line("phase.k_liquid", format!("{:?}", self.phase.bulk_modulus_liquid));
        line("phase.k_vapor", format!("{:?}", self.phase.bulk_modulus_vapor));
        line("phase.n_ref", format!("{:?}", self.phase.reference_number_density));
        line("phase.p_ref", format!("{:?}", self.phase.reference_pressure));
        line("phase.kt", format!("{:?}", self.phase.thermal_energy));
        line("double_well.gamma", format!("{:?}", self.gamma));
        line("double_well.tau", format!("{:?}", self.tau));
        line("susceptibility.liquid", format!("{:?}", self.susceptibility_liquid));
        line("susceptibility.vapor", format!("{:?}", self.susceptibility_vapor));
        line("susceptibility.eps0", format!("{:?}", self.eps0));
        line("charge.e0", format!("{:?}", self.e0));
        line("reactions.forward", matrix(&self.reaction_forward));
        line("reactions.backward", matrix(&self.reaction_backward));
        line("reactions.rate", float_list(&self.reaction_rate));
        match &self.mobility {
            MobilitySpec::Direct(m) => line("mobility.direct", float_matrix(m)),
            MobilitySpec::Factors { b, weights } => {
                line("mobility.factors", float_matrix(b));
                line("mobility.weights", float_list(weights));
            }
        }
        line("regime.delta", format!("{:?}", self.delta));
        line("regime.kind", format!("{:?}", self.regime.name()));
        line("regime.lambda", format!("{:?}", self.lambda));
        line("regime.eta", format!("{:?}", self.eta));
        line("grid.cells", self.cells.to_string());
        line("grid.cells_per_delta", format!("{:?}", self.cells_per_delta));
        line("grid.x_lo", format!("{:?}", self.x_lo));
        line("grid.x_hi", format!("{:?}", self.x_hi));
        line("electric.lo", format!("{:?}", boundary_name(self.electric_lo)));
        line("electric.lo_value", format!("{:?}", boundary_value(self.electric_lo)));
        line("electric.hi", format!("{:?}", boundary_name(self.electric_hi)));
        line("electric.hi_value", format!("{:?}", boundary_value(self.electric_hi)));
        line("time.cfl", format!("{:?}", self.time.cfl));
        line("time.max_dt", format!("{:?}", self.time.max_dt));
        line("time.end", format!("{:?}", self.time.end_time));
        line("time.output_every", self.time.output_every.to_string());
        line("time.density_floor", format!("{:?}", self.time.density_floor));
        line("time.overshoot_bound", format!("{:?}", self.time.overshoot_bound));
        line("time.stabilization", format!("{:?}", self.time.stabilization));
        line("initial.interface", format!("{:?}", self.interface_position));
        line("initial.rho_vapor", float_list(&self.rho_vapor));
        line("initial.rho_liquid", float_list(&self.rho_liquid));
        line("initial.rho_cosine", float_list(&self.rho_cosine));
        line("energy.split_constant", format!("{:?}", self.split_constant));
        line("study.deltas", float_list(&self.study.deltas));
        line("study.extraction", format!("{:?}", self.study.extraction));
        line("study.sensitivity", float_list(&self.study.sensitivity));
        line("study.speed_window", format!("{:?}", self.study.speed_window));
        line("inner.nodes", self.study.inner.nodes.to_string());
        line(
            "inner.denominator",
            format!("{:?}", self.study.inner.denominator.name()),
        );
        line("inner.j0", format!("{:?}", self.inner_j0));
        s
    }
}
