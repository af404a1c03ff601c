//! C ABI for `pfe-core`.
//!
//! Objects are exposed as opaque handles created by `pfe_*_create_*` and
//! released by the matching `pfe_*_free`. Every fallible function returns a
//! [`PfeStatus`]; on failure a description is available from
//! [`pfe_last_error_message`] on the same thread. Panics never cross the
//! boundary and are reported as [`PfeStatus::Panic`].
//!
//! The generated header is `include/pfe.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pfe_core::config::Config;
use pfe_core::energy::{entropy_production, total_energy};
use pfe_core::evolution::Simulation;
use pfe_core::presets::{self, Preset};
use pfe_core::thermo::MixtureThermo;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfeStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range, mis-sized or not valid UTF-8.
    InvalidArgument = 2,
    /// The configuration or model parameters were rejected.
    ConfigError = 3,
    /// The computation failed (non-finite state, solver failure, ...).
    RuntimeError = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Thermodynamic model of a mixture.
pub struct PfeThermo {
    inner: MixtureThermo,
}

/// A running one-dimensional simulation.
pub struct PfeSimulation {
    inner: Simulation,
}

/// Free energy split by contribution, with the entropy production rate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PfeEnergy {
    pub double_well: f64,
    pub gradient: f64,
    pub bulk: f64,
    pub electric: f64,
    pub kinetic: f64,
    pub total: f64,
    pub boundary_work: f64,
    /// `total - boundary_work`; non-increasing in a closed box.
    pub available: f64,
    pub dissipation_viscous: f64,
    pub dissipation_diffusive: f64,
    pub dissipation_reactive: f64,
    pub dissipation_phase_field: f64,
    pub dissipation_total: f64,
}

/// Cell-centred field selector for [`pfe_simulation_copy_field`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfeField {
    /// Cell centres.
    Position = 0,
    /// Partial density of the species given by `species`.
    Density = 1,
    Velocity = 2,
    PhaseField = 3,
    Potential = 4,
    ChargeDensity = 5,
}

impl PfeField {
    fn from_raw(v: u32) -> Option<Self> {
        Some(match v {
            0 => Self::Position,
            1 => Self::Density,
            2 => Self::Velocity,
            3 => Self::PhaseField,
            4 => Self::Potential,
            5 => Self::ChargeDensity,
            _ => return None,
        })
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PfeStatus, String);

impl From<pfe_core::Error> for Failure {
    fn from(e: pfe_core::Error) -> Self {
        let status = if e.is_config() {
            PfeStatus::ConfigError
        } else {
            PfeStatus::RuntimeError
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PfeStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(PfeStatus::InvalidArgument, message.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PfeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PfeStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {message}"));
            PfeStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn preset_config(name: *const c_char) -> Result<Config, Failure> {
    let name = text(name, "preset name")?;
    let preset = Preset::from_name(name).ok_or_else(|| {
        Failure(
            PfeStatus::ConfigError,
            format!(
                "unknown preset {name:?}; expected one of {}",
                Preset::names().join(", ")
            ),
        )
    })?;
    Ok(Config::for_preset(preset))
}

unsafe fn parsed_config(toml: *const c_char) -> Result<Config, Failure> {
    Ok(Config::parse(text(toml, "config text")?)?)
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null after a
/// successful call. The pointer stays valid until the next `pfe_*` call on
/// the same thread.
#[no_mangle]
pub extern "C" fn pfe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pfe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the thermodynamic model of a named preset.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfe_thermo_create_preset(name: *const c_char, out: *mut *mut PfeThermo) -> PfeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = preset_config(name)?;
        write_out(
            out,
            PfeThermo {
                inner: presets::thermo(&config)?,
            },
        );
        Ok(())
    })
}

/// Builds the thermodynamic model described by configuration text.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfe_thermo_create_config(toml: *const c_char, out: *mut *mut PfeThermo) -> PfeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = parsed_config(toml)?;
        write_out(
            out,
            PfeThermo {
                inner: presets::thermo(&config)?,
            },
        );
        Ok(())
    })
}

/// # Safety
/// `thermo` must be null or a handle obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pfe_thermo_free(thermo: *mut PfeThermo) {
    if !thermo.is_null() {
        drop(Box::from_raw(thermo));
    }
}

/// Number of species, or 0 for a null handle.
///
/// # Safety
/// `thermo` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pfe_thermo_species_count(thermo: *const PfeThermo) -> usize {
    thermo.as_ref().map_or(0, |t| t.inner.n_species())
}

unsafe fn densities<'a>(t: &PfeThermo, rho: *const f64, n: usize) -> Result<&'a [f64], Failure> {
    if rho.is_null() {
        return Err(null("rho"));
    }
    if n != t.inner.n_species() {
        return Err(invalid(format!("expected {} densities, got {n}", t.inner.n_species())));
    }
    Ok(std::slice::from_raw_parts(rho, n))
}

/// Writes the chemical potentials `μ_α(ρ, χ)` into `mu`.
///
/// # Safety
/// `rho` and `mu` must each point to `n` doubles, `n` being the species count.
#[no_mangle]
pub unsafe extern "C" fn pfe_thermo_chemical_potentials(
    thermo: *const PfeThermo,
    rho: *const f64,
    n: usize,
    chi: f64,
    mu: *mut f64,
) -> PfeStatus {
    guard(|| {
        let t = handle(thermo, "thermo")?;
        let rho = densities(t, rho, n)?;
        if mu.is_null() {
            return Err(null("mu"));
        }
        let values = t.inner.chemical_potentials(rho, chi)?;
        std::slice::from_raw_parts_mut(mu, n).copy_from_slice(&values);
        Ok(())
    })
}

/// Writes the pressure `p(ρ, χ)` into `out`.
///
/// # Safety
/// `rho` must point to `n` doubles and `out` to one.
#[no_mangle]
pub unsafe extern "C" fn pfe_thermo_pressure(
    thermo: *const PfeThermo,
    rho: *const f64,
    n: usize,
    chi: f64,
    out: *mut f64,
) -> PfeStatus {
    guard(|| {
        let t = handle(thermo, "thermo")?;
        let rho = densities(t, rho, n)?;
        let out = handle_mut(out, "out")?;
        *out = t.inner.pressure(rho, chi)?;
        Ok(())
    })
}

/// Writes the free energy density `ρf(ρ, χ)` into `out`.
///
/// # Safety
/// `rho` must point to `n` doubles and `out` to one.
#[no_mangle]
pub unsafe extern "C" fn pfe_thermo_free_energy_density(
    thermo: *const PfeThermo,
    rho: *const f64,
    n: usize,
    chi: f64,
    out: *mut f64,
) -> PfeStatus {
    guard(|| {
        let t = handle(thermo, "thermo")?;
        let rho = densities(t, rho, n)?;
        let out = handle_mut(out, "out")?;
        *out = t.inner.rho_f(rho, chi)?;
        Ok(())
    })
}

fn build_simulation(config: &Config, delta: f64) -> Result<PfeSimulation, Failure> {
    let delta = if delta > 0.0 { delta } else { config.delta };
    Ok(PfeSimulation {
        inner: presets::simulation(config, delta)?,
    })
}

/// Sets up the named preset at interface width `delta`; `delta <= 0`
/// selects the preset's own width.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_create_preset(
    name: *const c_char,
    delta: f64,
    out: *mut *mut PfeSimulation,
) -> PfeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = preset_config(name)?;
        write_out(out, build_simulation(&config, delta)?);
        Ok(())
    })
}

/// Sets up the simulation described by configuration text; `delta <= 0`
/// selects `regime.delta`.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_create_config(
    toml: *const c_char,
    delta: f64,
    out: *mut *mut PfeSimulation,
) -> PfeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = parsed_config(toml)?;
        write_out(out, build_simulation(&config, delta)?);
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a handle obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_free(sim: *mut PfeSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances one step of the largest stable size; the size taken is written
/// to `dt_out` when it is non-null.
///
/// # Safety
/// `sim` must be a live handle; `dt_out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_step(sim: *mut PfeSimulation, dt_out: *mut f64) -> PfeStatus {
    guard(|| {
        let s = &mut handle_mut(sim, "sim")?.inner;
        let dt = s.stable_dt()?;
        let info = s.step_with(dt)?;
        if let Some(out) = dt_out.as_mut() {
            *out = info.dt;
        }
        Ok(())
    })
}

/// Steps until the simulation time reaches `t_end`. On failure the handle
/// keeps the last valid state.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_run_until(sim: *mut PfeSimulation, t_end: f64) -> PfeStatus {
    guard(|| {
        let s = &mut handle_mut(sim, "sim")?.inner;
        if !t_end.is_finite() {
            return Err(invalid("t_end must be finite"));
        }
        while s.state.time < t_end * (1.0 - 1e-14) {
            s.step_until(t_end)?;
        }
        Ok(())
    })
}

/// Current simulation time, or NaN for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_time(sim: *const PfeSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.inner.state.time)
}

/// Number of completed steps, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_step_count(sim: *const PfeSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.inner.steps())
}

/// Number of grid cells, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_cell_count(sim: *const PfeSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.inner.state.cells())
}

/// Number of species, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_species_count(sim: *const PfeSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.inner.model.n_species())
}

/// Evaluates the free energy and entropy production of the current state.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_energy(sim: *const PfeSimulation, out: *mut PfeEnergy) -> PfeStatus {
    guard(|| {
        let s = &handle(sim, "sim")?.inner;
        let out = handle_mut(out, "out")?;
        let e = total_energy(&s.model, &s.state)?;
        let d = entropy_production(&s.model, &s.state)?;
        *out = PfeEnergy {
            double_well: e.double_well,
            gradient: e.gradient,
            bulk: e.bulk,
            electric: e.electric,
            kinetic: e.kinetic,
            total: e.total,
            boundary_work: e.boundary_work,
            available: e.available,
            dissipation_viscous: d.viscous,
            dissipation_diffusive: d.diffusive,
            dissipation_reactive: d.reactive,
            dissipation_phase_field: d.phase_field,
            dissipation_total: d.total,
        };
        Ok(())
    })
}

/// Copies a cell-centred field into `buf`, which must hold `len` doubles
/// with `len` equal to the cell count. `field` is a [`PfeField`] value;
/// `species` is used only for [`PfeField::Density`].
///
/// # Safety
/// `sim` must be a live handle and `buf` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pfe_simulation_copy_field(
    sim: *const PfeSimulation,
    field: u32,
    species: usize,
    buf: *mut f64,
    len: usize,
) -> PfeStatus {
    guard(|| {
        let s = &handle(sim, "sim")?.inner;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let n = s.state.cells();
        if len != n {
            return Err(invalid(format!("buffer holds {len} values, grid has {n} cells")));
        }
        let field = PfeField::from_raw(field).ok_or_else(|| invalid(format!("unknown field {field}")))?;
        let values = match field {
            PfeField::Position => s.model.grid.centers(),
            PfeField::Density => s
                .state
                .rho
                .get(species)
                .cloned()
                .ok_or_else(|| invalid(format!("species index {species} out of range")))?,
            PfeField::Velocity => s.state.cell_velocity(),
            PfeField::PhaseField => s.state.chi.clone(),
            PfeField::Potential => s.state.phi.clone(),
            PfeField::ChargeDensity => s.model.charge_density(&s.state.rho),
        };
        std::slice::from_raw_parts_mut(buf, n).copy_from_slice(&values);
        Ok(())
    })
}
