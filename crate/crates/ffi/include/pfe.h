#ifndef PFE_H
#define PFE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum PfeStatus {
  PFE_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PFE_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range, mis-sized or not valid UTF-8.
   */
  PFE_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The configuration or model parameters were rejected.
   */
  PFE_STATUS_CONFIG_ERROR = 3,
  /**
   * The computation failed (non-finite state, solver failure, ...).
   */
  PFE_STATUS_RUNTIME_ERROR = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  PFE_STATUS_PANIC = 5,
} PfeStatus;

/**
 * Cell-centred field selector for [`pfe_simulation_copy_field`].
 */
typedef enum PfeField {
  /**
   * Cell centres.
   */
  PFE_FIELD_POSITION = 0,
  /**
   * Partial density of the species given by `species`.
   */
  PFE_FIELD_DENSITY = 1,
  PFE_FIELD_VELOCITY = 2,
  PFE_FIELD_PHASE_FIELD = 3,
  PFE_FIELD_POTENTIAL = 4,
  PFE_FIELD_CHARGE_DENSITY = 5,
} PfeField;

/**
 * A running one-dimensional simulation.
 */
typedef struct PfeSimulation PfeSimulation;

/**
 * Thermodynamic model of a mixture.
 */
typedef struct PfeThermo PfeThermo;

/**
 * Free energy split by contribution, with the entropy production rate.
 */
typedef struct PfeEnergy {
  double double_well;
  double gradient;
  double bulk;
  double electric;
  double kinetic;
  double total;
  double boundary_work;
  /**
   * `total - boundary_work`; non-increasing in a closed box.
   */
  double available;
  double dissipation_viscous;
  double dissipation_diffusive;
  double dissipation_reactive;
  double dissipation_phase_field;
  double dissipation_total;
} PfeEnergy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a
 * successful call. The pointer stays valid until the next `pfe_*` call on
 * the same thread.
 */
const char *pfe_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pfe_version(void);

/**
 * Builds the thermodynamic model of a named preset.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PfeStatus pfe_thermo_create_preset(const char *name, struct PfeThermo **out);

/**
 * Builds the thermodynamic model described by configuration text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PfeStatus pfe_thermo_create_config(const char *toml, struct PfeThermo **out);

/**
 * # Safety
 * `thermo` must be null or a handle obtained from this library, not yet freed.
 */
void pfe_thermo_free(struct PfeThermo *thermo);

/**
 * Number of species, or 0 for a null handle.
 *
 * # Safety
 * `thermo` must be null or a live handle.
 */
size_t pfe_thermo_species_count(const struct PfeThermo *thermo);

/**
 * Writes the chemical potentials `μ_α(ρ, χ)` into `mu`.
 *
 * # Safety
 * `rho` and `mu` must each point to `n` doubles, `n` being the species count.
 */
enum PfeStatus pfe_thermo_chemical_potentials(const struct PfeThermo *thermo,
                                              const double *rho,
                                              size_t n,
                                              double chi,
                                              double *mu);

/**
 * Writes the pressure `p(ρ, χ)` into `out`.
 *
 * # Safety
 * `rho` must point to `n` doubles and `out` to one.
 */
enum PfeStatus pfe_thermo_pressure(const struct PfeThermo *thermo,
                                   const double *rho,
                                   size_t n,
                                   double chi,
                                   double *out);

/**
 * Writes the free energy density `ρf(ρ, χ)` into `out`.
 *
 * # Safety
 * `rho` must point to `n` doubles and `out` to one.
 */
enum PfeStatus pfe_thermo_free_energy_density(const struct PfeThermo *thermo,
                                              const double *rho,
                                              size_t n,
                                              double chi,
                                              double *out);

/**
 * Sets up the named preset at interface width `delta`; `delta <= 0`
 * selects the preset's own width.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PfeStatus pfe_simulation_create_preset(const char *name,
                                            double delta,
                                            struct PfeSimulation **out);

/**
 * Sets up the simulation described by configuration text; `delta <= 0`
 * selects `regime.delta`.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PfeStatus pfe_simulation_create_config(const char *toml,
                                            double delta,
                                            struct PfeSimulation **out);

/**
 * # Safety
 * `sim` must be null or a handle obtained from this library, not yet freed.
 */
void pfe_simulation_free(struct PfeSimulation *sim);

/**
 * Advances one step of the largest stable size; the size taken is written
 * to `dt_out` when it is non-null.
 *
 * # Safety
 * `sim` must be a live handle; `dt_out` null or valid.
 */
enum PfeStatus pfe_simulation_step(struct PfeSimulation *sim, double *dt_out);

/**
 * Steps until the simulation time reaches `t_end`. On failure the handle
 * keeps the last valid state.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum PfeStatus pfe_simulation_run_until(struct PfeSimulation *sim, double t_end);

/**
 * Current simulation time, or NaN for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
double pfe_simulation_time(const struct PfeSimulation *sim);

/**
 * Number of completed steps, or 0 for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
size_t pfe_simulation_step_count(const struct PfeSimulation *sim);

/**
 * Number of grid cells, or 0 for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
size_t pfe_simulation_cell_count(const struct PfeSimulation *sim);

/**
 * Number of species, or 0 for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
size_t pfe_simulation_species_count(const struct PfeSimulation *sim);

/**
 * Evaluates the free energy and entropy production of the current state.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum PfeStatus pfe_simulation_energy(const struct PfeSimulation *sim, struct PfeEnergy *out);

/**
 * Copies a cell-centred field into `buf`, which must hold `len` doubles
 * with `len` equal to the cell count. `field` is a [`PfeField`] value;
 * `species` is used only for [`PfeField::Density`].
 *
 * # Safety
 * `sim` must be a live handle and `buf` must point to `len` doubles.
 */
enum PfeStatus pfe_simulation_copy_field(const struct PfeSimulation *sim,
                                         uint32_t field,
                                         size_t species,
                                         double *buf,
                                         size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PFE_H */
