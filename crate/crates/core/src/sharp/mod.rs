//! Sharp-interface verification: inner-layer profiles, residuals of the
//! interface conditions, and the δ-convergence study.

pub mod inner;
pub mod jumps;
pub mod profile;
pub mod study;

pub use inner::{
    largest_convergent_flux, solve_inner_profiles, FluxDenominator, InnerProfileSolution, InnerSolverOptions,
};
pub use jumps::{
    inner_poisson_displacement_jump, inner_surface_charge, jump_residuals_coupled, jump_residuals_uncoupled, BulkSide,
    BulkState, InterfaceData, JumpResiduals,
};
pub use profile::{phase_profile, surface_tension_closed_form, surface_tension_integral, PhaseProfile};
pub use study::{
    delta_convergence_study, empirical_orders, extract, locate_interface, study_member, Extraction, StudyOptions,
    StudyResult, StudyRow,
};
