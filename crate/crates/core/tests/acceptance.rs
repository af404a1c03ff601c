//! Acceptance suite. Runs every primary criterion at its stated tolerance and
//! prints one `PASS`/`FAIL` line per criterion; exits nonzero on any failure.
//!
//! Run with `cargo test -p pfe-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{oracle_rho_f, random_densities, random_thermo, rng, simpson};
use pfe_core::config::Config;
use pfe_core::energy::{check_decay, entropy_production, total_energy, EnergySample};
use pfe_core::evolution::SimState;
use pfe_core::grid::{Boundary, Grid};
use pfe_core::poisson::{displacement_flux, solve_potential};
use pfe_core::presets::{self, Preset};
use pfe_core::reactions::{Reaction, ReactionNetwork};
use pfe_core::sharp::profile::x0_z;
use pfe_core::sharp::{
    delta_convergence_study, phase_profile, solve_inner_profiles, surface_tension_integral, InnerProfileSolution,
    InnerSolverOptions, StudyResult,
};
use pfe_core::thermo::{DoubleWell, MixtureThermo, PhaseEnergyParams, SpeciesSpec, Susceptibility};
use pfe_core::transport::MobilityMatrix;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn thermo_identities() -> Outcome {
    let mut r = rng(101);
    let (mut gd, mut fd_err) = (0.0f64, 0.0f64);
    for n in 1..=3 {
        for _ in 0..100 {
            let t = random_thermo(&mut r, n);
            let rho = random_densities(&mut r, n);
            let chi = r.random_range(-1.5..1.5);
            let mu = t.chemical_potentials(&rho, chi).map_err(|e| e.to_string())?;
            let p = t.pressure(&rho, chi).map_err(|e| e.to_string())?;
            let rf = t.rho_f(&rho, chi).map_err(|e| e.to_string())?;
            let work: f64 = rho.iter().zip(&mu).map(|(a, b)| a * b).sum();
            let scale = p.abs().max(rf.abs()).max(work.abs()).max(1.0);
            gd = gd.max((p + rf - work).abs() / scale);
            for a in 0..n {
                let h = 1e-6 * rho[a];
                let at = |x: f64| {
                    let mut s = rho.clone();
                    s[a] = x;
                    oracle_rho_f(&t, &s, chi)
                };
                let fd = (at(rho[a] + h) - at(rho[a] - h)) / (2.0 * h);
                fd_err = fd_err.max((mu[a] - fd).abs() / mu[a].abs().max(1.0));
            }
        }
    }
    ensure(
        gd < 1e-12 && fd_err < 1e-6,
        format!("Gibbs-Duhem {gd:.2e} (< 1e-12), mu vs FD {fd_err:.2e} (< 1e-6)"),
    )
}

fn stoichiometric_conservation() -> Outcome {
    let mut r = rng(102);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (ma, mb) = (r.random_range(0.5..3.0), r.random_range(0.5..3.0));
        let (za, zb) = (r.random_range(-2..=2), r.random_range(-2..=2));
        let species = vec![
            SpeciesSpec::new(ma, za, 0.0),
            SpeciesSpec::new(mb, zb, 0.0),
            SpeciesSpec::new(ma + mb, za + zb, 0.0),
            SpeciesSpec::new(ma + 2.0 * mb, za + 2 * zb, 0.0),
        ];
        let net = ReactionNetwork::new(
            vec![
                Reaction::new(vec![1, 1, 0, 0], vec![0, 0, 1, 0], r.random_range(0.1..5.0)),
                Reaction::new(vec![0, 1, 1, 0], vec![0, 0, 0, 1], r.random_range(0.1..5.0)),
            ],
            &species,
        )
        .map_err(|e| e.to_string())?;
        let mu: Vec<f64> = (0..4).map(|_| r.random_range(-3.0..3.0)).collect();
        let mut out = [0.0; 4];
        net.mass_production_from_mu(&mu, &mut out).map_err(|e| e.to_string())?;
        let scale = out.iter().map(|x| x.abs()).fold(1.0, f64::max);
        let mass: f64 = out.iter().sum();
        let charge: f64 = out.iter().zip(&species).map(|(x, s)| s.specific_charge() * x).sum();
        worst = worst.max(mass.abs() / scale).max(charge.abs() / scale);
    }
    ensure(
        worst < 1e-12,
        format!("max |sum r|, |sum z r / m| = {worst:.2e} (< 1e-12)"),
    )
}

fn entropy_and_onsager() -> Outcome {
    let mut r = rng(103);
    let c = Config::for_preset(Preset::PlanarInterfaceIons);
    let mut sim = presets::simulation(&c, 0.1).map_err(|e| e.to_string())?;
    let n = 32;
    sim.model.grid = Grid::new(n, 0.0, 1.0).map_err(|e| e.to_string())?;
    let mut lowest = f64::INFINITY;
    for _ in 0..1000 {
        let state = SimState {
            rho: (0..3)
                .map(|_| (0..n).map(|_| r.random_range(0.01..2.0)).collect())
                .collect(),
            momentum: (0..=n).map(|_| r.random_range(-1.0..1.0)).collect(),
            chi: (0..n).map(|_| r.random_range(-1.2..1.2)).collect(),
            phi: (0..n).map(|_| r.random_range(-2.0..2.0)).collect(),
            time: 0.0,
        };
        let s = entropy_production(&sim.model, &state).map_err(|e| e.to_string())?;
        lowest = s.components().into_iter().fold(lowest, f64::min);
    }
    let mut asym = 0.0f64;
    for _ in 0..1000 {
        let dim = r.random_range(1..5);
        let b: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| r.random_range(-1.0..1.0) + if i == j { 3.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let w: Vec<f64> = (0..dim).map(|_| r.random_range(0.01..5.0)).collect();
        let m = MobilityMatrix::from_factors(&b, &w).map_err(|e| e.to_string())?;
        for a in 0..dim {
            for k in 0..dim {
                asym = asym.max((m.get(a, k) - m.get(k, a)).abs());
            }
        }
    }
    ensure(
        lowest >= -1e-14 && asym < 1e-12,
        format!("min mechanism {lowest:.2e} (>= -1e-14), mobility asymmetry {asym:.2e} (< 1e-12)"),
    )
}

fn poisson() -> Outcome {
    let mut errors = Vec::new();
    let mut flux_err = 0.0f64;
    for n in [64, 128, 256, 512] {
        let g = Grid::new(n, 0.0, 1.0).map_err(|e| e.to_string())?;
        let xs = g.centers();
        let rhs: Vec<f64> = xs.iter().map(|x| PI * PI * (PI * x).sin()).collect();
        let phi = solve_potential(
            &g,
            &vec![1.0; n],
            &rhs,
            Boundary::Dirichlet(0.0),
            Boundary::Dirichlet(0.0),
        )
        .map_err(|e| e.to_string())?;
        errors.push(
            phi.values
                .iter()
                .zip(&xs)
                .map(|(v, x)| (v - (PI * x).sin()).abs())
                .fold(0.0, f64::max),
        );

        let eps: Vec<f64> = xs.iter().map(|&x| if x < 0.5 { 1.0 } else { 3.0 }).collect();
        let phi = solve_potential(
            &g,
            &eps,
            &vec![0.0; n],
            Boundary::Dirichlet(0.0),
            Boundary::Dirichlet(1.0),
        )
        .map_err(|e| e.to_string())?;
        for d in displacement_flux(&g, &eps, &phi) {
            flux_err = flux_err.max((d - 1.5).abs());
        }
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(
        min_order >= 1.9 && flux_err < 1e-10,
        format!("orders {orders:.3?} (>= 1.9), flux continuity {flux_err:.2e} (< 1e-10)"),
    )
}

fn phase_profile_criterion() -> Outcome {
    let mut worst_res = 0.0f64;
    let mut worst_sigma = 0.0f64;
    for gamma in [0.5f64, 2.0, 8.0] {
        let p = phase_profile(gamma, 4001).map_err(|e| e.to_string())?;
        worst_res = worst_res.max(p.residual);
        worst_sigma = worst_sigma.max((surface_tension_integral(gamma) - 4.0 / 3.0 * (2.0 / gamma).sqrt()).abs());
    }
    ensure(
        worst_res < 1e-8 && worst_sigma < 1e-6,
        format!("profile residual {worst_res:.2e} (< 1e-8), I_sigma error {worst_sigma:.2e} (< 1e-6)"),
    )
}

fn layer_thermo(masses: &[f64], charges: &[i32]) -> MixtureThermo {
    MixtureThermo::new(
        masses
            .iter()
            .zip(charges)
            .map(|(&m, &z)| SpeciesSpec::new(m, z, 0.0))
            .collect(),
        PhaseEnergyParams {
            bulk_modulus_liquid: 4.0,
            bulk_modulus_vapor: 1.0,
            reference_number_density: 1.0,
            reference_pressure: 1.0,
            thermal_energy: 1.0,
        },
        DoubleWell { gamma: 1.0, tau: 1.5 },
        Susceptibility {
            liquid: 4.0,
            vapor: 0.0,
            vacuum_permittivity: 0.5,
        },
        1.0,
    )
    .unwrap()
}

/// `[[j₀²/(2ρ²) + μ_N]] + (j₀/τ) ∫ (X₀′)²/ρ dz` evaluated from the node values.
fn flux_identity(t: &MixtureThermo, inner: &InnerProfileSolution) -> f64 {
    let n = t.n_species() - 1;
    let step = inner.z[1] - inner.z[0];
    let integrand: Vec<f64> = (0..inner.nodes())
        .map(|k| x0_z(inner.gamma, inner.z[k]).powi(2) / inner.total_density(k))
        .collect();
    let side = |k: usize| {
        let rho = inner.total_density(k);
        let mu = t.chemical_potentials(&inner.node_state(k), inner.x0[k]).unwrap();
        inner.j0 * inner.j0 / (2.0 * rho * rho) + mu[n]
    };
    side(inner.nodes() - 1) - side(0) + inner.j0 / t.double_well.tau * simpson(&integrand, step)
}

fn inner_profiles() -> Outcome {
    let cases: [(&[f64], &[i32], Vec<f64>); 3] = [
        (&[1.0, 1.0], &[0, 0], vec![0.3, 0.9]),
        (&[1.0, 2.0, 3.0], &[1, -1, 0], vec![0.2, 0.5, 0.7]),
        (&[1.0, 2.0], &[0, 0], vec![0.6, 0.1]),
    ];
    let options = InnerSolverOptions::default();
    let (mut spread, mut identity) = (0.0f64, 0.0f64);
    for (masses, charges, left) in cases {
        let t = layer_thermo(masses, charges);
        let inner = solve_inner_profiles(&t, &left, 0.0, &options).map_err(|e| e.to_string())?;
        let mu: Vec<Vec<f64>> = (0..inner.nodes())
            .map(|k| t.chemical_potentials(&inner.node_state(k), inner.x0[k]).unwrap())
            .collect();
        for a in 0..masses.len() {
            spread = spread.max(mu.iter().map(|m| (m[a] - mu[0][a]).abs()).fold(0.0, f64::max));
        }
        for j0 in [0.01, -0.02, 0.05] {
            let inner = solve_inner_profiles(&t, &left, j0, &options).map_err(|e| e.to_string())?;
            identity = identity.max(flux_identity(&t, &inner).abs());
        }
    }
    ensure(
        spread < 1e-9 && identity < 1e-6,
        format!("mu spread at j0=0 {spread:.2e} (< 1e-9), flux identity {identity:.2e} (< 1e-6)"),
    )
}

fn ions_decay() -> Outcome {
    let c = Config::for_preset(Preset::PlanarInterfaceIons);
    let mut sim = presets::simulation(&c, c.delta).map_err(|e| e.to_string())?;
    let energy = |s: &pfe_core::evolution::Simulation| total_energy(&s.model, &s.state).map(|e| e.available);
    let mass0 = sim.model.grid.integrate(&sim.state.total_density());
    let mut samples = vec![EnergySample {
        time: 0.0,
        dt: 0.0,
        available: energy(&sim).map_err(|e| e.to_string())?,
    }];
    let steps = 1000;
    for _ in 0..steps {
        let dt = sim.stable_dt().map_err(|e| e.to_string())?;
        let info = sim.step_with(dt).map_err(|e| e.to_string())?;
        samples.push(EnergySample {
            time: info.time,
            dt: info.dt,
            available: energy(&sim).map_err(|e| e.to_string())?,
        });
    }
    let report = check_decay(&samples, c.split_constant);
    let drift = (sim.model.grid.integrate(&sim.state.total_density()) - mass0).abs() / mass0;
    ensure(
        report.passed && drift < 1e-10,
        format!(
            "{steps} steps, max violation {:.2e}, max increase {:.2e}, mass drift {drift:.2e} (< 1e-10)",
            report.max_violation, report.max_increase
        ),
    )
}

fn fixed_point() -> Outcome {
    let c = Config::for_preset(Preset::UniformEquilibrium);
    let mut sim = presets::simulation(&c, c.delta).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let before = sim.state.clone();
        let dt = sim.stable_dt().map_err(|e| e.to_string())?;
        sim.step_with(dt).map_err(|e| e.to_string())?;
        let pairs = before
            .rho
            .iter()
            .flatten()
            .zip(sim.state.rho.iter().flatten())
            .chain(before.chi.iter().zip(&sim.state.chi))
            .chain(before.momentum.iter().zip(&sim.state.momentum));
        for (a, b) in pairs {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(
        worst < 1e-12,
        format!("max per-step change {worst:.2e} over 100 steps (< 1e-12)"),
    )
}

fn study(preset: Preset, deltas: &[f64]) -> Result<StudyResult, String> {
    let mut c = Config::for_preset(preset);
    c.study.deltas = deltas.to_vec();
    c.validate().map_err(|e| e.to_string())?;
    delta_convergence_study(|d| presets::simulation(&c, d), &c.study).map_err(|e| e.to_string())
}

fn sci(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

fn neutral_convergence() -> Outcome {
    let r = study(Preset::PlanarInterfaceNeutral, &[0.1, 0.05, 0.025])?;
    let i1 = r.series("i1");
    let i4 = r.series("i4");
    let i6 = r.series("i6");
    let o1 = r.orders("i1");
    let o4 = r.orders("i4");
    let decreasing = |s: &[f64]| s.windows(2).all(|w| w[1] < w[0]);
    let min = |o: &[f64]| o.iter().copied().fold(f64::INFINITY, f64::min);
    let i6_max = i6.iter().copied().fold(0.0, f64::max);
    ensure(
        decreasing(&i1) && decreasing(&i4) && min(&o1) >= 0.8 && min(&o4) >= 0.8 && i6_max < 1e-6,
        format!(
            "i1 {} orders {o1:.2?}; i4 {} orders {o4:.2?} (monotone, >= 0.8); max i6 {i6_max:.1e} (< 1e-6)",
            sci(&i1),
            sci(&i4)
        ),
    )
}

fn ions_electroneutrality() -> Outcome {
    let r = study(Preset::PlanarInterfaceIons, &[0.1, 0.025])?;
    let b5 = r.series("b5");
    let fine = &r.rows[1].primary;
    let q = fine.surface_charge;
    let jump = fine.residuals.i5 - q;
    let vs_oracle = (jump - fine.oracle_displacement_jump).abs() / fine.oracle_displacement_jump.abs();
    let vs_charge = fine.residuals.i5.abs() / q.abs();
    ensure(
        b5[1] <= 10.0 * b5[0] && vs_oracle <= 0.05 && vs_charge <= 0.05,
        format!(
            "b5 {:.3e} -> {:.3e} (ratio {:.2}, <= 10); displacement jump vs Poisson oracle {:.2}%, |i5|/|Q| {:.2}% (<= 5%)",
            b5[0],
            b5[1],
            b5[1] / b5[0],
            100.0 * vs_oracle,
            100.0 * vs_charge
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("thermo identities", thermo_identities),
        ("stoichiometric conservation", stoichiometric_conservation),
        ("entropy production and Onsager symmetry", entropy_and_onsager),
        ("Poisson solver", poisson),
        ("phase profile and surface tension", phase_profile_criterion),
        ("inner profiles", inner_profiles),
        ("closed-box Lyapunov decay (ions)", ions_decay),
        ("fixed-point preservation", fixed_point),
        ("delta convergence (uncoupled, neutral)", neutral_convergence),
        ("coupled electroneutrality (ions)", ions_electroneutrality),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
