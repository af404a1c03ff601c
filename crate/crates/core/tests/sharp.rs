mod common;

use common::{bisect, simpson};
use pfe_core::config::Config;
use pfe_core::linalg::solve_dense;
use pfe_core::presets::{self, Preset};
use pfe_core::sharp::profile::{domain_half_width, x0, x0_z};
use pfe_core::sharp::{
    empirical_orders, inner_poisson_displacement_jump, jump_residuals_coupled, jump_residuals_uncoupled,
    largest_convergent_flux, locate_interface, phase_profile, solve_inner_profiles, study_member,
    surface_tension_integral, BulkSide, BulkState, FluxDenominator, InnerProfileSolution, InnerSolverOptions,
    InterfaceData, StudyOptions,
};
use pfe_core::thermo::{DoubleWell, MixtureThermo, PhaseEnergyParams, SpeciesSpec, Susceptibility};
use pfe_core::transport::MobilityMatrix;
use pfe_core::Error;

fn thermo(masses: &[f64], charges: &[i32], gamma: f64) -> MixtureThermo {
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
        DoubleWell { gamma, tau: 1.5 },
        Susceptibility {
            liquid: 4.0,
            vapor: 0.0,
            vacuum_permittivity: 0.5,
        },
        1.0,
    )
    .unwrap()
}

fn identity_mobility(dim: usize) -> MobilityMatrix {
    MobilityMatrix::diagonal(&vec![1.0; dim]).unwrap()
}

fn node_potentials(t: &MixtureThermo, inner: &InnerProfileSolution) -> Vec<Vec<f64>> {
    (0..inner.nodes())
        .map(|k| t.chemical_potentials(&inner.node_state(k), inner.x0[k]).unwrap())
        .collect()
}

#[test]
fn phase_profile_satisfies_the_profile_equation() {
    for gamma in [0.5, 1.0, 2.0, 8.0] {
        let p = phase_profile(gamma, 4001).unwrap();
        assert!(p.residual < 1e-8, "gamma {gamma}: {}", p.residual);
        assert!(p.first_integral_residual < 1e-8);
        let mid = p.z.len() / 2;
        assert_eq!(p.x0[mid], 0.0);
        assert!((p.x0[0] + 1.0).abs() < 1e-6 && (p.x0[p.z.len() - 1] - 1.0).abs() < 1e-6);
        assert!(p.x0.windows(2).all(|w| w[1] > w[0] || (w[1] - w[0]).abs() < 1e-15));
    }
}

#[test]
fn translated_profile_also_solves_the_equation() {
    let gamma = 1.3;
    let p = phase_profile(gamma, 4001).unwrap();
    let step = p.z[1] - p.z[0];
    let shifted: Vec<f64> = p.z.iter().map(|&z| x0(gamma, z - 0.37)).collect();
    assert!(pfe_core::sharp::profile::ode_residual(gamma, &shifted, step) < 1e-8);
}

#[test]
fn profile_matches_a_shooting_oracle() {
    // RK4 on X′ = √(2W(X)/γ) = (1 − X²)/√(γ/2) from X(0) = 0
    let gamma: f64 = 2.0;
    let rhs = |x: f64| (1.0 - x * x) / (gamma / 2.0f64).sqrt();
    let h = 1e-3;
    let mut x = 0.0;
    for k in 0..3000 {
        let k1 = rhs(x);
        let k2 = rhs(x + 0.5 * h * k1);
        let k3 = rhs(x + 0.5 * h * k2);
        let k4 = rhs(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (k + 1) % 500 == 0 {
            let z = (k + 1) as f64 * h;
            assert!((x - x0(gamma, z)).abs() < 1e-10);
            assert!((x0(gamma, z) - z.tanh()).abs() < 1e-15);
        }
    }
}

#[test]
fn surface_tension_matches_closed_form() {
    for gamma in [0.5f64, 2.0, 8.0] {
        let closed = 4.0 / 3.0 * (2.0 / gamma).sqrt();
        assert!((surface_tension_integral(gamma) - closed).abs() < 1e-6, "gamma {gamma}");
    }
    assert!((surface_tension_integral(2.0) - 4.0 / 3.0).abs() < 1e-6);
    let ratio = surface_tension_integral(4.0 * 1.5) / surface_tension_integral(1.5);
    assert!((ratio - 0.5).abs() < 1e-9);
    let short = pfe_core::sharp::profile::surface_tension_integral_on(2.0, 10.0, 20_001);
    let long = pfe_core::sharp::profile::surface_tension_integral_on(2.0, 20.0, 40_001);
    assert!((short - long).abs() < 1e-10);
    assert!(domain_half_width(2.0) >= 10.0);
}

#[test]
fn static_inner_layer_has_constant_potentials() {
    let cases: [(&[f64], &[i32], Vec<f64>); 3] = [
        (&[1.0, 1.0], &[0, 0], vec![0.3, 0.9]),
        (&[1.0, 2.0, 3.0], &[1, -1, 0], vec![0.2, 0.5, 0.7]),
        (&[1.0, 2.0], &[0, 0], vec![0.6, 0.1]),
    ];
    for (masses, charges, left) in cases {
        let t = thermo(masses, charges, 1.0);
        let inner = solve_inner_profiles(&t, &left, 0.0, &InnerSolverOptions::default()).unwrap();
        let mu = node_potentials(&t, &inner);
        for a in 0..masses.len() {
            let spread = mu.iter().map(|m| (m[a] - mu[0][a]).abs()).fold(0.0, f64::max);
            assert!(spread < 1e-9, "species {a}: {spread}");
        }
        assert!(inner.rho.iter().flatten().all(|&r| r > 0.0));
    }
}

#[test]
fn single_species_profile_matches_bisection() {
    let t = thermo(&[1.0], &[0], 1.0);
    let left = [0.7];
    let inner = solve_inner_profiles(&t, &left, 0.0, &InnerSolverOptions::default()).unwrap();
    let target = t.chemical_potentials(&left, -1.0).unwrap()[0];
    for k in (0..inner.nodes()).step_by(97) {
        let chi = inner.x0[k];
        let r = bisect(|r| t.chemical_potentials(&[r], chi).unwrap()[0] - target, 1e-8, 100.0);
        assert!(
            (inner.rho[0][k] - r).abs() < 1e-9 * r,
            "node {k}: {} vs {r}",
            inner.rho[0][k]
        );
    }
    assert!(inner.right_state[0] > left[0]);
}

fn flux_identity_residual(t: &MixtureThermo, inner: &InnerProfileSolution) -> f64 {
    let n = t.n_species() - 1;
    let gamma = inner.gamma;
    let step = inner.z[1] - inner.z[0];
    let integrand: Vec<f64> = inner
        .z
        .iter()
        .enumerate()
        .map(|(k, &z)| x0_z(gamma, z).powi(2) / inner.total_density(k))
        .collect();
    let i_j = simpson(&integrand, step);
    let last = inner.nodes() - 1;
    let side = |k: usize| {
        let rho = inner.total_density(k);
        let mu = t.chemical_potentials(&inner.node_state(k), inner.x0[k]).unwrap();
        inner.j0 * inner.j0 / (2.0 * rho * rho) + mu[n]
    };
    side(last) - side(0) + inner.j0 / t.double_well.tau * i_j
}

#[test]
fn flux_identity_holds_for_small_mass_flux() {
    for (masses, charges, left) in [
        (vec![1.0, 1.0], vec![0, 0], vec![0.3, 0.9]),
        (vec![1.0, 2.0, 3.0], vec![1, -1, 0], vec![0.2, 0.5, 0.7]),
    ] {
        let t = thermo(&masses, &charges, 1.0);
        for j0 in [0.01, -0.02, 0.05] {
            let inner = solve_inner_profiles(&t, &left, j0, &InnerSolverOptions::default()).unwrap();
            assert!(inner.picard_iterations > 0);
            let r = flux_identity_residual(&t, &inner);
            assert!(r.abs() < 1e-6, "j0 {j0}: {r}");
            let mu = node_potentials(&t, &inner);
            let last = masses.len() - 1;
            for a in 0..last {
                let d0 = mu[0][a] - mu[0][last];
                let spread = mu.iter().map(|m| (m[a] - m[last] - d0).abs()).fold(0.0, f64::max);
                assert!(spread < 1e-9);
            }
        }
    }
}

#[test]
fn denominator_choice_changes_only_the_kinetic_term() {
    let t = thermo(&[1.0, 1.0], &[0, 0], 1.0);
    let left = [0.3, 0.9];
    let a = solve_inner_profiles(&t, &left, 0.0, &InnerSolverOptions::default()).unwrap();
    let options = InnerSolverOptions {
        denominator: FluxDenominator::SumOfSquares,
        ..InnerSolverOptions::default()
    };
    let b = solve_inner_profiles(&t, &left, 0.0, &options).unwrap();
    assert!(common::max_abs_diff(&a.right_state, &b.right_state) < 1e-12);
    let c = solve_inner_profiles(&t, &left, 0.05, &options).unwrap();
    let d = solve_inner_profiles(&t, &left, 0.05, &InnerSolverOptions::default()).unwrap();
    assert!(common::max_abs_diff(&c.right_state, &d.right_state) > 1e-8);
}

#[test]
fn convergent_flux_bound_is_reported() {
    let t = thermo(&[1.0, 1.0], &[0, 0], 1.0);
    let options = InnerSolverOptions {
        nodes: 801,
        ..InnerSolverOptions::default()
    };
    let j = largest_convergent_flux(&t, &[0.3, 0.9], 0.05, 1e-3, &options).unwrap();
    assert!(j > 0.0 && j <= 0.05);
}

#[test]
fn static_equilibrium_has_zero_residuals() {
    let t = thermo(&[1.0, 1.0], &[0, 0], 1.0);
    let left = vec![0.5, 0.5];
    let inner = solve_inner_profiles(&t, &left, 0.0, &InnerSolverOptions::default()).unwrap();
    let bulk = BulkState {
        minus: BulkSide::at_rest(left.clone()),
        plus: BulkSide::at_rest(inner.right_state.clone()),
    };
    let iface = InterfaceData::from_bulk(&bulk, 0.0, 0.0);
    let r = jump_residuals_uncoupled(&bulk, &iface, &inner, &t, &identity_mobility(1)).unwrap();
    for (name, v) in r.named() {
        assert!(v < 1e-10, "{name}: {v}");
    }
}

/// Right state with `[[μ_α − μ_N]] = 0` and `p⁺ = p⁻ + Δp`, by Newton with a
/// finite-difference Jacobian.
fn shifted_right_state(t: &MixtureThermo, left: &[f64], dp: f64) -> Vec<f64> {
    let n = left.len();
    let mu_l = t.chemical_potentials(left, -1.0).unwrap();
    let p_target = t.pressure(left, -1.0).unwrap() + dp;
    let f = |r: &[f64]| -> Vec<f64> {
        let mu = t.chemical_potentials(r, 1.0).unwrap();
        let mut out: Vec<f64> = (0..n - 1)
            .map(|a| (mu[a] - mu[n - 1]) - (mu_l[a] - mu_l[n - 1]))
            .collect();
        out.push(t.pressure(r, 1.0).unwrap() - p_target);
        out
    };
    let mut r = left.to_vec();
    for _ in 0..50 {
        let res = f(&r);
        if res.iter().all(|v| v.abs() < 1e-14) {
            break;
        }
        let mut jac = vec![0.0; n * n];
        for b in 0..n {
            let mut s = r.clone();
            let h = 1e-7 * r[b];
            s[b] += h;
            let fs = f(&s);
            for a in 0..n {
                jac[a * n + b] = (fs[a] - res[a]) / h;
            }
        }
        let step = solve_dense(jac, res.iter().map(|v| -v).collect()).unwrap();
        r.iter_mut().zip(&step).for_each(|(x, d)| *x += d);
    }
    r
}

#[test]
fn young_laplace_balance_is_recovered() {
    let t = thermo(&[1.0, 1.0], &[0, 0], 1.0);
    let left = vec![0.5, 0.5];
    let inner = solve_inner_profiles(&t, &left, 0.0, &InnerSolverOptions::default()).unwrap();
    let kappa = 0.3;
    let dp = t.double_well.gamma * kappa * inner.surface_tension;
    let right = shifted_right_state(&t, &left, dp);
    let bulk = BulkState {
        minus: BulkSide::at_rest(left.clone()),
        plus: BulkSide::at_rest(right.clone()),
    };
    let iface = InterfaceData::from_bulk(&bulk, 0.0, kappa);
    let r = jump_residuals_uncoupled(&bulk, &iface, &inner, &t, &identity_mobility(1)).unwrap();
    assert!(r.i3_normal.abs() < 1e-10, "{}", r.i3_normal);
    assert!(r.i1_norm() < 1e-10);
    assert_eq!(r.i3_tangential, 0.0);

    let flat = InterfaceData::from_bulk(&bulk, 0.0, 0.0);
    let r = jump_residuals_uncoupled(&bulk, &flat, &inner, &t, &identity_mobility(1)).unwrap();
    assert!((r.i3_normal - dp).abs() < 1e-10);
}

#[test]
fn tangential_condition_is_void_without_mass_flux() {
    let t = thermo(&[1.0, 1.0], &[0, 0], 1.0);
    let left = vec![0.5, 0.5];
    let inner = solve_inner_profiles(&t, &left, 0.0, &InnerSolverOptions::default()).unwrap();
    let mut bulk = BulkState {
        minus: BulkSide::at_rest(left.clone()),
        plus: BulkSide::at_rest(left.clone()),
    };
    bulk.plus.tangential_velocity = 0.7;
    let iface = InterfaceData::from_bulk(&bulk, 0.0, 0.0);
    let r = jump_residuals_uncoupled(&bulk, &iface, &inner, &t, &identity_mobility(1)).unwrap();
    assert_eq!(r.i3_tangential, 0.0);
}

#[test]
fn two_layer_capacitor_matches_displacement_and_potential() {
    let t = thermo(&[1.0, 1.0], &[0, 0], 1.0);
    let left = vec![0.5, 0.5];
    let inner = solve_inner_profiles(&t, &left, 0.0, &InnerSolverOptions::default()).unwrap();
    let e_vapor = 2.5;
    let mut bulk = BulkState {
        minus: BulkSide::at_rest(left.clone()),
        plus: BulkSide::at_rest(left.clone()),
    };
    // (1 + s_V) E⁻ = (1 + s_L) E⁺ with s_V = 0, s_L = 4
    bulk.minus.grad_phi_normal = e_vapor;
    bulk.plus.grad_phi_normal = e_vapor / 5.0;
    bulk.minus.phi = 0.8;
    bulk.plus.phi = 0.8;
    let iface = InterfaceData::from_bulk(&bulk, 0.0, 0.0);
    let r = jump_residuals_uncoupled(&bulk, &iface, &inner, &t, &identity_mobility(1)).unwrap();
    assert!(r.i5.abs() < 1e-14);
    assert_eq!(r.i6, 0.0);

    bulk.plus.phi = 0.9;
    bulk.plus.grad_phi_normal = e_vapor;
    let r = jump_residuals_uncoupled(&bulk, &iface, &inner, &t, &identity_mobility(1)).unwrap();
    assert!((r.i6 - 0.1).abs() < 1e-14);
    assert!((r.i5 - 0.5 * 4.0 * e_vapor).abs() < 1e-12);
}

#[test]
fn uncharged_coupled_and_uncoupled_residuals_agree() {
    let t = thermo(&[1.0, 2.0], &[0, 0], 1.0);
    let left = vec![0.3, 0.9];
    let inner = solve_inner_profiles(&t, &left, 0.02, &InnerSolverOptions::default()).unwrap();
    let mut bulk = BulkState {
        minus: BulkSide::at_rest(inner.left_state.clone()),
        plus: BulkSide::at_rest(inner.right_state.clone()),
    };
    bulk.minus.normal_velocity = 0.02 / bulk.minus.total_density();
    bulk.plus.normal_velocity = 0.02 / bulk.plus.total_density();
    bulk.minus.grad_mu_normal = vec![0.1, -0.2];
    let iface = InterfaceData::from_bulk(&bulk, 0.0, 0.0);
    let m = identity_mobility(1);
    let u = jump_residuals_uncoupled(&bulk, &iface, &inner, &t, &m).unwrap();
    let c = jump_residuals_coupled(&bulk, &iface, &inner, &t, &m, 0.0).unwrap();
    assert_eq!(u.i1, c.i1);
    assert_eq!(u.i2, c.i2);
    assert_eq!(u.i2b, c.i2b);
    assert_eq!(u.i3_normal, c.i3_normal);
    assert_eq!(u.i4, c.i4);
    assert!(u.i4.abs() < 1e-6);
    assert_eq!(c.b5, Some([0.0, 0.0]));
}

#[test]
fn layer_charge_matches_the_poisson_oracle() {
    let nodes = 2001;
    let l = 10.0;
    let dz = 2.0 * l / nodes as f64;
    let z: Vec<f64> = (0..nodes).map(|k| -l + (k as f64 + 0.5) * dz).collect();
    let charge: Vec<f64> = z
        .iter()
        .map(|&s| 0.3 * (-s * s).exp() - 0.1 * (-(s - 1.0).powi(2)).exp())
        .collect();
    let susceptibility: Vec<f64> = z.iter().map(|&s| 2.0 + 2.0 * (s).tanh()).collect();
    let eps0 = 0.5;
    let jump = inner_poisson_displacement_jump(&z, &charge, &susceptibility, eps0).unwrap();
    let pi_sqrt = std::f64::consts::PI.sqrt();
    let total = 0.3 * pi_sqrt - 0.1 * pi_sqrt;
    assert!((jump + total).abs() < 1e-8, "{jump} vs {}", -total);

    let t = thermo(&[1.0, 2.0, 3.0], &[1, -1, 0], 1.0);
    let left = vec![0.2, 0.4, 0.6];
    assert!(t.charge_balance(&left).abs() < 1e-15);
    let inner = solve_inner_profiles(&t, &left, 0.0, &InnerSolverOptions::default()).unwrap();
    let mut bulk = BulkState {
        minus: BulkSide::at_rest(left.clone()),
        plus: BulkSide::at_rest(inner.right_state.clone()),
    };
    let d_minus = 0.4;
    bulk.minus.grad_phi_normal = d_minus / (t.susceptibility.vacuum_permittivity * 1.0);
    bulk.plus.grad_phi_normal = (d_minus + jump) / (t.susceptibility.vacuum_permittivity * 5.0);
    let iface = InterfaceData::from_bulk(&bulk, 0.0, 0.0);
    let r = jump_residuals_coupled(&bulk, &iface, &inner, &t, &identity_mobility(2), total).unwrap();
    assert!(r.i5.abs() < 1e-8, "{}", r.i5);
    let b5 = r.b5.unwrap();
    assert!(b5[0].abs() < 1e-15);
}

#[test]
fn interface_is_located_by_linear_interpolation() {
    let xs = [0.0, 1.0, 2.0, 3.0];
    let chi = [-1.0, -0.5, 0.5, 1.0];
    assert!((locate_interface(&xs, &chi).unwrap() - 1.5).abs() < 1e-15);
    assert!(matches!(locate_interface(&xs, &[1.0; 4]), Err(Error::NoInterface)));
}

#[test]
fn single_phase_study_reports_missing_interface() {
    let c = Config::for_preset(Preset::UniformEquilibrium);
    let sim = presets::simulation(&c, c.delta).unwrap();
    let err = study_member(sim, &StudyOptions::default()).unwrap_err();
    assert_eq!(err.to_string(), "no interface in domain");
}

#[test]
fn empirical_orders_of_a_power_law() {
    let d = [0.1, 0.05, 0.025];
    let r: Vec<f64> = d.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
    for p in empirical_orders(&d, &r) {
        assert!((p - 2.0).abs() < 1e-12);
    }
}
