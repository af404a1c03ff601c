//! Leading-order inner density profiles `R_{α,0}(z)` across a planar layer
//! carrying the mass flux `j₀`.
//!
//! At every node the `N` algebraic equations
//!
//! ```text
//! μ_α(R, X₀) − μ_N(R, X₀) = μ_α^− − μ_N^−                       (α < N)
//! μ_N(R, X₀) + j₀²/(2 D(R)) + (j₀/τ) I(z) = μ_N^− + j₀²/(2 (ρ^−)²)
//! I(z) = ∫_{−L}^{z} X₀,z² / Σ_α R_α dz
//! ```
//!
//! are solved by a damped Newton iteration marching in `z`, while the
//! integral `I` is updated by an outer Picard iteration. `D(R)` is
//! `(Σ_α R_α)²` by default or `Σ_α R_α²` (see [`FluxDenominator`]).

use super::profile::{simpson, x0, x0_z, z_grid, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::thermo::MixtureThermo;

/// Form of the kinetic term `j₀²/(2 D)` in the `μ_N` equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxDenominator {
    /// `D = (Σ_α R_α)²`, consistent with `[[j₀²/(2ρ₀²) + μ_N]]`.
    #[default]
    SquaredSum,
    /// `D = Σ_α R_α²`.
    SumOfSquares,
}

impl FluxDenominator {
    pub fn name(self) -> &'static str {
        match self {
            FluxDenominator::SquaredSum => "squared-sum",
            FluxDenominator::SumOfSquares => "sum-of-squares",
        }
    }

    fn value(self, r: &[f64]) -> f64 {
        match self {
            FluxDenominator::SquaredSum => {
                let s: f64 = r.iter().sum();
                s * s
            }
            FluxDenominator::SumOfSquares => r.iter().map(|x| x * x).sum(),
        }
    }

    fn gradient(self, r: &[f64], beta: usize) -> f64 {
        match self {
            FluxDenominator::SquaredSum => 2.0 * r.iter().sum::<f64>(),
            FluxDenominator::SumOfSquares => 2.0 * r[beta],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolverOptions {
    pub nodes: usize,
    pub denominator: FluxDenominator,
    /// Newton tolerance on the max-norm of the nodal residual.
    pub newton_tolerance: f64,
    pub newton_max_iterations: usize,
    /// Picard tolerance on the max change of successive profiles.
    pub picard_tolerance: f64,
    pub picard_max_iterations: usize,
}

impl Default for InnerSolverOptions {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            denominator: FluxDenominator::SquaredSum,
            newton_tolerance: 1e-12,
            newton_max_iterations: 60,
            picard_tolerance: 1e-10,
            picard_max_iterations: 200,
        }
    }
}

/// Converged inner layer.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProfileSolution {
    pub gamma: f64,
    pub tau: f64,
    pub j0: f64,
    pub denominator: FluxDenominator,
    pub z: Vec<f64>,
    pub x0: Vec<f64>,
    /// `rho[α][node]`
    pub rho: Vec<Vec<f64>>,
    /// `∫ X₀,z² dz` on the z-grid.
    pub surface_tension: f64,
    /// `∫ X₀,z² / R₀ dz` on the z-grid.
    pub flux_integral: f64,
    /// State at `z = −L`.
    pub left_state: Vec<f64>,
    /// State at `z = +L`.
    pub right_state: Vec<f64>,
    pub picard_iterations: usize,
    /// Largest nodal residual of the final sweep.
    pub max_residual: f64,
}

impl InnerProfileSolution {
    pub fn nodes(&self) -> usize {
        self.z.len()
    }

    pub fn total_density(&self, k: usize) -> f64 {
        self.rho.iter().map(|r| r[k]).sum()
    }

    pub fn node_state(&self, k: usize) -> Vec<f64> {
        self.rho.iter().map(|r| r[k]).collect()
    }
}

struct NodeProblem<'a> {
    thermo: &'a MixtureThermo,
    chi: f64,
    /// Targets `μ_α^− − μ_N^−` for α < N.
    differences: &'a [f64],
    /// Right-hand side of the `μ_N` equation minus `(j₀/τ) I(z)`.
    target: f64,
    j0: f64,
    denominator: FluxDenominator,
}

impl NodeProblem<'_> {
    fn residual(&self, r: &[f64]) -> Result<Vec<f64>> {
        let nsp = r.len();
        let mu = self.thermo.chemical_potentials(r, self.chi)?;
        let mut f = vec![0.0; nsp];
        for a in 0..nsp - 1 {
            f[a] = mu[a] - mu[nsp - 1] - self.differences[a];
        }
        f[nsp - 1] = mu[nsp - 1] + self.j0 * self.j0 / (2.0 * self.denominator.value(r)) - self.target;
        Ok(f)
    }

    fn jacobian(&self, r: &[f64]) -> Result<Vec<f64>> {
        let nsp = r.len();
        let hess = self.thermo.chemical_potential_jacobian(r, self.chi)?;
        let last = nsp - 1;
        let mut jac = vec![0.0; nsp * nsp];
        for b in 0..nsp {
            for a in 0..last {
                jac[a * nsp + b] = hess[a * nsp + b] - hess[last * nsp + b];
            }
            let d = self.denominator.value(r);
            jac[last * nsp + b] =
                hess[last * nsp + b] - self.j0 * self.j0 * self.denominator.gradient(r, b) / (2.0 * d * d);
        }
        Ok(jac)
    }

    fn solve(&self, guess: &[f64], node: usize, opts: &InnerSolverOptions) -> Result<(Vec<f64>, f64)> {
        let mut r = guess.to_vec();
        let mut f = self.residual(&r)?;
        let mut norm = max_norm(&f);
        for _ in 0..opts.newton_max_iterations {
            if norm < opts.newton_tolerance {
                return Ok((r, norm));
            }
            let jac = self.jacobian(&r)?;
            let neg: Vec<f64> = f.iter().map(|v| -v).collect();
            let step = solve_dense(jac, neg)?;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = r.iter().zip(&step).map(|(x, s)| x + lambda * s).collect();
                if trial.iter().all(|&x| x > 0.0) {
                    let ft = self.residual(&trial)?;
                    let nt = max_norm(&ft);
                    if nt < norm || nt < opts.newton_tolerance {
                        r = trial;
                        f = ft;
                        norm = nt;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if norm < opts.newton_tolerance {
            Ok((r, norm))
        } else {
            Err(Error::NewtonDivergence { node, residual: norm })
        }
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Cumulative trapezoidal integral of `X₀,z² / Σ R` from the left end.
fn cumulative_flux_integral(z: &[f64], xz2: &[f64], rho: &[Vec<f64>]) -> Vec<f64> {
    let n = z.len();
    let total = |k: usize| rho.iter().map(|r| r[k]).sum::<f64>();
    let mut out = vec![0.0; n];
    for k in 1..n {
        let a = xz2[k - 1] / total(k - 1);
        let b = xz2[k] / total(k);
        out[k] = out[k - 1] + 0.5 * (z[k] - z[k - 1]) * (a + b);
    }
    out
}

/// Solves for the inner density profiles given the vapor-side state `ρ^−`
/// and the mass flux `j₀`.
pub fn solve_inner_profiles(
    thermo: &MixtureThermo,
    left: &[f64],
    j0: f64,
    options: &InnerSolverOptions,
) -> Result<InnerProfileSolution> {
    let nsp = thermo.n_species();
    if left.len() != nsp {
        return Err(Error::Dimension {
            what: "left state",
            expected: nsp,
            got: left.len(),
        });
    }
    if let Some((species, &value)) = left.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::NonpositiveDensity { species, value });
    }
    if options.nodes < 3 || options.nodes.is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "inner grid needs an odd node count >= 3".into(),
        ));
    }
    let gamma = thermo.double_well.gamma;
    let tau = thermo.double_well.tau;
    let z = z_grid(gamma, options.nodes);
    let chi: Vec<f64> = z.iter().map(|&s| x0(gamma, s)).collect();
    let xz2: Vec<f64> = z
        .iter()
        .map(|&s| {
            let d = x0_z(gamma, s);
            d * d
        })
        .collect();

    let mu_left = thermo.chemical_potentials(left, -1.0)?;
    let differences: Vec<f64> = (0..nsp - 1).map(|a| mu_left[a] - mu_left[nsp - 1]).collect();
    let rho_left: f64 = left.iter().sum();
    let base_target = mu_left[nsp - 1] + j0 * j0 / (2.0 * rho_left * rho_left);

    let march = |j: f64, integral: &[f64], start: &[Vec<f64>]| -> Result<(Vec<Vec<f64>>, f64)> {
        let mut rho = vec![vec![0.0; z.len()]; nsp];
        let mut guess = left.to_vec();
        let mut worst = 0.0f64;
        for k in 0..z.len() {
            if !start.is_empty() {
                for a in 0..nsp {
                    guess[a] = start[a][k];
                }
            }
            let problem = NodeProblem {
                thermo,
                chi: chi[k],
                differences: &differences,
                target: base_target - j / tau * integral[k],
                j0: j,
                denominator: options.denominator,
            };
            let (r, res) = problem.solve(&guess, k, options)?;
            worst = worst.max(res);
            for a in 0..nsp {
                rho[a][k] = r[a];
            }
            guess = r;
        }
        Ok((rho, worst))
    };

    let zeros = vec![0.0; z.len()];
    let (mut rho, mut worst) = march(0.0, &zeros, &[])?;
    let mut iterations = 0;
    if j0 != 0.0 {
        let mut change = f64::INFINITY;
        while change >= options.picard_tolerance {
            if iterations == options.picard_max_iterations {
                return Err(Error::PicardDivergence { iterations, change });
            }
            let integral = cumulative_flux_integral(&z, &xz2, &rho);
            let (next, w) = march(j0, &integral, &rho)?;
            change = rho
                .iter()
                .zip(&next)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max);
            rho = next;
            worst = w;
            iterations += 1;
        }
    }

    let step = z[1] - z[0];
    let total: Vec<f64> = (0..z.len()).map(|k| rho.iter().map(|r| r[k]).sum()).collect();
    let flux_integrand: Vec<f64> = xz2.iter().zip(&total).map(|(x, r)| x / r).collect();
    let last = z.len() - 1;
    Ok(InnerProfileSolution {
        gamma,
        tau,
        j0,
        denominator: options.denominator,
        surface_tension: simpson(&xz2, step),
        flux_integral: simpson(&flux_integrand, step),
        left_state: rho.iter().map(|r| r[0]).collect(),
        right_state: rho.iter().map(|r| r[last]).collect(),
        z,
        x0: chi,
        rho,
        picard_iterations: iterations,
        max_residual: worst,
    })
}

/// Largest `|j₀| ≤ j_max` (to `tolerance`) for which the inner solve
/// converges, found by bisection on the sign given by `j_max`.
pub fn largest_convergent_flux(
    thermo: &MixtureThermo,
    left: &[f64],
    j_max: f64,
    tolerance: f64,
    options: &InnerSolverOptions,
) -> Result<f64> {
    solve_inner_profiles(thermo, left, 0.0, options)?;
    if solve_inner_profiles(thermo, left, j_max, options).is_ok() {
        return Ok(j_max.abs());
    }
    let (mut lo, mut hi) = (0.0, j_max.abs());
    let sign = j_max.signum();
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if solve_inner_profiles(thermo, left, sign * mid, options).is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
