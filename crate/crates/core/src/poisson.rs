//! Variable-coefficient electrostatics: `div(ε ∇φ) + n^F = 0` on the cell
//! grid, with harmonic-mean face permittivities and a direct tridiagonal solve.

use crate::error::{Error, Result};
use crate::grid::{Boundary, Field, Grid};
use crate::linalg::solve_tridiagonal;

const COMPATIBILITY_TOLERANCE: f64 = 1e-8;

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

fn check_inputs(grid: &Grid, permittivity: &[f64], rhs: &[f64]) -> Result<()> {
    let n = grid.cells();
    for (what, len) in [("permittivity", permittivity.len()), ("charge density", rhs.len())] {
        if len != n {
            return Err(Error::Dimension {
                what,
                expected: n,
                got: len,
            });
        }
    }
    if let Some((i, &e)) = permittivity
        .iter()
        .enumerate()
        .find(|(_, &e)| !(e > 0.0 && e.is_finite()))
    {
        return Err(Error::NonpositiveCoefficient { face: i, value: e });
    }
    Ok(())
}

/// Face permittivities: harmonic means inside, the adjacent cell value on the
/// two boundary faces.
pub fn face_permittivity(permittivity: &[f64]) -> Vec<f64> {
    let n = permittivity.len();
    let mut out = Vec::with_capacity(n + 1);
    out.push(permittivity[0]);
    out.extend(permittivity.windows(2).map(|w| harmonic(w[0], w[1])));
    out.push(permittivity[n - 1]);
    out
}

/// Solves `div(permittivity ∇φ) + rhs = 0`. For Neumann data at both ends
/// the data must be compatible and the zero-mean solution is returned.
pub fn solve_potential(grid: &Grid, permittivity: &[f64], rhs: &[f64], lo: Boundary, hi: Boundary) -> Result<Field> {
    check_inputs(grid, permittivity, rhs)?;
    let n = grid.cells();
    let h = grid.dx();
    let eps_face = face_permittivity(permittivity);

    // Rows scaled by −h²: −ε₋φ_{i−1} + (ε₋ + ε₊)φ_i − ε₊φ_{i+1} = h² rhs_i.
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut b: Vec<f64> = rhs.iter().map(|r| h * h * r).collect();
    for i in 0..n {
        if i > 0 {
            lower[i] = -eps_face[i];
            diag[i] += eps_face[i];
        }
        if i + 1 < n {
            upper[i] = -eps_face[i + 1];
            diag[i] += eps_face[i + 1];
        }
    }
    let pure_neumann = !matches!(lo, Boundary::Dirichlet(_)) && !matches!(hi, Boundary::Dirichlet(_));
    let flux_lo = match lo {
        Boundary::Dirichlet(g) => {
            diag[0] += 2.0 * eps_face[0];
            b[0] += 2.0 * eps_face[0] * g;
            None
        }
        Boundary::Neumann(s) => Some(eps_face[0] * s),
        Boundary::NoFlux => Some(0.0),
    };
    if let Some(f) = flux_lo {
        b[0] -= h * f;
    }
    let flux_hi = match hi {
        Boundary::Dirichlet(g) => {
            diag[n - 1] += 2.0 * eps_face[n];
            b[n - 1] += 2.0 * eps_face[n] * g;
            None
        }
        Boundary::Neumann(s) => Some(eps_face[n] * s),
        Boundary::NoFlux => Some(0.0),
    };
    if let Some(f) = flux_hi {
        b[n - 1] += h * f;
    }

    let phi = if pure_neumann {
        let (f_lo, f_hi) = (flux_lo.unwrap_or(0.0), flux_hi.unwrap_or(0.0));
        let source = h * rhs.iter().sum::<f64>();
        let imbalance = f_hi - f_lo + source;
        let scale = f_hi.abs() + f_lo.abs() + h * rhs.iter().map(|r| r.abs()).sum::<f64>();
        if imbalance.abs() > COMPATIBILITY_TOLERANCE * scale.max(1.0) {
            return Err(Error::IncompatibleNeumann { imbalance });
        }
        // Pin cell 0; its equation follows from compatibility.
        diag[0] = 1.0;
        upper[0] = 0.0;
        b[0] = 0.0;
        lower[1] = 0.0;
        let mut phi = solve_tridiagonal(&lower, &diag, &upper, &b)?;
        let mean = phi.iter().sum::<f64>() / n as f64;
        phi.iter_mut().for_each(|p| *p -= mean);
        phi
    } else {
        solve_tridiagonal(&lower, &diag, &upper, &b)?
    };
    Ok(Field::new(phi, lo, hi))
}

/// Face displacement fluxes `ε_face ∂φ/∂x` consistent with [`solve_potential`].
pub fn displacement_flux(grid: &Grid, permittivity: &[f64], phi: &Field) -> Vec<f64> {
    let n = grid.cells();
    let h = grid.dx();
    let eps_face = face_permittivity(permittivity);
    let v = &phi.values;
    let mut flux = vec![0.0; n + 1];
    for i in 1..n {
        flux[i] = eps_face[i] * (v[i] - v[i - 1]) / h;
    }
    flux[0] = match phi.lo {
        Boundary::Dirichlet(g) => eps_face[0] * (v[0] - g) / (0.5 * h),
        Boundary::Neumann(s) => eps_face[0] * s,
        Boundary::NoFlux => 0.0,
    };
    flux[n] = match phi.hi {
        Boundary::Dirichlet(g) => eps_face[n] * (g - v[n - 1]) / (0.5 * h),
        Boundary::Neumann(s) => eps_face[n] * s,
        Boundary::NoFlux => 0.0,
    };
    flux
}

/// Cellwise residual `div(ε∇φ) + rhs`.
pub fn residual(grid: &Grid, permittivity: &[f64], rhs: &[f64], phi: &Field) -> Vec<f64> {
    let flux = displacement_flux(grid, permittivity, phi);
    let h = grid.dx();
    flux.windows(2).zip(rhs).map(|(w, r)| (w[1] - w[0]) / h + r).collect()
}
