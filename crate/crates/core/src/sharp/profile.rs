//! Leading-order phase profile `X₀` of the inner layer: the monotone
//! heteroclinic of `W′(X) − γX″ = 0` with `X(0) = 0`.

use crate::error::{Error, Result};
use crate::thermo::double_well_eval;

/// Default number of nodes of the inner z-grid.
pub const DEFAULT_NODES: usize = 4001;

/// Half width `L = max(10, 12√(γ/2))` of the truncated inner domain.
pub fn domain_half_width(gamma: f64) -> f64 {
    (12.0 * (gamma / 2.0).sqrt()).max(10.0)
}

/// Inverse width `√(2/γ)` of the tanh profile.
pub fn profile_slope(gamma: f64) -> f64 {
    (2.0 / gamma).sqrt()
}

/// `X₀(z) = tanh(√(2/γ) z)`.
pub fn x0(gamma: f64, z: f64) -> f64 {
    (profile_slope(gamma) * z).tanh()
}

/// `X₀′(z) = √(2/γ) (1 − X₀²)`.
pub fn x0_z(gamma: f64, z: f64) -> f64 {
    let x = x0(gamma, z);
    profile_slope(gamma) * (1.0 - x * x)
}

/// Uniform z-grid with `nodes` points on `[−L, L]`.
pub fn z_grid(gamma: f64, nodes: usize) -> Vec<f64> {
    let l = domain_half_width(gamma);
    let step = 2.0 * l / (nodes - 1) as f64;
    (0..nodes).map(|k| -l + step * k as f64).collect()
}

/// Sampled phase profile with its verified ODE residual.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub gamma: f64,
    pub z: Vec<f64>,
    pub x0: Vec<f64>,
    /// `max |W′(X₀) − γ X₀,zz|` over the interior nodes, with sixth-order
    /// central differences for `X₀,zz`.
    pub residual: f64,
    /// `max |−W(X₀) + (γ/2) X₀,z²|` with the analytic derivative.
    pub first_integral_residual: f64,
}

const D2_STENCIL: [f64; 4] = [-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];

/// Sixth-order second derivative at the nodes `3..n−3`; zero elsewhere.
pub fn second_difference_6(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 7 {
        return out;
    }
    let h2 = step * step;
    for k in 3..n - 3 {
        let mut acc = D2_STENCIL[0] * values[k];
        for (j, c) in D2_STENCIL.iter().enumerate().skip(1) {
            acc += c * (values[k - j] + values[k + j]);
        }
        out[k] = acc / h2;
    }
    out
}

/// ODE residual of arbitrary samples `x` on a uniform grid (interior nodes).
pub fn ode_residual(gamma: f64, x: &[f64], step: f64) -> f64 {
    let d2 = second_difference_6(x, step);
    (3..x.len().saturating_sub(3))
        .map(|k| (double_well_eval(x[k]).dw - gamma * d2[k]).abs())
        .fold(0.0, f64::max)
}

/// Samples `X₀` on `nodes` points and verifies the profile equation.
pub fn phase_profile(gamma: f64, nodes: usize) -> Result<PhaseProfile> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::config("double_well.gamma", "must be > 0"));
    }
    if nodes < 7 {
        return Err(Error::InvalidParameter("phase profile needs at least 7 nodes".into()));
    }
    let z = z_grid(gamma, nodes);
    let x: Vec<f64> = z.iter().map(|&s| x0(gamma, s)).collect();
    let step = z[1] - z[0];
    let residual = ode_residual(gamma, &x, step);
    let first_integral_residual = z
        .iter()
        .map(|&s| {
            let d = x0_z(gamma, s);
            (0.5 * gamma * d * d - double_well_eval(x0(gamma, s)).w).abs()
        })
        .fold(0.0, f64::max);
    Ok(PhaseProfile {
        gamma,
        z,
        x0: x,
        residual,
        first_integral_residual,
    })
}

/// Closed form `(4/3)√(2/γ)` of `∫ X₀,z² dz`.
pub fn surface_tension_closed_form(gamma: f64) -> f64 {
    4.0 / 3.0 * profile_slope(gamma)
}

/// Composite Simpson rule on a uniform grid with an odd number of nodes.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd node count >= 3");
    let mut acc = values[0] + values[n - 1];
    for (k, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * step / 3.0
}

/// `I_σ = ∫_{−L}^{L} X₀,z² dz` by composite Simpson quadrature.
pub fn surface_tension_integral(gamma: f64) -> f64 {
    surface_tension_integral_on(gamma, domain_half_width(gamma), 20_001)
}

/// `∫_{−l}^{l} X₀,z² dz` with `nodes` Simpson nodes (odd).
pub fn surface_tension_integral_on(gamma: f64, l: f64, nodes: usize) -> f64 {
    let step = 2.0 * l / (nodes - 1) as f64;
    let f: Vec<f64> = (0..nodes)
        .map(|k| {
            let d = x0_z(gamma, -l + step * k as f64);
            d * d
        })
        .collect();
    simpson(&f, step)
}
