//! Residuals of the leading-order interface conditions of the uncoupled and
//! coupled sharp-interface limits, for a planar or curved interface with
//! normal `ν` pointing from the vapor (−) into the liquid (+) side.
//!
//! Jumps are `[[f]] = f^+ − f^−`.

use super::inner::InnerProfileSolution;
use super::profile::simpson;
use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid};
use crate::poisson;
use crate::thermo::MixtureThermo;
use crate::transport::{diffusion_driving_force, diffusion_fluxes, MobilityMatrix};

/// One-sided bulk traces at the interface.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkSide {
    pub rho: Vec<f64>,
    /// `v·ν`
    pub normal_velocity: f64,
    /// Tangential velocity component (0 in 1D).
    pub tangential_velocity: f64,
    pub phi: f64,
    /// `∇φ·ν`
    pub grad_phi_normal: f64,
    /// Tangential part of `∇φ` (0 in 1D).
    pub grad_phi_tangential: f64,
    /// `∇μ_α·ν` for all `N` species.
    pub grad_mu_normal: Vec<f64>,
}

impl BulkSide {
    /// Quiescent side with the given densities and no fields.
    pub fn at_rest(rho: Vec<f64>) -> Self {
        let n = rho.len();
        Self {
            rho,
            normal_velocity: 0.0,
            tangential_velocity: 0.0,
            phi: 0.0,
            grad_phi_normal: 0.0,
            grad_phi_tangential: 0.0,
            grad_mu_normal: vec![0.0; n],
        }
    }

    pub fn total_density(&self) -> f64 {
        self.rho.iter().sum()
    }
}

/// Bulk traces on the vapor (`minus`) and liquid (`plus`) sides.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkState {
    pub minus: BulkSide,
    pub plus: BulkSide,
}

impl BulkState {
    pub fn validate(&self, n_species: usize) -> Result<()> {
        for side in [&self.minus, &self.plus] {
            for (what, len) in [
                ("bulk densities", side.rho.len()),
                ("bulk ∇μ", side.grad_mu_normal.len()),
            ] {
                if len != n_species {
                    return Err(Error::Dimension {
                        what,
                        expected: n_species,
                        got: len,
                    });
                }
            }
            if let Some((species, &value)) = side.rho.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
                return Err(Error::NonpositiveDensity { species, value });
            }
        }
        Ok(())
    }
}

/// Interface kinematics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceData {
    /// Normal speed `w_ν`.
    pub normal_speed: f64,
    /// Mean curvature `κ` (0 for planar interfaces).
    pub curvature: f64,
    /// Mass flux `j₀ = ρ^±(v^±·ν − w_ν)`.
    pub mass_flux: f64,
}

impl InterfaceData {
    /// Builds the data from a bulk pair; `j₀` is the mean of the two
    /// one-sided fluxes.
    pub fn from_bulk(bulk: &BulkState, normal_speed: f64, curvature: f64) -> Self {
        let jm = bulk.minus.total_density() * (bulk.minus.normal_velocity - normal_speed);
        let jp = bulk.plus.total_density() * (bulk.plus.normal_velocity - normal_speed);
        Self {
            normal_speed,
            curvature,
            mass_flux: 0.5 * (jm + jp),
        }
    }

    /// As [`InterfaceData::from_bulk`], but fails when the one-sided fluxes
    /// differ by more than `tolerance` (relative to their magnitude, floored at 1).
    pub fn from_bulk_checked(bulk: &BulkState, normal_speed: f64, curvature: f64, tolerance: f64) -> Result<Self> {
        let jm = bulk.minus.total_density() * (bulk.minus.normal_velocity - normal_speed);
        let jp = bulk.plus.total_density() * (bulk.plus.normal_velocity - normal_speed);
        if (jm - jp).abs() > tolerance * jm.abs().max(jp.abs()).max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "one-sided mass fluxes differ: {jm:e} vs {jp:e}"
            )));
        }
        Ok(Self::from_bulk(bulk, normal_speed, curvature))
    }
}

/// Residual of each interface condition.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpResiduals {
    /// `[[μ_α − μ_N]]`, α < N.
    pub i1: Vec<f64>,
    /// `[[ρ(v·ν − w_ν)]]`
    pub i2: f64,
    /// `[[ρ_α(v·ν − w_ν) + J_α·ν]]`, α < N.
    pub i2b: Vec<f64>,
    /// Normal momentum balance minus `γκI_σ`.
    pub i3_normal: f64,
    /// `j₀ [[v_t]]`
    pub i3_tangential: f64,
    /// `[[j₀²/(2ρ²) + μ_N]] + (j₀/τ) I_j`
    pub i4: f64,
    /// Displacement jump (minus the layer charge in the coupled regime).
    pub i5: f64,
    /// `[[φ]]`
    pub i6: f64,
    /// `[[∇φ − (∇φ·ν)ν]]`
    pub i6b: f64,
    /// Bulk electroneutrality `Σ(z_α/m_α)ρ_α` on the (−, +) sides; coupled regime only.
    pub b5: Option<[f64; 2]>,
}

impl JumpResiduals {
    pub fn i1_norm(&self) -> f64 {
        self.i1.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn i2b_norm(&self) -> f64 {
        self.i2b.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Labelled scalar view, one entry per condition (vectors reduced to max-norms).
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("i1", self.i1_norm()),
            ("i2", self.i2.abs()),
            ("i2b", self.i2b_norm()),
            ("i3", self.i3_normal.abs()),
            ("i3b", self.i3_tangential.abs()),
            ("i4", self.i4.abs()),
            ("i5", self.i5.abs()),
            ("i6", self.i6.abs()),
            ("i6b", self.i6b.abs()),
        ];
        if let Some(b) = self.b5 {
            out.push(("b5", b[0].abs().max(b[1].abs())));
        }
        out
    }
}

struct SideQuantities {
    mu: Vec<f64>,
    pressure: f64,
    susceptibility: f64,
    rho: f64,
    relative_velocity: f64,
    fluxes: Vec<f64>,
}

fn side_quantities(
    side: &BulkSide,
    chi: f64,
    iface: &InterfaceData,
    thermo: &MixtureThermo,
    mobility: &MobilityMatrix,
) -> Result<SideQuantities> {
    let mu = thermo.chemical_potentials(&side.rho, chi)?;
    let pressure = thermo.pressure(&side.rho, chi)?;
    let p = diffusion_driving_force(
        &side.grad_mu_normal,
        side.grad_phi_normal,
        &thermo.species,
        thermo.elementary_charge,
    );
    let fluxes = diffusion_fluxes(mobility, &p);
    Ok(SideQuantities {
        mu,
        pressure,
        susceptibility: thermo.susceptibility(chi).0,
        rho: side.total_density(),
        relative_velocity: side.normal_velocity - iface.normal_speed,
        fluxes,
    })
}

fn common_residuals(
    bulk: &BulkState,
    iface: &InterfaceData,
    inner: &InnerProfileSolution,
    thermo: &MixtureThermo,
    mobility: &MobilityMatrix,
    maxwell: bool,
) -> Result<(JumpResiduals, SideQuantities, SideQuantities)> {
    let nsp = thermo.n_species();
    bulk.validate(nsp)?;
    if mobility.dim() + 1 != nsp {
        return Err(Error::Dimension {
            what: "mobility matrix (N−1)",
            expected: nsp - 1,
            got: mobility.dim(),
        });
    }
    let m = side_quantities(&bulk.minus, -1.0, iface, thermo, mobility)?;
    let p = side_quantities(&bulk.plus, 1.0, iface, thermo, mobility)?;
    let last = nsp - 1;
    let j0 = iface.mass_flux;
    let eps0 = thermo.susceptibility.vacuum_permittivity;

    let i1 = (0..last)
        .map(|a| (p.mu[a] - p.mu[last]) - (m.mu[a] - m.mu[last]))
        .collect();
    let i2 = p.rho * p.relative_velocity - m.rho * m.relative_velocity;
    let i2b = (0..last)
        .map(|a| {
            let fp = bulk.plus.rho[a] * p.relative_velocity + p.fluxes[a];
            let fm = bulk.minus.rho[a] * m.relative_velocity + m.fluxes[a];
            fp - fm
        })
        .collect();

    let normal_stress = |side: &BulkSide, q: &SideQuantities| {
        let mut value = j0 * side.normal_velocity + q.pressure;
        if maxwell {
            let gn = side.grad_phi_normal;
            let g2 = gn * gn + side.grad_phi_tangential * side.grad_phi_tangential;
            value += eps0 * (1.0 + q.susceptibility) * (0.5 * g2 - gn * gn);
        }
        value
    };
    let gamma = thermo.double_well.gamma;
    let i3_normal = normal_stress(&bulk.plus, &p)
        - normal_stress(&bulk.minus, &m)
        - gamma * iface.curvature * inner.surface_tension;
    let mut i3_tangential = j0 * (bulk.plus.tangential_velocity - bulk.minus.tangential_velocity);
    if maxwell {
        let t = |side: &BulkSide, q: &SideQuantities| {
            -eps0 * (1.0 + q.susceptibility) * side.grad_phi_normal * side.grad_phi_tangential
        };
        i3_tangential += t(&bulk.plus, &p) - t(&bulk.minus, &m);
    }

    let i4 = (j0 * j0 / (2.0 * p.rho * p.rho) + p.mu[last]) - (j0 * j0 / (2.0 * m.rho * m.rho) + m.mu[last])
        + j0 / thermo.double_well.tau * inner.flux_integral;
    let i5 = eps0
        * ((1.0 + p.susceptibility) * bulk.plus.grad_phi_normal
            - (1.0 + m.susceptibility) * bulk.minus.grad_phi_normal);
    let i6 = bulk.plus.phi - bulk.minus.phi;
    let i6b = bulk.plus.grad_phi_tangential - bulk.minus.grad_phi_tangential;
    Ok((
        JumpResiduals {
            i1,
            i2,
            i2b,
            i3_normal,
            i3_tangential,
            i4,
            i5,
            i6,
            i6b,
            b5: None,
        },
        m,
        p,
    ))
}

/// Residuals of the uncoupled-regime interface conditions.
pub fn jump_residuals_uncoupled(
    bulk: &BulkState,
    iface: &InterfaceData,
    inner: &InnerProfileSolution,
    thermo: &MixtureThermo,
    mobility: &MobilityMatrix,
) -> Result<JumpResiduals> {
    Ok(common_residuals(bulk, iface, inner, thermo, mobility, true)?.0)
}

/// Residuals of the coupled-regime interface conditions. `surface_charge` is
/// the layer charge `∫ n^F dz` in the stretched variable; the displacement
/// condition reads `ε₀[[(1+s)∇φ·ν]] + ∫ n^F dz = 0`.
pub fn jump_residuals_coupled(
    bulk: &BulkState,
    iface: &InterfaceData,
    inner: &InnerProfileSolution,
    thermo: &MixtureThermo,
    mobility: &MobilityMatrix,
    surface_charge: f64,
) -> Result<JumpResiduals> {
    let (mut r, _, _) = common_residuals(bulk, iface, inner, thermo, mobility, false)?;
    r.i5 += surface_charge;
    r.b5 = Some([
        thermo.charge_balance(&bulk.minus.rho),
        thermo.charge_balance(&bulk.plus.rho),
    ]);
    Ok(r)
}

/// `e₀ ∫ Σ(z_α/m_α) R_{α,0} dz` over the inner grid.
pub fn inner_surface_charge(inner: &InnerProfileSolution, thermo: &MixtureThermo) -> f64 {
    let charge: Vec<f64> = (0..inner.nodes())
        .map(|k| thermo.free_charge_density(&inner.node_state(k)))
        .collect();
    simpson(&charge, inner.z[1] - inner.z[0])
}

/// Displacement jump `ε₀[(1+s)Φ_z]_{−L}^{L}` obtained by solving
/// `ε₀ ∂_z((1+s)∂_zΦ) + n^F = 0` across a layer of cells with centers `z`.
pub fn inner_poisson_displacement_jump(
    z: &[f64],
    charge: &[f64],
    susceptibility: &[f64],
    vacuum_permittivity: f64,
) -> Result<f64> {
    let n = z.len();
    let dz = z[1] - z[0];
    let grid = Grid::new(n, z[0] - 0.5 * dz, z[n - 1] + 0.5 * dz)?;
    let perm: Vec<f64> = susceptibility.iter().map(|s| vacuum_permittivity * (1.0 + s)).collect();
    let phi = poisson::solve_potential(&grid, &perm, charge, Boundary::Dirichlet(0.0), Boundary::Dirichlet(0.0))?;
    let d = poisson::displacement_flux(&grid, &perm, &phi);
    Ok(d[n] - d[0])
}
