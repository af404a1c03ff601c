//! Material model: species data, pure-phase free energies, the double-well
//! and interpolation functions, and the quantities derived from the bulk
//! free energy density `ρf(ρ_1, …, ρ_N, χ)`.
//!
//! All quantities are nondimensional. Each pure phase combines an isotropic
//! elastic response with ideal entropy of mixing:
//!
//! ```text
//! ρψ_P = Σ ρ_α ψ_α^R + (K_P − p^R)(1 − n/n^R) + K_P (n/n^R) ln(n/n^R)
//!        + kT Σ n_α ln(n_α / n),           n_α = ρ_α / m_α,  n = Σ n_α
//! ```
//!
//! and `ρf = h(χ) ρψ_L + (1 − h(χ)) ρψ_V`.

use crate::error::{Error, Result};

/// Pure phase selector; `χ = +1` is liquid, `χ = −1` is vapor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Liquid,
    Vapor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSpec {
    pub mass: f64,
    pub charge_number: i32,
    pub reference_energy: f64,
}

impl SpeciesSpec {
    pub fn new(mass: f64, charge_number: i32, reference_energy: f64) -> Self {
        Self {
            mass,
            charge_number,
            reference_energy,
        }
    }

    /// Charge per unit mass, `z_α / m_α`.
    pub fn specific_charge(&self) -> f64 {
        f64::from(self.charge_number) / self.mass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEnergyParams {
    pub bulk_modulus_liquid: f64,
    pub bulk_modulus_vapor: f64,
    pub reference_number_density: f64,
    pub reference_pressure: f64,
    pub thermal_energy: f64,
}

impl PhaseEnergyParams {
    pub fn bulk_modulus(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Liquid => self.bulk_modulus_liquid,
            Phase::Vapor => self.bulk_modulus_vapor,
        }
    }
}

/// Value and first two derivatives of the quartic `W(χ) = (χ−1)²(χ+1)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellValue {
    pub w: f64,
    pub dw: f64,
    pub d2w: f64,
}

pub fn double_well_eval(chi: f64) -> WellValue {
    let q = chi * chi - 1.0;
    WellValue {
        w: q * q,
        dw: 4.0 * chi * q,
        d2w: 12.0 * chi * chi - 4.0,
    }
}

/// Double-well energy together with the gradient coefficient `γ` and the
/// phase-field relaxation rate `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleWell {
    pub gamma: f64,
    pub tau: f64,
}

impl DoubleWell {
    pub fn eval(&self, chi: f64) -> WellValue {
        double_well_eval(chi)
    }
}

/// Clamped quintic smoothstep `h(z) = 6u⁵ − 15u⁴ + 10u³`, `u = clamp((z+1)/2, 0, 1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Interpolant;

impl Interpolant {
    /// Returns `(h, h′)`.
    pub fn eval(&self, z: f64) -> (f64, f64) {
        interp_h(z)
    }

    pub fn second_derivative(&self, z: f64) -> f64 {
        if z <= -1.0 || z >= 1.0 {
            return 0.0;
        }
        let u = 0.5 * (z + 1.0);
        15.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    }
}

/// `(h, h′)` of the quintic interpolant.
pub fn interp_h(z: f64) -> (f64, f64) {
    if z <= -1.0 {
        return (0.0, 0.0);
    }
    if z >= 1.0 {
        return (1.0, 0.0);
    }
    let u = 0.5 * (z + 1.0);
    let h = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    let dh = 15.0 * u * u * (1.0 - u) * (1.0 - u);
    (h, dh)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Susceptibility {
    pub liquid: f64,
    pub vapor: f64,
    pub vacuum_permittivity: f64,
}

impl Susceptibility {
    /// Returns `(s, s′)` with `s = h s_L + (1−h) s_V`.
    pub fn eval(&self, chi: f64) -> (f64, f64) {
        let (h, dh) = interp_h(chi);
        (
            h * self.liquid + (1.0 - h) * self.vapor,
            dh * (self.liquid - self.vapor),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureThermo {
    pub species: Vec<SpeciesSpec>,
    pub phase: PhaseEnergyParams,
    pub double_well: DoubleWell,
    pub interpolant: Interpolant,
    pub susceptibility: Susceptibility,
    pub elementary_charge: f64,
}

impl MixtureThermo {
    pub fn new(
        species: Vec<SpeciesSpec>,
        phase: PhaseEnergyParams,
        double_well: DoubleWell,
        susceptibility: Susceptibility,
        elementary_charge: f64,
    ) -> Result<Self> {
        let thermo = Self {
            species,
            phase,
            double_well,
            interpolant: Interpolant,
            susceptibility,
            elementary_charge,
        };
        thermo.validate()?;
        Ok(thermo)
    }

    fn validate(&self) -> Result<()> {
        fn positive(key: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, "must be > 0"))
            }
        }
        if self.species.is_empty() {
            return Err(Error::config("species.mass", "must list at least one species"));
        }
        for s in &self.species {
            positive("species.mass", s.mass)?;
            if !s.reference_energy.is_finite() {
                return Err(Error::config("species.psi_ref", "must be finite"));
            }
        }
        positive("phase.k_liquid", self.phase.bulk_modulus_liquid)?;
        positive("phase.k_vapor", self.phase.bulk_modulus_vapor)?;
        positive("phase.n_ref", self.phase.reference_number_density)?;
        positive("phase.kt", self.phase.thermal_energy)?;
        positive("double_well.gamma", self.double_well.gamma)?;
        positive("double_well.tau", self.double_well.tau)?;
        positive("susceptibility.eps0", self.susceptibility.vacuum_permittivity)?;
        positive("charge.e0", self.elementary_charge)?;
        if !(self.susceptibility.liquid >= 0.0) {
            return Err(Error::config("susceptibility.liquid", "must be >= 0"));
        }
        if !(self.susceptibility.vapor >= 0.0) {
            return Err(Error::config("susceptibility.vapor", "must be >= 0"));
        }
        Ok(())
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    fn check(&self, rho: &[f64]) -> Result<()> {
        if rho.len() != self.species.len() {
            return Err(Error::Dimension {
                what: "density vector",
                expected: self.species.len(),
                got: rho.len(),
            });
        }
        for (species, &value) in rho.iter().enumerate() {
            if !(value > 0.0) {
                return Err(Error::NonpositiveDensity { species, value });
            }
        }
        Ok(())
    }

    fn number_density(&self, rho: &[f64]) -> f64 {
        rho.iter().zip(&self.species).map(|(r, s)| r / s.mass).sum()
    }

    /// Bulk modulus interpolated by `h(χ)`.
    fn effective_modulus(&self, h: f64) -> f64 {
        h * self.phase.bulk_modulus_liquid + (1.0 - h) * self.phase.bulk_modulus_vapor
    }

    /// Free energy density `ρψ_L` or `ρψ_V` of a pure phase.
    pub fn phase_free_energy(&self, rho: &[f64], phase: Phase) -> Result<f64> {
        self.check(rho)?;
        Ok(self.phase_free_energy_unchecked(rho, self.phase.bulk_modulus(phase)))
    }

    fn phase_free_energy_unchecked(&self, rho: &[f64], modulus: f64) -> f64 {
        let p = &self.phase;
        let n = self.number_density(rho);
        let a = n / p.reference_number_density;
        let mut value = (modulus - p.reference_pressure) * (1.0 - a) + modulus * a * a.ln();
        for (r, s) in rho.iter().zip(&self.species) {
            let n_alpha = r / s.mass;
            value += r * s.reference_energy + p.thermal_energy * n_alpha * (n_alpha / n).ln();
        }
        value
    }

    /// `ρf = h(χ) ρψ_L + (1 − h(χ)) ρψ_V`.
    pub fn rho_f(&self, rho: &[f64], chi: f64) -> Result<f64> {
        self.check(rho)?;
        let (h, _) = interp_h(chi);
        Ok(self.phase_free_energy_unchecked(rho, self.effective_modulus(h)))
    }

    /// Chemical potentials `μ_α = ∂(ρf)/∂ρ_α`.
    pub fn chemical_potentials(&self, rho: &[f64], chi: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; rho.len()];
        self.chemical_potentials_into(rho, chi, &mut out)?;
        Ok(out)
    }

    pub fn chemical_potentials_into(&self, rho: &[f64], chi: f64, out: &mut [f64]) -> Result<()> {
        self.check(rho)?;
        let p = &self.phase;
        let (h, _) = interp_h(chi);
        let n = self.number_density(rho);
        let common = (p.reference_pressure + self.effective_modulus(h) * (n / p.reference_number_density).ln())
            / p.reference_number_density;
        for ((mu, r), s) in out.iter_mut().zip(rho).zip(&self.species) {
            let n_alpha = r / s.mass;
            *mu = s.reference_energy + (common + p.thermal_energy * (n_alpha / n).ln()) / s.mass;
        }
        Ok(())
    }

    /// Hessian `∂μ_α/∂ρ_β` (row-major, N×N, symmetric).
    pub fn chemical_potential_jacobian(&self, rho: &[f64], chi: f64) -> Result<Vec<f64>> {
        self.check(rho)?;
        let nsp = rho.len();
        let p = &self.phase;
        let (h, _) = interp_h(chi);
        let n = self.number_density(rho);
        let base = self.effective_modulus(h) / (p.reference_number_density * n) - p.thermal_energy / n;
        let mut jac = vec![0.0; nsp * nsp];
        for a in 0..nsp {
            let ma = self.species[a].mass;
            for b in 0..nsp {
                let mb = self.species[b].mass;
                let mut v = base;
                if a == b {
                    v += p.thermal_energy * ma / rho[a];
                }
                jac[a * nsp + b] = v / (ma * mb);
            }
        }
        Ok(jac)
    }

    /// `∂(ρf)/∂χ = h′(χ)(ρψ_L − ρψ_V)`.
    pub fn d_rho_f_dchi(&self, rho: &[f64], chi: f64) -> Result<f64> {
        self.check(rho)?;
        let (_, dh) = interp_h(chi);
        if dh == 0.0 {
            return Ok(0.0);
        }
        let p = &self.phase;
        let a = self.number_density(rho) / p.reference_number_density;
        let diff = (p.bulk_modulus_liquid - p.bulk_modulus_vapor) * ((1.0 - a) + a * a.ln());
        Ok(dh * diff)
    }

    pub fn susceptibility(&self, chi: f64) -> (f64, f64) {
        self.susceptibility.eval(chi)
    }

    /// Bulk Gibbs–Duhem pressure `p = −ρf + Σ ρ_α μ_α`.
    pub fn pressure(&self, rho: &[f64], chi: f64) -> Result<f64> {
        let mu = self.chemical_potentials(rho, chi)?;
        let rf = self.rho_f(rho, chi)?;
        Ok(rho.iter().zip(&mu).map(|(r, m)| r * m).sum::<f64>() - rf)
    }

    /// Squared sound speed `∂p/∂ρ` at frozen mass fractions, by central
    /// finite differences.
    pub fn sound_speed_squared(&self, rho: &[f64], chi: f64) -> Result<f64> {
        const EPS: f64 = 1e-6;
        let total: f64 = rho.iter().sum();
        let up: Vec<f64> = rho.iter().map(|r| r * (1.0 + EPS)).collect();
        let down: Vec<f64> = rho.iter().map(|r| r * (1.0 - EPS)).collect();
        let dp = self.pressure(&up, chi)? - self.pressure(&down, chi)?;
        Ok((dp / (2.0 * EPS * total)).max(0.0))
    }

    /// Free charge density `n^F = e₀ Σ (z_α/m_α) ρ_α`.
    pub fn free_charge_density(&self, rho: &[f64]) -> f64 {
        self.elementary_charge
            * rho
                .iter()
                .zip(&self.species)
                .map(|(r, s)| s.specific_charge() * r)
                .sum::<f64>()
    }

    /// Electroneutrality residual `Σ (z_α/m_α) ρ_α` (no `e₀` factor).
    pub fn charge_balance(&self, rho: &[f64]) -> f64 {
        rho.iter()
            .zip(&self.species)
            .map(|(r, s)| s.specific_charge() * r)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample(nsp: usize) -> MixtureThermo {
        let species = (0..nsp)
            .map(|i| SpeciesSpec::new(1.0 + i as f64, 0, 0.1 * i as f64))
            .collect();
        MixtureThermo::new(
            species,
            PhaseEnergyParams {
                bulk_modulus_liquid: 4.0,
                bulk_modulus_vapor: 1.5,
                reference_number_density: 1.0,
                reference_pressure: 0.3,
                thermal_energy: 0.7,
            },
            DoubleWell { gamma: 1.0, tau: 1.0 },
            Susceptibility {
                liquid: 3.0,
                vapor: 1.0,
                vacuum_permittivity: 1.0,
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn double_well_values() {
        let v = double_well_eval(1.0);
        assert_eq!((v.w, v.dw, v.d2w), (0.0, 0.0, 8.0));
        let v = double_well_eval(0.0);
        assert_eq!((v.w, v.dw), (1.0, 0.0));
        let v = double_well_eval(0.5);
        assert!((v.dw + 1.5).abs() < 1e-15);
        let h = 1e-5;
        let fd = (double_well_eval(0.5 + h).w - double_well_eval(0.5 - h).w) / (2.0 * h);
        assert!((fd - v.dw).abs() < 1e-9);
    }

    #[test]
    fn interpolant_values() {
        assert_eq!(interp_h(1.7), (1.0, 0.0));
        assert_eq!(interp_h(-2.0), (0.0, 0.0));
        assert!((interp_h(0.0).0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interpolant_is_c2_at_clamps() {
        let it = Interpolant;
        for z in [-1.0f64, 1.0] {
            let inside = it.second_derivative(z - 1e-12 * z.signum());
            assert!(inside.abs() < 1e-8);
        }
    }

    #[test]
    fn reference_state_has_zero_energy() {
        let mut t = sample(1);
        t.species[0].reference_energy = 0.0;
        let rho = [t.species[0].mass * t.phase.reference_number_density];
        for phase in [Phase::Liquid, Phase::Vapor] {
            assert!(t.phase_free_energy(&rho, phase).unwrap().abs() < 1e-14);
        }
        let p = t.pressure(&rho, 0.3).unwrap();
        assert!((p - t.phase.reference_pressure).abs() < 1e-13);
    }

    #[test]
    fn mixing_term_for_equal_number_densities() {
        let mut t = sample(2);
        for s in &mut t.species {
            s.reference_energy = 0.0;
        }
        // n = n^R so the elastic terms vanish and only mixing remains.
        let rho = [0.5 * t.species[0].mass, 0.5 * t.species[1].mass];
        let value = t.phase_free_energy(&rho, Phase::Liquid).unwrap();
        let expected = t.phase.thermal_energy * 1.0 * 0.5f64.ln();
        assert!((value - expected).abs() < 1e-14);
    }

    #[test]
    fn dilute_limit_of_phase_energy() {
        let mut t = sample(2);
        for s in &mut t.species {
            s.reference_energy = 0.0;
        }
        let rho = [1e-8 * t.species[0].mass, 1e-8 * t.species[1].mass];
        let value = t.phase_free_energy(&rho, Phase::Vapor).unwrap();
        let limit = t.phase.bulk_modulus_vapor - t.phase.reference_pressure;
        assert!((value - limit).abs() < 1e-6);
    }

    #[test]
    fn rho_f_interpolates_pure_phases() {
        let t = sample(3);
        let rho = [0.3, 0.9, 1.4];
        let l = t.phase_free_energy(&rho, Phase::Liquid).unwrap();
        let v = t.phase_free_energy(&rho, Phase::Vapor).unwrap();
        assert!((t.rho_f(&rho, 1.0).unwrap() - l).abs() < 1e-14);
        assert!((t.rho_f(&rho, -1.0).unwrap() - v).abs() < 1e-14);
        assert!((t.rho_f(&rho, 0.0).unwrap() - 0.5 * (l + v)).abs() < 1e-13);
    }

    #[test]
    fn reference_energy_shift_moves_mu_by_constant() {
        let t = sample(2);
        let mut shifted = t.clone();
        shifted.species[0].reference_energy += 0.25;
        shifted.species[1].reference_energy -= 1.5;
        let rho = [0.4, 1.1];
        let a = t.chemical_potentials(&rho, 0.2).unwrap();
        let b = shifted.chemical_potentials(&rho, 0.2).unwrap();
        assert!((b[0] - a[0] - 0.25).abs() < 1e-14);
        assert!((b[1] - a[1] + 1.5).abs() < 1e-14);
    }

    #[test]
    fn phase_derivative_and_susceptibility_vanish_outside_layer() {
        let t = sample(2);
        assert_eq!(t.d_rho_f_dchi(&[0.5, 0.7], 1.2).unwrap(), 0.0);
        assert_eq!(t.susceptibility(1.2).1, 0.0);
        let (s, _) = t.susceptibility(0.0);
        assert!((s - 2.0).abs() < 1e-15);
        let flat = Susceptibility {
            liquid: 2.0,
            vapor: 2.0,
            vacuum_permittivity: 1.0,
        };
        for chi in [-0.9, -0.1, 0.4, 0.95] {
            assert_eq!(flat.eval(chi).1, 0.0);
        }
    }

    #[test]
    fn free_charge_density_examples() {
        let mut t = sample(2);
        assert_eq!(t.free_charge_density(&[1.0, 2.0]), 0.0);
        t.species[0] = SpeciesSpec::new(1.0, 1, 0.0);
        t.species[1] = SpeciesSpec::new(1.0, -1, 0.0);
        assert_eq!(t.free_charge_density(&[0.7, 0.7]), 0.0);
        t.species[1].mass = 2.0;
        assert!((t.free_charge_density(&[1.0, 1.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_density_is_rejected() {
        let t = sample(2);
        assert!(matches!(
            t.chemical_potentials(&[0.5, 0.0], 0.0),
            Err(Error::NonpositiveDensity { species: 1, .. })
        ));
        assert!(t.phase_free_energy(&[-1.0, 1.0], Phase::Liquid).is_err());
    }

    #[test]
    fn invalid_gamma_is_reported_by_key() {
        let t = sample(2);
        let err = MixtureThermo::new(
            t.species.clone(),
            t.phase.clone(),
            DoubleWell { gamma: -1.0, tau: 1.0 },
            t.susceptibility.clone(),
            1.0,
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "double_well.gamma must be > 0");
    }
}
