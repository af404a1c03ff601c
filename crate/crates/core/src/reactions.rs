//! Reaction network with per-reaction mass and charge conservation and the
//! far-from-equilibrium mass production law
//! `r_α = Σ_i m_α γ_α^i M_r^i (1 − exp(A_i))`, `A_i = Σ_β m_β γ_β^i μ_β`.

use crate::error::{Error, Result};
use crate::thermo::{MixtureThermo, SpeciesSpec};

/// Affinities above this value are rejected instead of overflowing `exp`.
pub const AFFINITY_LIMIT: f64 = 500.0;

const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    pub forward: Vec<u32>,
    pub backward: Vec<u32>,
    pub rate: f64,
}

impl Reaction {
    pub fn new(forward: Vec<u32>, backward: Vec<u32>, rate: f64) -> Self {
        Self {
            forward,
            backward,
            rate,
        }
    }

    /// Stoichiometric coefficients `γ_α = b_α − a_α`.
    pub fn stoichiometry(&self) -> Vec<f64> {
        self.forward
            .iter()
            .zip(&self.backward)
            .map(|(&a, &b)| f64::from(b) - f64::from(a))
            .collect()
    }
}

/// Which conservation sum a reaction violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    Mass,
    Charge,
}

impl Violation {
    pub fn name(self) -> &'static str {
        match self {
            Violation::Mass => "mass",
            Violation::Charge => "charge",
        }
    }
}

/// Checks `Σ z_α γ_α = 0` (exact, integer) and `Σ m_α γ_α = 0` (to 1e-12).
pub fn validate_conservation(
    reaction: &Reaction,
    species: &[SpeciesSpec],
) -> std::result::Result<(), (Violation, f64)> {
    let gamma = reaction.stoichiometry();
    let charge: i64 = reaction
        .forward
        .iter()
        .zip(&reaction.backward)
        .zip(species)
        .map(|((&a, &b), s)| (i64::from(b) - i64::from(a)) * i64::from(s.charge_number))
        .sum();
    let mass: f64 = gamma.iter().zip(species).map(|(g, s)| g * s.mass).sum();
    let mass_scale: f64 = gamma
        .iter()
        .zip(species)
        .map(|(g, s)| (g * s.mass).abs())
        .sum::<f64>()
        .max(1.0);
    if mass.abs() > MASS_TOLERANCE * mass_scale {
        return Err((Violation::Mass, mass));
    }
    if charge != 0 {
        return Err((Violation::Charge, charge as f64));
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReactionNetwork {
    reactions: Vec<Reaction>,
    /// `m_α γ_α^i`, row per reaction.
    mass_stoich: Vec<Vec<f64>>,
}

impl ReactionNetwork {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(reactions: Vec<Reaction>, species: &[SpeciesSpec]) -> Result<Self> {
        let nsp = species.len();
        let mut mass_stoich = Vec::with_capacity(reactions.len());
        for (i, r) in reactions.iter().enumerate() {
            if r.forward.len() != nsp || r.backward.len() != nsp {
                return Err(Error::Dimension {
                    what: "reaction coefficients",
                    expected: nsp,
                    got: r.forward.len().min(r.backward.len()),
                });
            }
            if !(r.rate > 0.0 && r.rate.is_finite()) {
                return Err(Error::config(format!("reaction[{i}].rate"), "must be > 0"));
            }
            if let Err((violation, sum)) = validate_conservation(r, species) {
                return Err(Error::Conservation {
                    reaction: i,
                    quantity: violation.name(),
                    sum,
                });
            }
            mass_stoich.push(r.stoichiometry().iter().zip(species).map(|(g, s)| g * s.mass).collect());
        }
        Ok(Self { reactions, mass_stoich })
    }

    pub fn len(&self) -> usize {
        self.reactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reactions.is_empty()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// `A_i = Σ_β m_β γ_β^i μ_β`.
    pub fn affinity(&self, i: usize, mu: &[f64]) -> f64 {
        self.mass_stoich[i].iter().zip(mu).map(|(a, b)| a * b).sum()
    }

    /// Mass production rates `r_α` for all species given chemical potentials.
    pub fn mass_production_from_mu(&self, mu: &[f64], out: &mut [f64]) -> Result<()> {
        out.iter_mut().for_each(|r| *r = 0.0);
        for (i, r) in self.reactions.iter().enumerate() {
            let a = self.affinity(i, mu);
            if a > AFFINITY_LIMIT {
                return Err(Error::AffinityOverflow {
                    reaction: i,
                    affinity: a,
                });
            }
            let factor = -r.rate * a.exp_m1();
            for (o, ms) in out.iter_mut().zip(&self.mass_stoich[i]) {
                *o += ms * factor;
            }
        }
        Ok(())
    }

    /// Mass production rates at a thermodynamic state.
    pub fn mass_production(&self, thermo: &MixtureThermo, rho: &[f64], chi: f64) -> Result<Vec<f64>> {
        let mu = thermo.chemical_potentials(rho, chi)?;
        let mut out = vec![0.0; rho.len()];
        self.mass_production_from_mu(&mu, &mut out)?;
        Ok(out)
    }

    /// `Σ_i M_r^i (1 − e^{A_i})(−A_i) ≥ 0`.
    pub fn entropy_production(&self, mu: &[f64]) -> f64 {
        self.reactions
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let a = self.affinity(i, mu).min(AFFINITY_LIMIT);
                reaction_dissipation(r.rate, a)
            })
            .sum()
    }
}

/// Single-reaction dissipation `M (1 − e^A)(−A)`, which is `≥ 0` for all `A`.
pub fn reaction_dissipation(rate: f64, affinity: f64) -> f64 {
    rate * affinity.exp_m1() * affinity
}
