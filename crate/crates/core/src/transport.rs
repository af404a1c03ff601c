//! Onsager mobility matrix and the diffusion/electromigration fluxes
//! `J_α = −Σ_β M_αβ P_β` (α < N), `J_N = −Σ_{α<N} J_α`.

use crate::error::{Error, Result};
use crate::thermo::SpeciesSpec;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Symmetric positive (semi)definite `(N−1)×(N−1)` mobility matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityMatrix {
    dim: usize,
    entries: Vec<f64>,
    positive_definite: bool,
}

impl MobilityMatrix {
    /// `M = Bᵀ diag(M̃) B`.
    pub fn from_factors(b: &[Vec<f64>], weights: &[f64]) -> Result<Self> {
        let dim = weights.len();
        if b.len() != dim || b.iter().any(|row| row.len() != dim) {
            return Err(Error::Dimension {
                what: "mobility factor B",
                expected: dim,
                got: b.len(),
            });
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::config("mobility.factors.weights", "must be >= 0"));
        }
        if dim > 0 && weights.iter().all(|&w| w == 0.0) {
            return Err(Error::config(
                "mobility.factors.weights",
                "must contain at least one positive entry",
            ));
        }
        ensure_invertible(b)?;
        let mut entries = vec![0.0; dim * dim];
        for a in 0..dim {
            for c in 0..dim {
                entries[a * dim + c] = (0..dim).map(|g| b[g][a] * weights[g] * b[g][c]).sum();
            }
        }
        Ok(Self {
            dim,
            entries,
            positive_definite: weights.iter().all(|&w| w > 0.0),
        })
    }

    /// Takes a full matrix and validates symmetry and positive definiteness.
    pub fn from_direct(m: &[Vec<f64>]) -> Result<Self> {
        let dim = m.len();
        if m.iter().any(|row| row.len() != dim) {
            return Err(Error::Dimension {
                what: "mobility matrix",
                expected: dim,
                got: m.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(dim),
            });
        }
        let entries: Vec<f64> = m.iter().flatten().copied().collect();
        for a in 0..dim {
            for c in 0..a {
                let (x, y) = (entries[a * dim + c], entries[c * dim + a]);
                if (x - y).abs() > SYMMETRY_TOLERANCE * x.abs().max(y.abs()).max(1.0) {
                    return Err(Error::NotPositiveDefinite(format!(
                        "mobility.direct is not symmetric at ({a},{c})"
                    )));
                }
            }
        }
        cholesky(&entries, dim)
            .ok_or_else(|| Error::NotPositiveDefinite("mobility.direct has a nonpositive pivot".into()))?;
        Ok(Self {
            dim,
            entries,
            positive_definite: true,
        })
    }

    /// Diagonal matrix `diag(values)`.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { values[i] } else { 0.0 }).collect())
            .collect();
        Self::from_direct(&rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.dim + b]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.positive_definite
    }

    /// Largest absolute row sum; bounds the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|a| (0..self.dim).map(|b| self.get(a, b).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Quadratic form `Σ M_αβ P_α P_β`.
    pub fn quadratic_form(&self, p: &[f64]) -> f64 {
        let mut sum = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                sum += self.get(a, b) * p[a] * p[b];
            }
        }
        sum
    }
}

fn ensure_invertible(b: &[Vec<f64>]) -> Result<()> {
    let dim = b.len();
    let mut lu: Vec<Vec<f64>> = b.to_vec();
    let scale = b
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for k in 0..dim {
        let pivot = (k..dim)
            .max_by(|&i, &j| lu[i][k].abs().total_cmp(&lu[j][k].abs()))
            .unwrap_or(k);
        if lu[pivot][k].abs() <= 1e-13 * scale {
            return Err(Error::Singular("mobility factor B is singular".into()));
        }
        lu.swap(k, pivot);
        for i in k + 1..dim {
            let f = lu[i][k] / lu[k][k];
            for j in k..dim {
                lu[i][j] -= f * lu[k][j];
            }
        }
    }
    Ok(())
}

/// Lower Cholesky factor, `None` if a pivot is not positive.
fn cholesky(a: &[f64], dim: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * dim + k] * l[j * dim + k]).sum();
            if i == j {
                let d = a[i * dim + i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i * dim + i] = d.sqrt();
            } else {
                l[i * dim + j] = (a[i * dim + j] - s) / l[j * dim + j];
            }
        }
    }
    Some(l)
}

/// `P_β = ∇(μ_β − μ_N) + e₀ (z_β/m_β − z_N/m_N) ∇φ` for β < N.
pub fn diffusion_driving_force(
    grad_mu: &[f64],
    grad_phi: f64,
    species: &[SpeciesSpec],
    elementary_charge: f64,
) -> Vec<f64> {
    let mut out = vec![0.0; species.len().saturating_sub(1)];
    diffusion_driving_force_into(grad_mu, grad_phi, species, elementary_charge, &mut out);
    out
}

pub fn diffusion_driving_force_into(
    grad_mu: &[f64],
    grad_phi: f64,
    species: &[SpeciesSpec],
    elementary_charge: f64,
    out: &mut [f64],
) {
    let last = species.len() - 1;
    let q_last = species[last].specific_charge();
    for (b, p) in out.iter_mut().enumerate() {
        *p = (grad_mu[b] - grad_mu[last]) + elementary_charge * (species[b].specific_charge() - q_last) * grad_phi;
    }
}

/// Fluxes for all N species from the N−1 driving forces.
pub fn diffusion_fluxes(m: &MobilityMatrix, p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.dim() + 1];
    diffusion_fluxes_into(m, p, &mut out);
    out
}

pub fn diffusion_fluxes_into(m: &MobilityMatrix, p: &[f64], out: &mut [f64]) {
    let dim = m.dim();
    let mut closure = 0.0;
    for a in 0..dim {
        let j = -(0..dim).map(|b| m.get(a, b) * p[b]).sum::<f64>();
        out[a] = j;
        closure -= j;
    }
    out[dim] = closure;
}
