#![allow(dead_code)]

use pfe_core::thermo::{DoubleWell, MixtureThermo, PhaseEnergyParams, SpeciesSpec, Susceptibility};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Thermodynamic model with randomized material constants and `n` species.
pub fn random_thermo(rng: &mut ChaCha8Rng, n: usize) -> MixtureThermo {
    let species = (0..n)
        .map(|_| {
            SpeciesSpec::new(
                rng.random_range(0.5..3.0),
                rng.random_range(-2..=2),
                rng.random_range(-1.0..1.0),
            )
        })
        .collect();
    MixtureThermo::new(
        species,
        PhaseEnergyParams {
            bulk_modulus_liquid: rng.random_range(0.5..8.0),
            bulk_modulus_vapor: rng.random_range(0.2..4.0),
            reference_number_density: rng.random_range(0.5..2.0),
            reference_pressure: rng.random_range(-1.0..1.0),
            thermal_energy: rng.random_range(0.2..2.0),
        },
        DoubleWell {
            gamma: rng.random_range(0.5..4.0),
            tau: rng.random_range(0.5..2.0),
        },
        Susceptibility {
            liquid: rng.random_range(0.0..5.0),
            vapor: rng.random_range(0.0..2.0),
            vacuum_permittivity: rng.random_range(0.1..2.0),
        },
        1.0,
    )
    .unwrap()
}

pub fn random_densities(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.05..3.0)).collect()
}

/// Free energy density written out directly from its definition.
pub fn oracle_rho_f(t: &MixtureThermo, rho: &[f64], chi: f64) -> f64 {
    let u = ((chi + 1.0) / 2.0).clamp(0.0, 1.0);
    let h = u.powi(3) * (6.0 * u * u - 15.0 * u + 10.0);
    let p = &t.phase;
    let nas: Vec<f64> = rho.iter().zip(&t.species).map(|(r, s)| r / s.mass).collect();
    let n: f64 = nas.iter().sum();
    let a = n / p.reference_number_density;
    let pure = |k: f64| {
        let mut v = (k - p.reference_pressure) * (1.0 - a) + k * a * a.ln();
        for ((r, s), na) in rho.iter().zip(&t.species).zip(&nas) {
            v += r * s.reference_energy + p.thermal_energy * na * (na / n).ln();
        }
        v
    };
    h * pure(p.bulk_modulus_liquid) + (1.0 - h) * pure(p.bulk_modulus_vapor)
}

/// Composite Simpson rule on an odd number of equispaced samples.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    assert!(f.len() % 2 == 1);
    let n = f.len() - 1;
    let mut s = f[0] + f[n];
    for (k, v) in f.iter().enumerate().take(n).skip(1) {
        s += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// Root of a monotone function on `[lo, hi]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) <= 0.0, "root not bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
