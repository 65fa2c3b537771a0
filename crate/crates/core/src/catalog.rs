//! Test models with known properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{PolyField, PolyMatrix};
use crate::structures::{Model, ParaHermitianStructure};

/// Seed used by `catalog emit` and by the acceptance suite.
pub const DEFAULT_SEED: u64 = 20240611;

/// Catalog entry: name, description, whether the model admits a PQKT connection.
pub struct Entry {
    pub name: &'static str,
    pub summary: &'static str,
    pub admits_pqkt: bool,
}

pub const ENTRIES: [Entry; 5] = [
    Entry { name: "flat", summary: "constant flat structure on R^{4n}", admits_pqkt: true },
    Entry {
        name: "frame-deformed",
        summary: "J = E J0 E^-1 for a seeded polynomial frame E; no PQKT connection",
        admits_pqkt: false,
    },
    Entry {
        name: "diffeo-pushforward",
        summary: "flat structure in seeded quadratic coordinates",
        admits_pqkt: true,
    },
    Entry { name: "conformal", summary: "(1 + x_1/10) times the flat metric", admits_pqkt: true },
    Entry {
        name: "conformal-quadratic",
        summary: "flat metric times a quadratic factor with non-closed torsion",
        admits_pqkt: true,
    },
];

pub fn flat_model(n: usize) -> ParaHermitianStructure {
    ParaHermitianStructure::flat(n)
}

fn mono(d: usize, idx: &[usize]) -> Vec<u32> {
    let mut e = vec![0u32; d];
    for &i in idx {
        e[i] += 1;
    }
    e
}

/// `E = I + Σ_a x_a M_a + x_0 x_1 M'` with small seeded entries, kept well inside the invertible range.
pub fn frame_deformed_model(n: usize, seed: u64) -> ParaHermitianStructure {
    let d = 4 * n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lin = 0.1 / d as f64;
    let mut entries: Vec<PolyField> = PolyMatrix::identity(d).entries().to_vec();
    for p in entries.iter_mut() {
        for a in 0..d {
            p.add_term(mono(d, &[a]), rng.gen_range(-lin..lin));
        }
        p.add_term(mono(d, &[0, 1]), rng.gen_range(-0.1..0.1) / d as f64);
    }
    let e = PolyMatrix::from_fn(d, |i, j| entries[i * d + j].clone());
    ParaHermitianStructure { n, model: Model::FrameDeformed { e } }
}

/// `φ^a = x_a + Σ c x_b x_c` with two seeded quadratic terms per component.
pub fn pushforward_model(n: usize, seed: u64) -> ParaHermitianStructure {
    let d = 4 * n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let phi = (0..d)
        .map(|a| {
            let mut p = PolyField::coord(d, a);
            for _ in 0..2 {
                let b = rng.gen_range(0..d);
                let c = rng.gen_range(0..d);
                p.add_term(mono(d, &[b, c]), rng.gen_range(-0.05..0.05));
            }
            p
        })
        .collect();
    ParaHermitianStructure { n, model: Model::Pushforward { phi } }
}

/// `f · g` over `base`.
pub fn conformal_model(base: ParaHermitianStructure, f: PolyField) -> ParaHermitianStructure {
    ParaHermitianStructure { n: base.n, model: Model::Conformal { base: Box::new(base), f } }
}

/// `f = 1 + x_1/10`, positive on the sample region.
pub fn default_factor(d: usize) -> PolyField {
    let mut f = PolyField::constant(d, 1.0);
    f.add_term(mono(d, &[0]), 0.1);
    f
}

/// `f = 1 + x_1/10 + x_2x_3/5 − x_4²/10 + x_1x_d/20`.
pub fn quadratic_factor(d: usize) -> PolyField {
    let mut f = default_factor(d);
    f.add_term(mono(d, &[1, 2]), 0.2);
    f.add_term(mono(d, &[3, 3]), -0.1);
    f.add_term(mono(d, &[0, d - 1]), 0.05);
    f
}

pub fn default_conformal(n: usize) -> ParaHermitianStructure {
    conformal_model(flat_model(n), default_factor(4 * n))
}

pub fn quadratic_conformal(n: usize) -> ParaHermitianStructure {
    conformal_model(flat_model(n), quadratic_factor(4 * n))
}

/// Build a catalog model by name.
pub fn by_name(name: &str, n: usize, seed: u64) -> Result<ParaHermitianStructure> {
    if n == 0 {
        return Err(Error::Unsupported("n must be at least 1".into()));
    }
    Ok(match name {
        "flat" => flat_model(n),
        "frame-deformed" => frame_deformed_model(n, seed),
        "diffeo-pushforward" => pushforward_model(n, seed),
        "conformal" => default_conformal(n),
        "conformal-quadratic" => quadratic_conformal(n),
        _ => return Err(Error::Unsupported(format!("unknown catalog model '{name}'"))),
    })
}

pub fn entry(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;

    #[test]
    fn every_entry_builds() {
        for e in &ENTRIES {
            let m = by_name(e.name, 2, DEFAULT_SEED).unwrap();
            let space = JetSpace::new(8, 2).unwrap();
            let s = m.jets(&space, &[0.5; 8], 2).unwrap();
            assert!(s.g_val().is_finite());
        }
        assert!(by_name("sphere", 2, 0).is_err());
    }

    #[test]
    fn factors_are_positive_on_the_region() {
        let f = quadratic_factor(8);
        for corner in 0..256u32 {
            let x: Vec<f64> = (0..8).map(|i| if corner >> i & 1 == 1 { 0.5 } else { -0.5 }).collect();
            assert!(f.eval(&x) > 0.5);
        }
    }
}
