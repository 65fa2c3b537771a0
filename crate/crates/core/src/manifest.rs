//! Manifest files: a JSON document describing a model by polynomial terms,
//! plus sampling and suite selection.
//!
//! ```json
//! {
//!   "model": {"kind": "conformal", "base": {"kind": "flat", "n": 2},
//!             "f": [{"exponents": [0,0,0,0,0,0,0,0], "coeff": 1.0}]},
//!   "samples": {"count": 25, "seed": 7},
//!   "suites": ["algebra", "curvature"]
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{PolyField, PolyMatrix, Term};
use crate::structures::{Model, ParaHermitianStructure};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    Flat {
        n: usize,
    },
    /// Frame matrix `E`, row-major, `(4n)²` polynomials.
    FrameDeformed {
        n: usize,
        e: Vec<Vec<Term>>,
    },
    /// Components of the map `φ`.
    DiffeoPushforward {
        n: usize,
        phi: Vec<Vec<Term>>,
    },
    Conformal {
        base: Box<ModelSpec>,
        f: Vec<Term>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Half-width of the sampling cube.
    #[serde(default = "default_region")]
    pub region: f64,
}

fn default_count() -> usize {
    25
}

fn default_region() -> f64 {
    0.5
}

impl Default for Samples {
    fn default() -> Self {
        Samples { count: default_count(), seed: 0, region: default_region() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub model: ModelSpec,
    #[serde(default)]
    pub samples: Samples,
    /// Suites to run; empty means all.
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default = "one")]
    pub tolerance_scale: f64,
    /// Per-identity tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn one() -> f64 {
    1.0
}

fn merr(path: &str, msg: impl Into<String>) -> Error {
    Error::Manifest { path: path.to_string(), msg: msg.into() }
}

fn poly(d: usize, terms: &[Term], path: &str) -> Result<PolyField> {
    for (i, t) in terms.iter().enumerate() {
        if t.exponents.len() != d {
            return Err(merr(
                &format!("{path}[{i}].exponents"),
                format!("expected {d} exponents, found {}", t.exponents.len()),
            ));
        }
        if !t.coeff.is_finite() {
            return Err(merr(&format!("{path}[{i}].coeff"), "coefficient is not finite"));
        }
    }
    PolyField::from_terms(d, terms).map_err(|e| merr(path, e.to_string()))
}

impl ModelSpec {
    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Flat { n } | ModelSpec::FrameDeformed { n, .. } | ModelSpec::DiffeoPushforward { n, .. } => *n,
            ModelSpec::Conformal { base, .. } => base.n(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Flat { .. } => "flat",
            ModelSpec::FrameDeformed { .. } => "frame-deformed",
            ModelSpec::DiffeoPushforward { .. } => "diffeo-pushforward",
            ModelSpec::Conformal { .. } => "conformal",
        }
    }

    /// Build the structure, reporting the JSON path of the first invalid entry.
    pub fn build(&self) -> Result<ParaHermitianStructure> {
        self.build_at("model")
    }

    fn build_at(&self, path: &str) -> Result<ParaHermitianStructure> {
        let n = self.n();
        if n == 0 {
            return Err(merr(&format!("{path}.n"), "n must be at least 1"));
        }
        let d = 4 * n;
        let model = match self {
            ModelSpec::Flat { .. } => Model::Flat,
            ModelSpec::FrameDeformed { e, .. } => {
                if e.len() != d * d {
                    return Err(merr(&format!("{path}.e"), format!("expected {} entries, found {}", d * d, e.len())));
                }
                let entries = e
                    .iter()
                    .enumerate()
                    .map(|(k, t)| poly(d, t, &format!("{path}.e[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                Model::FrameDeformed { e: PolyMatrix::from_fn(d, |i, j| entries[i * d + j].clone()) }
            }
            ModelSpec::DiffeoPushforward { phi, .. } => {
                if phi.len() != d {
                    return Err(merr(&format!("{path}.phi"), format!("expected {d} components, found {}", phi.len())));
                }
                let phi = phi
                    .iter()
                    .enumerate()
                    .map(|(k, t)| poly(d, t, &format!("{path}.phi[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                Model::Pushforward { phi }
            }
            ModelSpec::Conformal { base, f } => {
                let b = base.build_at(&format!("{path}.base"))?;
                Model::Conformal { base: Box::new(b), f: poly(d, f, &format!("{path}.f"))? }
            }
        };
        Ok(ParaHermitianStructure { n, model })
    }

    /// Manifest description of a structure.
    pub fn from_structure(s: &ParaHermitianStructure) -> ModelSpec {
        match &s.model {
            Model::Flat => ModelSpec::Flat { n: s.n },
            Model::FrameDeformed { e } => {
                ModelSpec::FrameDeformed { n: s.n, e: e.entries().iter().map(|p| p.to_terms()).collect() }
            }
            Model::Pushforward { phi } => {
                ModelSpec::DiffeoPushforward { n: s.n, phi: phi.iter().map(|p| p.to_terms()).collect() }
            }
            Model::Conformal { base, f } => {
                ModelSpec::Conformal { base: Box::new(ModelSpec::from_structure(base)), f: f.to_terms() }
            }
        }
    }
}

impl Manifest {
    pub fn for_structure(s: &ParaHermitianStructure) -> Manifest {
        Manifest {
            model: ModelSpec::from_structure(s),
            samples: Samples::default(),
            suites: Vec::new(),
            tolerance_scale: 1.0,
            tolerances: BTreeMap::new(),
        }
    }

    /// Parse manifest text; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Manifest> {
        let m: Manifest = serde_json::from_str(text)
            .map_err(|e| merr(&format!("{origin}:{}:{}", e.line(), e.column()), e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.count == 0 {
            return Err(merr("samples.count", "at least one sample point is required"));
        }
        if !(self.samples.region > 0.0 && self.samples.region.is_finite()) {
            return Err(merr("samples.region", "region must be positive and finite"));
        }
        if !(self.tolerance_scale > 0.0 && self.tolerance_scale.is_finite()) {
            return Err(merr("tolerance_scale", "scale must be positive and finite"));
        }
        for (k, v) in &self.tolerances {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(merr(&format!("tolerances.{k}"), "tolerance must be positive and finite"));
            }
        }
        for (i, s) in self.suites.iter().enumerate() {
            if !crate::suite::SUITES.contains(&s.as_str()) {
                return Err(merr(&format!("suites[{i}]"), format!("unknown suite '{s}'")));
            }
        }
        self.model.build().map(|_| ())
    }

    /// Pretty JSON text of the manifest.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_models_round_trip() {
        for e in &catalog::ENTRIES {
            let s = catalog::by_name(e.name, 2, 5).unwrap();
            let m = Manifest::for_structure(&s);
            let back = Manifest::parse(&m.to_json(), "mem").unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = Manifest::parse("{\n  \"model\": {\"kind\": \"flat\", \"n\": 2,,}\n}", "bad.json").unwrap_err();
        match err {
            Error::Manifest { path, .. } => assert!(path.starts_with("bad.json:2:"), "{path}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn wrong_exponent_count_names_the_term() {
        let text = r#"{"model": {"kind": "conformal", "base": {"kind": "flat", "n": 1},
            "f": [{"exponents": [0,0,0,0], "coeff": 1.0}, {"exponents": [1,0], "coeff": 0.1}]}}"#;
        match Manifest::parse(text, "m").unwrap_err() {
            Error::Manifest { path, .. } => assert_eq!(path, "model.f[1].exponents"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_suite_rejected() {
        let text = r#"{"model": {"kind": "flat", "n": 2}, "suites": ["nope"]}"#;
        assert!(matches!(Manifest::parse(text, "m"), Err(Error::Manifest { .. })));
    }
}
