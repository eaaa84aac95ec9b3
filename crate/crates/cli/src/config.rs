//! Experiment configuration files.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use twistlab::algebra::{FiniteField, FqPoly};
use twistlab::applications::HeegnerMode;
use twistlab::lfunc::LocalConditions;
use twistlab::places::Place;
use twistlab::reps::{EllipticCurve, PowerCharacter, RepDescriptor};

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub field: Option<FieldSection>,
    pub rep: Option<RepSection>,
    pub family: Option<FamilySection>,
    pub experiment: Option<ExperimentSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub q: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSection {
    pub kind: Option<String>,
    #[serde(rename = "A")]
    pub a: Option<String>,
    #[serde(rename = "B")]
    pub b: Option<String>,
    pub g: Option<String>,
    pub d: Option<u32>,
    pub i: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    pub d: Option<u32>,
    pub n: Option<u32>,
    pub degree: Option<u32>,
    pub f: Option<OneOrMany>,
    pub split: Option<Vec<String>>,
    pub inert: Option<Vec<String>>,
    pub ramified: Option<Vec<String>>,
}

/// A single polynomial or a list of them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub orbit: Option<u32>,
    pub ns: Option<Vec<u32>>,
    pub haar_samples: Option<usize>,
    pub mode: Option<String>,
    pub count: Option<usize>,
    pub max_degree: Option<u32>,
    /// Pairs `[j, k]` standing for `zeta_m^j u^k`.
    pub alphas: Option<Vec<[u32; 2]>>,
    pub alpha_level: Option<u32>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

fn need<T: Clone>(v: &Option<T>, key: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing key `{key}`")))
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    fn family_section(&self) -> Result<&FamilySection, CliError> {
        self.family.as_ref().ok_or_else(|| CliError::Config("missing section `[family]`".into()))
    }

    fn experiment_section(&self) -> Result<&ExperimentSection, CliError> {
        self.experiment
            .as_ref()
            .ok_or_else(|| CliError::Config("missing section `[experiment]`".into()))
    }

    pub fn field(&self) -> Result<Arc<FiniteField>, CliError> {
        let sec = self.field.as_ref().ok_or_else(|| CliError::Config("missing section `[field]`".into()))?;
        let q = need(&sec.q, "field.q")?;
        FiniteField::of_order(q).map_err(|e| CliError::Config(format!("field.q: {e}")))
    }

    pub fn rep(&self) -> Result<RepDescriptor, CliError> {
        let field = self.field()?;
        let sec = self.rep.as_ref().ok_or_else(|| CliError::Config("missing section `[rep]`".into()))?;
        let kind = need(&sec.kind, "rep.kind")?;
        match kind.as_str() {
            "trivial" => Ok(RepDescriptor::Trivial(field)),
            "character" => {
                let g = poly(&field, &need(&sec.g, "rep.g")?, "rep.g")?;
                let chi = PowerCharacter::from_poly(g, need(&sec.d, "rep.d")?, sec.i.unwrap_or(1))
                    .map_err(|e| CliError::Config(format!("rep: {e}")))?;
                Ok(RepDescriptor::Char(chi))
            }
            "elliptic" => {
                let a = poly(&field, &need(&sec.a, "rep.A")?, "rep.A")?;
                let b = poly(&field, &need(&sec.b, "rep.B")?, "rep.B")?;
                let e = EllipticCurve::new(a, b).map_err(|e| CliError::Config(format!("rep: {e}")))?;
                Ok(RepDescriptor::elliptic(e))
            }
            other => Err(CliError::Config(format!(
                "rep.kind must be trivial, character or elliptic, not `{other}`"
            ))),
        }
    }

    pub fn d(&self) -> Result<u32, CliError> {
        need(&self.family_section()?.d, "family.d")
    }

    pub fn n(&self) -> Result<u32, CliError> {
        Ok(self.family.as_ref().and_then(|f| f.n).unwrap_or(1))
    }

    pub fn degree(&self) -> Result<u32, CliError> {
        need(&self.family_section()?.degree, "family.degree")
    }

    /// `F_{q^n}` for `n = family.n`.
    pub fn field_n(&self) -> Result<Arc<FiniteField>, CliError> {
        self.field()?.extension(self.n()?).map_err(|e| CliError::Config(format!("family.n: {e}")))
    }

    /// `family.f` read over `field`, if present.
    pub fn fs_in(&self, field: &Arc<FiniteField>) -> Result<Option<Vec<FqPoly>>, CliError> {
        let texts = match self.family.as_ref().and_then(|f| f.f.clone()) {
            None => return Ok(None),
            Some(OneOrMany::One(s)) => vec![s],
            Some(OneOrMany::Many(v)) if v.is_empty() => {
                return Err(CliError::Config("family.f is an empty list".into()))
            }
            Some(OneOrMany::Many(v)) => v,
        };
        texts.iter().map(|s| poly(field, s, "family.f")).collect::<Result<_, _>>().map(Some)
    }

    /// `family.f` as a single polynomial, if present.
    pub fn f_in(&self, field: &Arc<FiniteField>) -> Result<Option<FqPoly>, CliError> {
        match self.fs_in(field)? {
            Some(mut v) if v.len() == 1 => Ok(v.pop()),
            Some(_) => Err(CliError::Config("family.f must be a single polynomial here".into())),
            None => Ok(None),
        }
    }

    pub fn conditions(&self) -> Result<LocalConditions, CliError> {
        let field = self.field()?;
        let sec = self.family_section()?;
        let places = |list: &Option<Vec<String>>, key: &str| -> Result<Vec<Place>, CliError> {
            list.iter().flatten().map(|s| place(&field, s, key)).collect()
        };
        Ok(LocalConditions {
            d: self.d()?,
            split: places(&sec.split, "family.split")?,
            inert: places(&sec.inert, "family.inert")?,
            ramified: places(&sec.ramified, "family.ramified")?,
        })
    }

    pub fn seed(&self, ov: Overrides) -> Result<u64, CliError> {
        match ov.seed {
            Some(s) => Ok(s),
            None => need(&self.experiment_section()?.seed, "experiment.seed"),
        }
    }

    pub fn budget(&self, ov: Overrides) -> Result<u64, CliError> {
        match ov.budget {
            Some(b) => Ok(b),
            None => need(&self.experiment_section()?.budget, "experiment.budget"),
        }
    }

    pub fn orbit(&self) -> Result<u32, CliError> {
        Ok(self.experiment.as_ref().and_then(|e| e.orbit).unwrap_or(1))
    }

    pub fn ns(&self) -> Result<Vec<u32>, CliError> {
        match self.experiment.as_ref().and_then(|e| e.ns.clone()) {
            Some(ns) if ns.is_empty() => Err(CliError::Config("experiment.ns is empty".into())),
            Some(ns) => Ok(ns),
            None => Ok(vec![self.n()?]),
        }
    }

    pub fn haar_samples(&self) -> Result<usize, CliError> {
        need(&self.experiment_section()?.haar_samples, "experiment.haar_samples")
    }

    pub fn mode(&self) -> Result<HeegnerMode, CliError> {
        match need(&self.experiment_section()?.mode, "experiment.mode")?.as_str() {
            "inert" => Ok(HeegnerMode::Inert),
            "ramified" => Ok(HeegnerMode::Ramified),
            other => Err(CliError::Config(format!("experiment.mode must be inert or ramified, not `{other}`"))),
        }
    }

    pub fn count(&self) -> Result<usize, CliError> {
        need(&self.experiment_section()?.count, "experiment.count")
    }

    pub fn alphas(&self) -> Option<Vec<[u32; 2]>> {
        self.experiment.as_ref().and_then(|e| e.alphas.clone())
    }

    pub fn alpha_level(&self) -> Option<u32> {
        self.experiment.as_ref().and_then(|e| e.alpha_level)
    }

    pub fn max_degree(&self) -> Result<u32, CliError> {
        need(&self.experiment_section()?.max_degree, "experiment.max_degree")
    }
}

fn poly(field: &Arc<FiniteField>, s: &str, key: &str) -> Result<FqPoly, CliError> {
    FqPoly::parse(field, s).map_err(|e| CliError::Config(format!("{key}: {e}")))
}

/// `inf` or a monic irreducible polynomial.
fn place(field: &Arc<FiniteField>, s: &str, key: &str) -> Result<Place, CliError> {
    if s.trim() == "inf" {
        return Ok(Place::infinity(field));
    }
    Place::finite(poly(field, s, key)?).map_err(|e| CliError::Config(format!("{key}: {e}")))
}
