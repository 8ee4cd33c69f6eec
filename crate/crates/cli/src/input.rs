//! Problem files. Every file is a JSON object; model files may carry a
//! cover, a density, a character and isotropy candidates next to the model.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use transverse_core::algebroid::AlgebroidSpec;
use transverse_core::cech::{CoverSpec, GraphSpec};
use transverse_core::groupoid::{IsotropyArrow, Letter, ModelSpec};
use transverse_core::symcore::parse_rational;
use transverse_core::{Character, Rational};

/// A malformed input, reported with exit code 2.
#[derive(Debug)]
pub struct InputError {
    pub path: String,
    pub line: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some((l, c)) => write!(f, "{}:{l}:{c}: {}", self.path, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

impl InputError {
    pub fn new(path: &Path, message: impl fmt::Display) -> InputError {
        InputError {
            path: path.display().to_string(),
            line: None,
            message: message.to_string(),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::new(path, e))?;
    serde_json::from_str(&text).map_err(|e| InputError {
        path: path.display().to_string(),
        line: Some((e.line(), e.column())),
        message: e.to_string(),
    })
}

#[derive(Clone, Debug, Deserialize)]
pub struct AlgebroidFile {
    #[serde(flatten)]
    pub spec: AlgebroidSpec,
    /// Candidate `f` with `modular cocycle = d_A f`.
    #[serde(default)]
    pub primitive: Option<String>,
    #[serde(default)]
    pub chi: Option<Character>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct IsotropySpec {
    /// Signed 1-based generator indices, for discrete actions.
    #[serde(default)]
    pub word: Option<Vec<i64>>,
    /// Group coordinates, for Lie actions.
    #[serde(default)]
    pub group: Option<Vec<String>>,
    pub point: Vec<String>,
}

impl IsotropySpec {
    pub fn resolve(&self) -> Result<(IsotropyArrow, Vec<Rational>), String> {
        let point = rationals(&self.point)?;
        let arrow = match (&self.word, &self.group) {
            (Some(w), None) => IsotropyArrow::Word(letters(w)?),
            (None, Some(u)) => IsotropyArrow::Group(rationals(u)?),
            _ => return Err("an isotropy candidate needs exactly one of `word` and `group`".into()),
        };
        Ok((arrow, point))
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub model: ModelSpec,
    #[serde(default)]
    pub cover: Option<CoverSpec>,
    /// Density in the canonical frame, a positive rational function.
    #[serde(default)]
    pub sigma: Option<String>,
    #[serde(default)]
    pub chi: Option<Character>,
    /// Extra factor per generator of a discrete action.
    #[serde(default)]
    pub twists: Vec<String>,
    #[serde(default)]
    pub isotropy: Vec<IsotropySpec>,
    /// Extra words for composability checks.
    #[serde(default)]
    pub words: Vec<Vec<i64>>,
}

/// Either a model with a cover or an explicit parity graph.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OrientabilityFile {
    Graph(GraphSpec),
    Model(Box<ModelFile>),
}

#[derive(Clone, Debug, Deserialize)]
pub struct DensityFile {
    pub chart: Vec<String>,
    pub density: String,
    #[serde(rename = "box")]
    pub bounds: Vec<(String, String)>,
    #[serde(default = "default_resolution")]
    pub resolution: u32,
}

fn default_resolution() -> u32 {
    1000
}

pub fn rationals(v: &[String]) -> Result<Vec<Rational>, String> {
    v.iter().map(|s| parse_rational(s).map_err(|e| e.to_string())).collect()
}

pub fn letters(w: &[i64]) -> Result<Vec<Letter>, String> {
    w.iter().map(|&k| Letter::from_signed(k).map_err(|e| e.to_string())).collect()
}
