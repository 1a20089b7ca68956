//! JSON experiment configuration.
//!
//! ```json
//! {"command": "bound", "gamma": 1, "ab": 0, "p": "inf"}
//! {"command": "extremal", "b_list": ["40pi", "80pi"], "gamma_list": [0.1, 0.2, 0.4]}
//! ```
//!
//! Grid fields take a scalar or a list, and also accept a `_list` suffix.
//! Real parameters that are naturally multiples of π (`b`, `ab`, `L`) also
//! accept strings such as `"16pi"` or `"pi"`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::bandlimited::Exponent;
use crate::bounds::BoundConstants;
use crate::error::{Error, Result};
use crate::sets::{two_sliver_set, IntervalSet};

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "THICKSET_SEED";

/// A real given as a number or as `"<k>pi"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let parsed = match t.strip_suffix("pi").or_else(|| t.strip_suffix('π')) {
            Some("") => Some(std::f64::consts::PI),
            Some(k) => k.trim().trim_end_matches('*').parse::<f64>().ok().map(|k| k * std::f64::consts::PI),
            None => t.parse::<f64>().ok(),
        };
        parsed.map(Real).ok_or_else(|| Error::Config(format!("cannot read {s:?} as a real")))
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Real(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Scalar or list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Nonempty list from an optional grid field.
pub fn grid<T: Clone>(field: &Option<OneOrMany<T>>, name: &str) -> Result<Vec<T>> {
    let values = field
        .as_ref()
        .ok_or_else(|| Error::Config(format!("missing field `{name}`")))?
        .to_vec();
    if values.is_empty() {
        return Err(Error::Config(format!("`{name}` must not be empty")));
    }
    Ok(values)
}

/// Like [`grid`], with a default when the field is absent.
pub fn grid_or<T: Clone>(field: &Option<OneOrMany<T>>, name: &str, default: Vec<T>) -> Result<Vec<T>> {
    match field {
        None => Ok(default),
        Some(_) => grid(field, name),
    }
}

pub fn reals(values: Vec<Real>) -> Vec<f64> {
    values.into_iter().map(|r| r.0).collect()
}

/// An interval set, or the two-sliver cell `{"two_sliver": γ}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    TwoSliver { two_sliver: f64 },
    Explicit(IntervalSet),
}

impl SetSpec {
    pub fn build(&self) -> Result<IntervalSet> {
        match self {
            SetSpec::TwoSliver { two_sliver } => two_sliver_set(*two_sliver),
            SetSpec::Explicit(set) => Ok(set.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Theorem1,
    Theorem2,
    Theorem2prime,
    Remark1,
    Lemma1,
    Lemma3,
    Nazarov,
    Remez,
    Theorem3,
    Theorem4,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BoundKind::Theorem1 => "theorem1",
            BoundKind::Theorem2 => "theorem2",
            BoundKind::Theorem2prime => "theorem2prime",
            BoundKind::Remark1 => "remark1",
            BoundKind::Lemma1 => "lemma1",
            BoundKind::Lemma3 => "lemma3",
            BoundKind::Nazarov => "nazarov",
            BoundKind::Remez => "remez",
            BoundKind::Theorem3 => "theorem3",
            BoundKind::Theorem4 => "theorem4",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    #[serde(default)]
    pub bound: Option<OneOrMany<BoundKind>>,
    #[serde(default, alias = "gamma_list")]
    pub gamma: Option<OneOrMany<f64>>,
    #[serde(default, alias = "ab_list")]
    pub ab: Option<OneOrMany<Real>>,
    #[serde(default, alias = "p_list")]
    pub p: Option<OneOrMany<Exponent>>,
    #[serde(default)]
    pub n: Option<OneOrMany<u32>>,
    #[serde(default)]
    pub m: Option<OneOrMany<u32>>,
    /// Growth factor `M` of the analytic-function estimate.
    #[serde(default)]
    pub growth: Option<OneOrMany<f64>>,
    #[serde(default)]
    pub len_i: Option<OneOrMany<f64>>,
    #[serde(default)]
    pub meas_e: Option<OneOrMany<f64>>,
    /// One list of `a_k b_k` per multi-dimensional configuration.
    #[serde(default)]
    pub ab_products: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThicknessConfig {
    pub set: SetSpec,
    #[serde(alias = "a_list")]
    pub a: OneOrMany<Real>,
    #[serde(default)]
    pub domain: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationConfig {
    /// Explicit mode: lattice indices, set and torus length.
    #[serde(default)]
    pub freqs: Option<Vec<i64>>,
    #[serde(default, rename = "E", alias = "set")]
    pub set: Option<SetSpec>,
    #[serde(default, rename = "L", alias = "period")]
    pub period: Option<Real>,
    /// Grid mode: two-sliver sets against centred bands.
    #[serde(default, alias = "gamma_list")]
    pub gamma: Option<OneOrMany<f64>>,
    #[serde(default, alias = "b_list")]
    pub b: Option<OneOrMany<Real>>,
    #[serde(default)]
    pub a: Option<f64>,
    /// Band centres; one centred band when absent.
    #[serde(default)]
    pub centers: Option<Vec<Real>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Dominance,
    Sharpness,
    #[serde(alias = "goodbad")]
    GoodBad,
    ExpSum,
    Remark1,
    Taylor,
    Extremal,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Dominance,
        Suite::Sharpness,
        Suite::GoodBad,
        Suite::ExpSum,
        Suite::Remark1,
        Suite::Taylor,
        Suite::Extremal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dominance => "dominance",
            Suite::Sharpness => "sharpness",
            Suite::GoodBad => "good_bad",
            Suite::ExpSum => "exp_sum",
            Suite::Remark1 => "remark1",
            Suite::Taylor => "taylor",
            Suite::Extremal => "extremal",
            Suite::All => "all",
        }
    }
}

/// Grid overrides shared by the verification suites; `None` keeps each
/// suite's default grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteGrid {
    pub seeds: Option<usize>,
    pub b_list: Option<Vec<f64>>,
    pub p_list: Option<Vec<Exponent>>,
    pub gamma_list: Option<Vec<f64>>,
    pub period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub suite: Option<OneOrMany<Suite>>,
    #[serde(default)]
    pub seeds: Option<usize>,
    #[serde(default, alias = "b")]
    pub b_list: Option<OneOrMany<Real>>,
    #[serde(default, alias = "p")]
    pub p_list: Option<OneOrMany<Exponent>>,
    #[serde(default, alias = "gamma")]
    pub gamma_list: Option<OneOrMany<f64>>,
    #[serde(default, rename = "L", alias = "period")]
    pub period: Option<Real>,
}

impl VerifyConfig {
    pub fn grid(&self) -> Result<SuiteGrid> {
        if self.seeds == Some(0) {
            return Err(Error::Config("`seeds` must be positive".into()));
        }
        Ok(SuiteGrid {
            seeds: self.seeds,
            b_list: self.b_list.as_ref().map(|_| grid(&self.b_list, "b_list").map(reals)).transpose()?,
            p_list: self.p_list.as_ref().map(|_| grid(&self.p_list, "p_list")).transpose()?,
            gamma_list: self.gamma_list.as_ref().map(|_| grid(&self.gamma_list, "gamma_list")).transpose()?,
            period: self.period.map(|r| r.0),
        })
    }

    /// Requested suites in canonical order, `all` expanded.
    pub fn suites(&self) -> Result<Vec<Suite>> {
        let requested = grid_or(&self.suite, "suite", vec![Suite::All])?;
        Ok(Suite::EACH
            .iter()
            .copied()
            .filter(|s| requested.contains(&Suite::All) || requested.contains(s))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalConfig {
    #[serde(alias = "b_list")]
    pub b: OneOrMany<Real>,
    #[serde(alias = "gamma_list")]
    pub gamma: OneOrMany<f64>,
    #[serde(default, alias = "p_list")]
    pub p: Option<OneOrMany<Exponent>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub b: Real,
    pub p: Exponent,
    #[serde(default, rename = "L", alias = "period")]
    pub period: Option<Real>,
    /// Density of the two-sliver set for the local estimate.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Number of random functions.
    #[serde(default)]
    pub seeds: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Bound(BoundConfig),
    Thickness(ThicknessConfig),
    Concentration(ConcentrationConfig),
    Verify(VerifyConfig),
    Extremal(ExtremalConfig),
    Classify(ClassifyConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bound(_) => "bound",
            Command::Thickness(_) => "thickness",
            Command::Concentration(_) => "concentration",
            Command::Verify(_) => "verify",
            Command::Extremal(_) => "extremal",
            Command::Classify(_) => "classify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub constants: BoundConstants,
    /// Output path; `--out` takes precedence.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.constants.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    /// Replaces the seed with `THICKSET_SEED` when that variable is set.
    pub fn apply_seed_override(&mut self) -> Result<()> {
        if let Ok(raw) = std::env::var(SEED_ENV) {
            self.seed = raw
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={raw:?} is not an unsigned integer")))?;
        }
        Ok(())
    }
}
