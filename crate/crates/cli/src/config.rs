//! Run configuration: a TOML file whose keys mirror the long flags, with
//! flags taking precedence.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use treegrow::rational::{parse_rational, parse_rational_list};
use treegrow::sgtrees::WeightSequence;
use treegrow::subtree_model::Theta;
use treegrow::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Simply generated trees, one leaf per step.
    Sg,
    /// Simply generated trees with offspring in `dℕ`, `d` leaves per step.
    SgArith,
    /// Random subtrees of the Ulam–Harris tree.
    Subtree,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Sg => "sg",
            Model::SgArith => "sg-arith",
            Model::Subtree => "subtree",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Tables,
    Tp2,
    RatioChain,
    KernelInterchange,
    Bijection,
    SubsetCoupling,
    ShuffleInvariance,
    Stats,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

/// Offspring weights as given: an explicit finite list, or `ones`
/// (`w_i = 1` for every `i`, truncated to whatever sizes are needed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightSpec {
    Ones,
    List(Vec<Q>),
}

impl WeightSpec {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        if text.trim() == "ones" {
            return Ok(WeightSpec::Ones);
        }
        let values = parse_rational_list(text).with_context(|| format!("bad weight list `{text}`"))?;
        if values.is_empty() {
            bail!("empty weight list");
        }
        Ok(WeightSpec::List(values))
    }

    /// The weights as seen by trees with at most `size` vertices.
    pub fn resolve(&self, size: usize) -> anyhow::Result<WeightSequence> {
        Ok(match self {
            WeightSpec::Ones => WeightSequence::from_fn(|_| Q::from_integer(1.into()), size.max(2))?,
            WeightSpec::List(values) => WeightSequence::new(values.clone())?,
        })
    }
}

pub fn parse_theta(text: &str) -> anyhow::Result<Theta> {
    let values = parse_rational_list(text).with_context(|| format!("bad theta `{text}`"))?;
    Ok(Theta::new(values)?)
}

/// A list in the config file: `"1,2/3"` or `[1, "2/3"]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Text(String),
    Items(Vec<Scalar>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl ListValue {
    pub fn to_text(&self) -> anyhow::Result<String> {
        match self {
            ListValue::Text(s) => Ok(s.clone()),
            ListValue::Items(items) => {
                let parts = items
                    .iter()
                    .map(|x| match x {
                        Scalar::Int(i) => Ok(i.to_string()),
                        Scalar::Text(s) => parse_rational(s).map(|_| s.clone()),
                    })
                    .collect::<treegrow::Result<Vec<_>>>()?;
                Ok(parts.join(","))
            }
        }
    }
}

/// Every key a config file may set; all optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub model: Option<Model>,
    pub w: Option<ListValue>,
    pub theta: Option<ListValue>,
    pub d: Option<u32>,
    pub n: Option<usize>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub dot: Option<PathBuf>,
    pub suite: Option<Suite>,
    pub samples: Option<u64>,
    pub seeds: Option<u64>,
    pub chains: Option<u64>,
    pub horizon: Option<usize>,
    pub report: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("bad config {}", path.display()))
    }

    pub fn weights(&self) -> anyhow::Result<Option<String>> {
        self.w.as_ref().map(ListValue::to_text).transpose()
    }

    pub fn theta(&self) -> anyhow::Result<Option<String>> {
        self.theta.as_ref().map(ListValue::to_text).transpose()
    }
}

/// Resolved settings for `grow`.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: Model,
    pub weights: Option<WeightSpec>,
    pub theta: Option<Theta>,
    pub d: u32,
    pub n: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub dot: Option<PathBuf>,
}

impl RunConfig {
    /// Checks the pieces each model needs, before anything runs.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n == 0 {
            bail!("n must be at least 1");
        }
        match self.model {
            Model::Sg | Model::SgArith => {
                let Some(w) = &self.weights else {
                    bail!("model {} needs --w", self.model);
                };
                if self.model == Model::Sg && self.d != 1 {
                    bail!("model sg grows one leaf at a time; use --model sg-arith for d = {}", self.d);
                }
                if self.d == 0 {
                    bail!("d must be positive");
                }
                if !(self.n - 1).is_multiple_of(self.d as usize) {
                    bail!("n = {} is not 1 plus a multiple of d = {}", self.n, self.d);
                }
                w.resolve(self.n)?.validate(self.d)?;
            }
            Model::Subtree => {
                if self.theta.is_none() {
                    bail!("model subtree needs --theta");
                }
            }
        }
        Ok(())
    }
}
