//! JSON schemas for the command-line runner. Every schema rejects unknown
//! fields so a typo fails loudly instead of silently running a different
//! experiment, and every artifact schema re-parses under the same rules.

use serde::{Deserialize, Serialize};

use crate::dict::{Dictionary, Family};
use crate::experiment::{Schedule, SyntheticModel};
use crate::loss::{Loss, LossKind};
use crate::penalty::{Atom, AtomKind, Regularizer};
use crate::seq::SeqVector;
use crate::solver::ErmProblem;
use crate::{Error, Result};

fn default_tol() -> f64 {
    1e-8
}

fn default_max_iter() -> usize {
    200_000
}

fn default_grid() -> usize {
    21
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryConfig {
    #[serde(rename = "type")]
    pub family: String,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    pub r: f64,
}

impl DictionaryConfig {
    pub fn build(&self) -> Result<Dictionary> {
        let family = match self.family.as_str() {
            "trig" => Family::Trig { decay: self.decay.unwrap_or(0.0) },
            "monomial" | "hat" => {
                if self.decay.is_some() {
                    return Err(Error::invalid("decay applies to the trig family only"));
                }
                if self.family == "monomial" {
                    Family::Monomial
                } else {
                    Family::Hat
                }
            }
            other => {
                return Err(Error::invalid(format!(
                    "unknown dictionary type {other:?} (expected trig, monomial, or hat)"
                )))
            }
        };
        Dictionary::new(family, self.size, self.r)
    }
}

/// `eta` may be a single number (shared by all atoms) or one value per atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EtaConfig {
    Uniform(f64),
    PerAtom(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl AtomConfig {
    fn atom_kind(&self) -> Result<AtomKind> {
        match self.kind.as_str() {
            "abs" => {
                if self.a.is_some() || self.b.is_some() {
                    return Err(Error::invalid("abs atoms take w only, not a/b"));
                }
                let w = self.w.ok_or_else(|| Error::invalid("abs atoms need a weight w"))?;
                Ok(AtomKind::Abs { weight: w })
            }
            "box" => {
                if self.w.is_some() {
                    return Err(Error::invalid("box atoms take a/b only, not w"));
                }
                let a = self.a.ok_or_else(|| Error::invalid("box atoms need a lower end a"))?;
                let b = self.b.ok_or_else(|| Error::invalid("box atoms need an upper end b"))?;
                Ok(AtomKind::Box { lo: a, hi: b })
            }
            "zero" => {
                if self.w.is_some() || self.a.is_some() || self.b.is_some() {
                    return Err(Error::invalid("zero atoms take no parameters"));
                }
                Ok(AtomKind::Zero)
            }
            other => Err(Error::invalid(format!(
                "unknown atom kind {other:?} (expected abs, box, or zero)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizerConfig {
    pub r: f64,
    pub eta: EtaConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<AtomConfig>>,
}

impl RegularizerConfig {
    /// `len` comes from the dictionary; eta arrays and atom lists must match.
    pub fn build(&self, len: usize) -> Result<Regularizer> {
        let etas: Vec<f64> = match &self.eta {
            EtaConfig::Uniform(e) => vec![*e; len],
            EtaConfig::PerAtom(v) => {
                if v.len() != len {
                    return Err(Error::dim(len, v.len()));
                }
                v.clone()
            }
        };
        let kinds: Vec<AtomKind> = match &self.h {
            None => vec![AtomKind::Zero; len],
            Some(hs) => {
                if hs.len() != len {
                    return Err(Error::dim(len, hs.len()));
                }
                hs.iter().map(|h| h.atom_kind()).collect::<Result<_>>()?
            }
        };
        let atoms = kinds
            .into_iter()
            .zip(etas)
            .map(|(kind, eta)| Atom::new(kind, eta, self.r))
            .collect::<Result<Vec<_>>>()?;
        Regularizer::new(atoms)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_bound: Option<f64>,
}

impl LossConfig {
    pub fn build(&self) -> Result<Loss> {
        match self.kind.as_str() {
            "power" => {
                let p = self.p.ok_or_else(|| Error::invalid("power losses need an exponent p"))?;
                Loss::new(LossKind::Power { p }, self.y_bound)
            }
            "hinge" | "logistic" => {
                if self.p.is_some() {
                    return Err(Error::invalid("p applies to power losses only"));
                }
                let kind =
                    if self.kind == "hinge" { LossKind::Hinge } else { LossKind::Logistic };
                Loss::new(kind, self.y_bound.or(Some(1.0)))
            }
            other => Err(Error::invalid(format!(
                "unknown loss kind {other:?} (expected power, hinge, or logistic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub dictionary: DictionaryConfig,
    pub regularizer: RegularizerConfig,
    pub loss: LossConfig,
    pub lambda: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl SolveConfig {
    pub fn build(&self) -> Result<ErmProblem> {
        let dict = self.dictionary.build()?;
        let reg = self.regularizer.build(dict.len())?;
        let loss = self.loss.build()?;
        ErmProblem::new(dict, reg, loss, self.xs.clone(), self.ys.clone(), self.lambda)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyConfig {
    pub dictionary: DictionaryConfig,
    pub regularizer: RegularizerConfig,
    pub true_u: Vec<f64>,
    pub noise_sigma: f64,
    pub lambda0: f64,
    pub gamma: f64,
    pub n_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl ConsistencyConfig {
    pub fn build(&self) -> Result<(SyntheticModel, Regularizer, Schedule)> {
        let dict = self.dictionary.build()?;
        let reg = self.regularizer.build(dict.len())?;
        let true_u = SeqVector::new(self.true_u.clone(), dict.r())?;
        let model = SyntheticModel::new(dict, true_u, self.noise_sigma)?;
        let schedule = Schedule::new(self.lambda0, self.gamma, self.regularizer.r)?;
        Ok((model, reg, schedule))
    }
}

/// Path diagnostics draw their fixed sample from the same synthetic model
/// used by consistency runs; the loss is the square loss by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub dictionary: DictionaryConfig,
    pub regularizer: RegularizerConfig,
    pub true_u: Vec<f64>,
    pub noise_sigma: f64,
    pub n: usize,
    pub lambdas: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl PathConfig {
    pub fn build(&self) -> Result<(SyntheticModel, Regularizer)> {
        let dict = self.dictionary.build()?;
        let reg = self.regularizer.build(dict.len())?;
        let true_u = SeqVector::new(self.true_u.clone(), dict.r())?;
        let model = SyntheticModel::new(dict, true_u, self.noise_sigma)?;
        Ok((model, reg))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationConfig {
    pub q: f64,
    pub t_const: f64,
    pub beta: f64,
    pub dim: usize,
    pub n_grid: Vec<usize>,
    pub taus: Vec<f64>,
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevConfig {
    pub p: f64,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub dictionary: DictionaryConfig,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

/// What the `solve` subcommand writes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionArtifact {
    pub u: Vec<f64>,
    pub objective: f64,
    pub kkt_residual: f64,
    pub duality_gap: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Sidecar written next to the consistency CSV: schedule flags and cell
/// counts, so an invalid schedule is visible in the artifacts themselves.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyMeta {
    pub lambda0: f64,
    pub gamma: f64,
    pub weak: bool,
    pub strong: bool,
    pub cells: usize,
    pub converged_cells: usize,
}
