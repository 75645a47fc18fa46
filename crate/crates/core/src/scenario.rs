//! Scenario files: a free group acting on the circle by PL maps, a finite quotient
//! given by permutations, lift offsets and verification parameters.
//!
//! ```toml
//! [generators]
//! a = [["0", "1/2"]]
//! b = [["0", "0"], ["1/2", "3/4"]]
//!
//! [quotient]
//! degree = 2
//! a = "(0 1)"
//! b = "()"
//!
//! [lifts]
//! offsets = [0, 0, 0]
//!
//! [verify]
//! samples = 200
//! seed = 42
//! max_word_len = 8
//! tau_budget = 4096
//! ```
//!
//! Generators keep the order of the `[generators]` table. `[lifts]` and `[verify]`
//! are optional.

use std::fmt::Write as _;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::pipeline::{EulerContext, PipelineError};
use crate::pl::{LiftPL, PlError};
use crate::quotient::{Perm, QuotientMap};
use crate::rotation::DEFAULT_BUDGET;
use crate::schreier::SchreierData;
use crate::verify::VerifyParams;
use crate::words::CircleAction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{generator}: {source}")]
    InvalidMap { generator: String, source: PlError },
    #[error("{0}")]
    Validation(String),
}

fn invalid(field: &str, message: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Validation(format!("{field}: {message}"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    generators: Option<toml::Table>,
    quotient: Option<toml::Table>,
    lifts: Option<RawLifts>,
    verify: Option<RawVerify>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLifts {
    offsets: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    samples: Option<usize>,
    seed: Option<u64>,
    max_word_len: Option<usize>,
    tau_budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionScenario {
    pub generators: Vec<String>,
    pub maps: Vec<LiftPL>,
    pub degree: usize,
    pub permutations: Vec<Perm>,
    /// Per Schreier generator; `None` means all zero.
    pub offsets: Option<Vec<i64>>,
    pub verify: VerifyParams,
    pub tau_budget: u64,
}

/// `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_breakpoints(name: &str, value: &toml::Value) -> Result<LiftPL, ScenarioError> {
    let field = format!("generators.{name}");
    let pairs = value.as_array().ok_or_else(|| invalid(&field, "expected an array of [x, y] pairs"))?;
    let mut out = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let p = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| invalid(&field, "expected [x, y] pairs"))?;
        let s = |v: &toml::Value| {
            v.as_str().map(str::to_string).ok_or_else(|| invalid(&field, "rationals must be strings"))
        };
        out.push([s(&p[0])?, s(&p[1])?]);
    }
    LiftPL::from_string_pairs(&out).map_err(|source| ScenarioError::InvalidMap { generator: name.to_string(), source })
}

impl ActionScenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
            ScenarioError::Parse { line, column, message: e.message().to_string() }
        })?;

        let gens = raw.generators.ok_or_else(|| invalid("generators", "missing section"))?;
        if gens.is_empty() {
            return Err(invalid("generators", "at least one generator is required"));
        }
        let mut generators = Vec::new();
        let mut maps = Vec::new();
        for (name, value) in &gens {
            if !is_identifier(name) {
                return Err(invalid(name, "generator names must be identifiers"));
            }
            generators.push(name.clone());
            maps.push(parse_breakpoints(name, value)?);
        }

        let quotient = raw.quotient.ok_or_else(|| invalid("quotient", "missing section"))?;
        let degree = match quotient.get("degree") {
            Some(toml::Value::Integer(d)) if *d > 0 => *d as usize,
            Some(_) => return Err(invalid("quotient.degree", "expected a positive integer")),
            None => return Err(invalid("quotient.degree", "missing")),
        };
        if let Some(key) = quotient.keys().find(|k| *k != "degree" && !gens.contains_key(*k)) {
            return Err(invalid(&format!("quotient.{key}"), "not a generator"));
        }
        let mut permutations = Vec::new();
        for name in &generators {
            let text = match quotient.get(name) {
                Some(toml::Value::String(s)) => s,
                Some(_) => return Err(invalid(name, "quotient image must be a cycle string")),
                None => return Err(invalid(name, "no quotient image")),
            };
            permutations.push(Perm::parse_cycles(text, degree).map_err(|e| invalid(name, e))?);
        }

        let v = raw.verify.unwrap_or(RawVerify { samples: None, seed: None, max_word_len: None, tau_budget: None });
        let defaults = VerifyParams::default();
        let verify = VerifyParams {
            samples: v.samples.unwrap_or(defaults.samples),
            seed: v.seed.unwrap_or(defaults.seed),
            max_word_len: v.max_word_len.unwrap_or(defaults.max_word_len),
        };
        let tau_budget = v.tau_budget.unwrap_or(DEFAULT_BUDGET);
        if tau_budget == 0 {
            return Err(invalid("verify.tau_budget", "must be at least 1"));
        }

        let scenario = ActionScenario {
            generators,
            maps,
            degree,
            permutations,
            offsets: raw.lifts.map(|l| l.offsets),
            verify,
            tau_budget,
        };
        if let Some(offsets) = &scenario.offsets {
            let rank = scenario.schreier()?.rank();
            if offsets.len() != rank {
                return Err(invalid(
                    "lifts.offsets",
                    format!("expected {rank} entries (the rank of K), found {}", offsets.len()),
                ));
            }
        }
        Ok(scenario)
    }

    /// Canonical text; `parse(emit())` reproduces the scenario.
    pub fn emit(&self) -> String {
        let mut out = String::from("[generators]\n");
        for (name, map) in self.generators.iter().zip(&self.maps) {
            let pairs: Vec<String> = map.to_string_pairs().iter().map(|[x, y]| format!("[\"{x}\", \"{y}\"]")).collect();
            let _ = writeln!(out, "{name} = [{}]", pairs.join(", "));
        }
        let _ = writeln!(out, "\n[quotient]\ndegree = {}", self.degree);
        for (name, p) in self.generators.iter().zip(&self.permutations) {
            let _ = writeln!(out, "{name} = \"{p}\"");
        }
        if let Some(offsets) = &self.offsets {
            let items: Vec<String> = offsets.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "\n[lifts]\noffsets = [{}]", items.join(", "));
        }
        let v = &self.verify;
        let _ = writeln!(
            out,
            "\n[verify]\nsamples = {}\nseed = {}\nmax_word_len = {}\ntau_budget = {}",
            v.samples, v.seed, v.max_word_len, self.tau_budget
        );
        out
    }

    /// SHA-256 of the canonical text, in hex.
    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.emit().as_bytes()))
    }

    pub fn action(&self) -> CircleAction {
        CircleAction::from_lifts(&self.maps)
    }

    pub fn quotient(&self) -> Result<QuotientMap, ScenarioError> {
        QuotientMap::new(self.degree, self.permutations.clone()).map_err(|e| invalid("quotient", e))
    }

    pub fn schreier(&self) -> Result<SchreierData, ScenarioError> {
        Ok(SchreierData::build(self.quotient()?))
    }

    /// Offsets in effect, zero when the scenario leaves them out.
    pub fn effective_offsets(&self, rank: usize) -> Vec<i64> {
        self.offsets.clone().unwrap_or_else(|| vec![0; rank])
    }

    pub fn context(&self) -> Result<EulerContext, PipelineError> {
        let schreier = self.schreier().expect("validated on parse");
        let offsets = self.effective_offsets(schreier.rank());
        EulerContext::new(self.action(), schreier, &offsets, self.tau_budget)
    }
}
