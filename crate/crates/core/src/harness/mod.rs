//! Scenario registry behind the `pcnls` command line: seeded corpora, run
//! manifests, and one scenario per command, each producing named PASS/FAIL
//! checks and deterministic artifacts.

pub mod corpus;
pub mod manifest;
pub mod oracles;
pub mod scenarios;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub use corpus::{corpus, CorpusKind};
pub use manifest::{parse_manifest, DataSpec, GridSpec, Manifest};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Conserve,
    TransformId,
    Highlow,
    Lwp,
    Norms,
    Oracle,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Conserve,
        Command::TransformId,
        Command::Highlow,
        Command::Lwp,
        Command::Norms,
        Command::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Conserve => "conserve",
            Command::TransformId => "transform-id",
            Command::Highlow => "highlow",
            Command::Lwp => "lwp",
            Command::Norms => "norms",
            Command::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Manifest(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// Human-readable acceptance bound, e.g. `<= 1e-10`.
    pub bound: String,
    pub detail: String,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= tol,
            value,
            bound: format!("<= {tol:e}"),
            detail: String::new(),
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            passed: (lo..=hi).contains(&value),
            value,
            bound: format!("in [{lo}, {hi}]"),
            detail: String::new(),
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, value: f64, bound: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            value,
            bound: bound.into(),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn line(&self, command: Command) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {command}/{} value={:.6e} bound={}", self.name, self.value, self.bound);
        if !self.detail.is_empty() {
            s.push_str(" (");
            s.push_str(&self.detail);
            s.push(')');
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct Artifact {
    pub file_name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    pub fn json<T: Serialize>(file_name: &str, value: &T) -> Result<Self> {
        let mut contents = serde_json::to_vec_pretty(value)?;
        contents.push(b'\n');
        Ok(Self {
            file_name: file_name.to_string(),
            contents,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub command: Command,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks.iter().map(|c| c.line(self.command)).collect()
    }

    /// Writes every artifact plus `<command>_checks.json` into `dir`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for a in &self.artifacts {
            fs::write(dir.join(&a.file_name), &a.contents)?;
        }
        let checks = Artifact::json(&format!("{}_checks.json", self.command), &self.checks)?;
        fs::write(dir.join(checks.file_name), checks.contents)?;
        Ok(())
    }
}

pub fn run(command: Command, manifest: &Manifest) -> Result<ScenarioOutcome> {
    manifest.validate()?;
    let (checks, artifacts) = match command {
        Command::Conserve => scenarios::conserve(manifest)?,
        Command::TransformId => scenarios::transform_id(manifest)?,
        Command::Highlow => scenarios::highlow(manifest)?,
        Command::Lwp => scenarios::lwp(manifest)?,
        Command::Norms => scenarios::norms(manifest)?,
        Command::Oracle => scenarios::oracle(manifest)?,
    };
    Ok(ScenarioOutcome {
        command,
        checks,
        artifacts,
    })
}

/// Runs independent scenarios on worker threads; results keep input order.
pub fn run_many(commands: &[Command], manifest: &Manifest) -> Vec<Result<ScenarioOutcome>> {
    commands.par_iter().map(|&c| run(c, manifest)).collect()
}
