//! Structured certificate reports.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Passed on a sample of a quantifier that ranges over more than was checked.
    Sampled,
    /// The hypothesis that would guarantee the property was not met.
    NotGuaranteed,
    Skipped,
    /// Passed only because a gate was bypassed by a mode flag.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Check { id: id.into(), anchor: anchor.into(), status, detail: detail.into(), witnesses: Vec::new() }
    }

    pub fn pass_if(id: impl Into<String>, anchor: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self::new(id, anchor, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    pub fn with_witnesses(mut self, w: Vec<String>) -> Self {
        self.witnesses = w;
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub sections: Vec<Section>,
}

impl Certificate {
    pub fn push(&mut self, name: impl Into<String>, checks: Vec<Check>) {
        self.sections.push(Section { name: name.into(), checks });
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.sections.iter().flat_map(|s| s.checks.iter())
    }

    pub fn all_passed(&self) -> bool {
        !self.checks().any(Check::failed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks().filter(|c| c.failed()).collect()
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}
