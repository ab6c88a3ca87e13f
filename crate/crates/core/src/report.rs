//! Assembling certificate sections for a tower into a JSON report.

use serde::Serialize;

use crate::analysis::{betti_checks, normal_closure_check, normals_checks, pi_graded_check, BRUTE_FORCE_CAP, SUBMODULE_GUARD};
use crate::cert::{Certificate, Check, Status};
use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::forge::fmt_ratio;
use crate::group::ElementSet;
use crate::relmod::gaschuetz_check;
use crate::tower::TowerState;

pub const SECTIONS: [&str; 8] = ["gaschuetz", "conditions", "forge", "hlist", "closure", "normals", "grading", "betti"];

/// Groups up to this order get their full subgroup lattice checked.
const FULL_LATTICE_ORDER: usize = 64;

pub fn parse_sections(list: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for s in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if !SECTIONS.contains(&s) {
            return Err(Error::Config(format!("unknown check section {s:?}; known: {}", SECTIONS.join(","))));
        }
        if !out.iter().any(|x| x == s) {
            out.push(s.to_string());
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty check list".into()));
    }
    Ok(out)
}

fn gaschuetz_checks(t: &TowerState) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for k in 1..=t.height() {
        let base = t.level(k).base().clone();
        let f = PrimeField::new(t.level(k).prime)?;
        let (subgroups, sampled): (Vec<ElementSet>, bool) = if base.order() <= FULL_LATTICE_ORDER {
            (base.all_subgroups(10_000)?, false)
        } else {
            let mut s = base.cyclic_subgroup_classes();
            s.push(base.elements().collect());
            (s, true)
        };
        for mut c in gaschuetz_check(f, &base, &subgroups)? {
            c.id = format!("level{k}-{}", c.id);
            if sampled && c.id.ends_with("invariants") && c.status == Status::Pass {
                c.status = Status::Sampled;
                c.detail.push_str(" (cyclic subgroups up to conjugacy plus the whole group)");
            }
            checks.push(c);
        }
    }
    Ok(checks)
}

fn enumerable(t: &TowerState, k: usize) -> bool {
    t.group_order(k).is_some_and(|o| o <= t.config().enumeration_cap as u128)
}

/// Runs the selected sections, in the fixed section order.
pub fn certify(t: &TowerState, sections: &[String]) -> Result<Certificate> {
    let mut cert = Certificate::default();
    for &name in SECTIONS.iter().filter(|s| sections.iter().any(|x| x == *s)) {
        let checks = match name {
            "gaschuetz" => gaschuetz_checks(t)?,
            "conditions" => t.condition_checks()?,
            "forge" => t.forge_checks()?,
            "hlist" => t.hlist_checks()?,
            "closure" => {
                let mut v = Vec::new();
                for i in 1..t.height() {
                    if enumerable(t, i) {
                        v.push(normal_closure_check(t, i, SUBMODULE_GUARD)?);
                    }
                }
                v
            }
            "normals" => {
                let mut v = Vec::new();
                for k in 2..=t.height() {
                    if enumerable(t, k) && t.group_order(k).is_some_and(|o| o <= BRUTE_FORCE_CAP as u128) {
                        v.extend(normals_checks(t, k, SUBMODULE_GUARD)?);
                    }
                }
                v
            }
            "grading" => {
                let mut v = Vec::new();
                for k in 1..=t.height() {
                    if enumerable(t, k) {
                        v.extend(pi_graded_check(t, k)?);
                    }
                }
                v
            }
            "betti" => betti_checks(t),
            _ => unreachable!("section names are validated"),
        };
        if !checks.is_empty() {
            cert.push(name, checks);
        }
    }
    Ok(cert)
}

pub fn all_sections() -> Vec<String> {
    SECTIONS.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub sampled: usize,
    pub not_guaranteed: usize,
    pub skipped: usize,
    pub relaxed: usize,
}

impl Summary {
    pub fn of(cert: &Certificate) -> Self {
        let mut s = Summary::default();
        for c in cert.checks() {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Sampled => s.sampled += 1,
                Status::NotGuaranteed => s.not_guaranteed += 1,
                Status::Skipped => s.skipped += 1,
                Status::Relaxed => s.relaxed += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub prime: u32,
    pub dim: usize,
    pub group_order: String,
    pub delta: String,
    pub words: usize,
    pub subgroups: usize,
    pub gate: bool,
    pub relaxed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerSummary {
    pub d: usize,
    pub epsilon: String,
    pub primes: Vec<u32>,
    pub budget: [u64; 2],
    pub modes: Vec<&'static str>,
    pub seed_order: usize,
    pub frozen_words: usize,
    pub levels: Vec<LevelSummary>,
}

impl TowerSummary {
    pub fn of(t: &TowerState) -> Self {
        let c = t.config();
        let mut modes = Vec::new();
        if c.modes.relaxed {
            modes.push("relaxed");
        }
        if c.modes.force_hlist {
            modes.push("force-hlist");
        }
        if c.modes.test_budget {
            modes.push("test-budget");
        }
        if modes.is_empty() {
            modes.push("strict");
        }
        let levels = t
            .levels()
            .iter()
            .map(|l| LevelSummary {
                level: l.index,
                prime: l.prime,
                dim: l.dim(),
                group_order: match l.order() {
                    Some(o) => o.to_string(),
                    None => format!("{}^{}*{}", l.prime, l.dim(), l.base().order()),
                },
                delta: fmt_ratio(&l.record.delta),
                words: l.record.words.len(),
                subgroups: l.record.hlist.len(),
                gate: l.record.gate,
                relaxed: l.record.relaxed,
            })
            .collect();
        TowerSummary {
            d: c.d,
            epsilon: fmt_ratio(&c.epsilon),
            primes: c.primes.clone(),
            budget: [c.budget.scale, c.budget.base],
            modes,
            seed_order: t.seed().order(),
            frozen_words: t.ledger().entries().len(),
            levels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    /// `ok`, `fail` or `truncated`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<String>,
    pub summary: Summary,
    pub tower: TowerSummary,
    pub certificate: Certificate,
}

impl Report {
    pub fn new(command: &str, t: &TowerState, cert: Certificate, truncated: Option<String>) -> Self {
        let status = if !cert.all_passed() {
            "fail"
        } else if truncated.is_some() {
            "truncated"
        } else {
            "ok"
        };
        Report {
            command: command.to_string(),
            status: status.to_string(),
            truncated,
            summary: Summary::of(&cert),
            tower: TowerSummary::of(t),
            certificate: cert,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn exit_code(&self) -> i32 {
        if self.certificate.all_passed() {
            0
        } else {
            1
        }
    }
}
