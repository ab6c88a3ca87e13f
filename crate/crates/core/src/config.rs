//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::group::{GroupTable, DEFAULT_ENUMERATION_CAP};
use crate::serial::parse_ratio;
use crate::tower::{Modes, TowerConfig};
use crate::words::OrderBudget;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tower: TowerConfig,
    pub tower_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub checks: Option<String>,
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: bad number {v:?}")))
}

/// Parses a configuration; relative paths resolve against `base_dir`.
/// Missing keys take the standard tower's values.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let std = TowerConfig::standard();
    let mut d = std.d;
    let mut primes = std.primes.clone();
    let mut epsilon = std.epsilon;
    let mut scale = std.budget.scale;
    let mut base = std.budget.base;
    let mut depth = std.depth;
    let mut modes = Modes::default();
    let mut cap = DEFAULT_ENUMERATION_CAP;
    let mut seed = None;
    let mut tower_path = None;
    let mut report_path = None;
    let mut checks = None;
    let mut seen = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
        if seen.contains(&key) {
            return Err(Error::Config(format!("line {}: duplicate key {key}", n + 1)));
        }
        seen.push(key);
        match key {
            "d" => d = parse_num(key, value)?,
            "primes" => {
                primes = value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?
            }
            "epsilon" => epsilon = parse_ratio(value).map_err(|_| Error::Config(format!("epsilon: bad rational {value:?}")))?,
            "budget_scale" => scale = parse_num(key, value)?,
            "budget_base" => base = parse_num(key, value)?,
            "depth" => depth = parse_num(key, value)?,
            "relaxed" => modes.relaxed = parse_bool(key, value)?,
            "force_hlist" => modes.force_hlist = parse_bool(key, value)?,
            "test_budget" => modes.test_budget = parse_bool(key, value)?,
            "cap" => cap = parse_num(key, value)?,
            "seed" => {
                if value != "trivial" {
                    let path = base_dir.join(value);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Config(format!("seed file {}: {e}", path.display())))?;
                    seed = Some(GroupTable::parse_seed(&text)?);
                }
            }
            "tower" => tower_path = Some(base_dir.join(value)),
            "report" => report_path = Some(base_dir.join(value)),
            "checks" => checks = Some(value.to_string()),
            _ => return Err(Error::Config(format!("line {}: unknown key {key}", n + 1))),
        }
    }
    let budget = if modes.test_budget { OrderBudget::test(scale, base)? } else { OrderBudget::new(scale, base, d)? };
    let tower = TowerConfig { d, primes, epsilon, budget, seed, depth, modes, enumeration_cap: cap };
    if tower_path.is_some() && tower_path == report_path {
        return Err(Error::Config("tower and report paths coincide".into()));
    }
    Ok(RunConfig { tower, tower_path, report_path, checks })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}
