use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use jitower::analysis::{brute_force_growth, growth_table, GrowthTable, SUBMODULE_GUARD};
use jitower::config::load_config;
use jitower::report::{all_sections, certify, parse_sections, Report, TowerSummary};
use jitower::serial::{load, save};
use jitower::tower::TowerState;
use jitower::Error;

#[derive(Parser)]
#[command(name = "jitower", version, about = "Build and check finite levels of iterated semidirect product towers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ModeFlags {
    /// Build the subgroup list even when the prime-size gate fails
    #[arg(long)]
    force_hlist: bool,
    /// Accept delta <= 1 - epsilon
    #[arg(long)]
    relaxed: bool,
    /// Allow a non-summable order budget
    #[arg(long)]
    test_budget: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tower from a configuration file
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Tower file to write
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        /// Comma-separated check sections
        #[arg(long)]
        checks: Option<String>,
        #[command(flatten)]
        modes: ModeFlags,
    },
    /// Add levels to a saved tower
    Extend {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Defaults to overwriting the input
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        checks: Option<String>,
        #[command(flatten)]
        modes: ModeFlags,
    },
    /// Recompute certificates for a saved tower
    Verify {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        checks: Option<String>,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normal subgroup counts of one level
    Normals {
        #[arg(long)]
        tower: PathBuf,
        /// Defaults to the highest enumerable level
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        max_index: Option<u128>,
    },
    /// Plain-text summary of a saved tower
    Report {
        #[arg(long)]
        tower: PathBuf,
    },
}

enum Failure {
    Input(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn apply_modes(t: &mut TowerState, m: &ModeFlags) {
    let c = t.config_mut();
    c.modes.relaxed |= m.relaxed;
    c.modes.force_hlist |= m.force_hlist;
}

fn sections(list: Option<&str>) -> Result<Vec<String>, Error> {
    list.map_or_else(|| Ok(all_sections()), parse_sections)
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    let json = report.to_json();
    match out {
        Some(p) => std::fs::write(p, json).map_err(Error::from)?,
        None => print!("{json}"),
    }
    if report.exit_code() == 0 {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn truncation(e: Option<Error>) -> Option<String> {
    e.map(|e| format!("stopped at the enumeration boundary: {e}"))
}

#[derive(Serialize)]
struct NormalsOutput {
    level: usize,
    order: usize,
    table: GrowthTable,
    oracle: String,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build { config, out, depth, checks, modes } => {
            let mut run = load_config(&config)?;
            let c = &mut run.tower;
            c.modes.relaxed |= modes.relaxed;
            c.modes.force_hlist |= modes.force_hlist;
            if modes.test_budget && !c.modes.test_budget {
                c.modes.test_budget = true;
                c.budget = jitower::words::OrderBudget::test(c.budget.scale, c.budget.base)?;
            }
            if let Some(d) = depth {
                c.depth = d;
            }
            let target = c.depth;
            let mut t = TowerState::init(run.tower.clone())?;
            let stop = t.extend_to(target)?;
            if let Some(path) = out.as_ref().or(run.tower_path.as_ref()) {
                save(&t, path)?;
            }
            let list = sections(checks.as_deref().or(run.checks.as_deref()))?;
            let report = Report::new("build", &t, certify(&t, &list)?, truncation(stop));
            emit(&report, run.report_path.as_deref())
        }
        Command::Extend { tower, depth, out, checks, modes } => {
            let mut t = load(&tower)?;
            apply_modes(&mut t, &modes);
            if modes.test_budget {
                return Err(Error::Config("the budget mode is fixed when a tower is built".into()).into());
            }
            t.config_mut().depth = depth.max(t.config().depth);
            t.config().validate()?;
            let stop = t.extend_to(depth)?;
            save(&t, out.as_deref().unwrap_or(&tower))?;
            let report = Report::new("extend", &t, certify(&t, &sections(checks.as_deref())?)?, truncation(stop));
            emit(&report, None)
        }
        Command::Verify { tower, checks, out } => {
            let t = load(&tower)?;
            let report = Report::new("verify", &t, certify(&t, &sections(checks.as_deref())?)?, None);
            emit(&report, out.as_deref())
        }
        Command::Normals { tower, level, max_index } => {
            let t = load(&tower)?;
            let k = match level {
                Some(k) if k <= t.height() => k,
                Some(k) => return Err(Error::Config(format!("level {k} is not built")).into()),
                None => (0..=t.height()).rev().find(|&k| t.group(k).is_ok()).unwrap_or(0),
            };
            let g = t.group(k)?;
            let max = max_index.unwrap_or(g.order() as u128);
            let (table, oracle) = match growth_table(&t, k, max, SUBMODULE_GUARD) {
                Ok(table) => {
                    let oracle = match brute_force_growth(&g.table, max) {
                        Ok(b) if b == table => "agrees".to_string(),
                        Ok(_) => "disagrees".to_string(),
                        Err(e) => format!("not run: {e}"),
                    };
                    (table, oracle)
                }
                Err(e @ Error::GuardExceeded(_)) => {
                    let mut partial = brute_force_growth(&g.table, max).unwrap_or(GrowthTable {
                        max_index: max,
                        rows: Vec::new(),
                        truncated: true,
                    });
                    partial.truncated = true;
                    (partial, format!("classification stopped: {e}"))
                }
                Err(e) => return Err(e.into()),
            };
            let failed = oracle == "disagrees";
            let out = NormalsOutput { level: k, order: g.order(), table, oracle };
            println!("{}", serde_json::to_string_pretty(&out).expect("serialises"));
            if failed {
                Err(Failure::Checks)
            } else {
                Ok(())
            }
        }
        Command::Report { tower } => {
            let t = load(&tower)?;
            let s = TowerSummary::of(&t);
            println!("d = {}, epsilon = {}, primes = {:?}, budget = {} * {}^|w|, modes = {}",
                s.d, s.epsilon, s.primes, s.budget[0], s.budget[1], s.modes.join(" "));
            println!("seed order {}, frozen words {}", s.seed_order, s.frozen_words);
            println!("{:>5} {:>5} {:>6} {:>14} {:>8} {:>4} {:>4}", "level", "p", "dim V", "|G|", "delta", "r", "s");
            for l in &s.levels {
                println!(
                    "{:>5} {:>5} {:>6} {:>14} {:>8} {:>4} {:>4}{}",
                    l.level,
                    l.prime,
                    l.dim,
                    l.group_order,
                    l.delta,
                    l.words,
                    l.subgroups,
                    if l.relaxed { "  relaxed" } else { "" }
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
