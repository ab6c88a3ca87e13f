//! Line-oriented tower files. Vectors are written as digit strings in base
//! `p` (`0-9a-z`) when `p ≤ 36`, else as comma-separated decimals.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ff::{PrimeField, Subspace};
use crate::forge::{fmt_ratio, Rational, Splitting};
use crate::gmodule::GModule;
use crate::group::{ElementSet, GroupTable};
use crate::relmod::{boundary_kernel, check_coprime};
use crate::tower::{BuildKind, BuildRecord, FrozenLedger, FrozenWord, Level, Modes, TowerConfig, TowerState};
use crate::words::{OrderBudget, Word};

pub const MAGIC: &str = "JITOWER";
pub const VERSION: u32 = 1;

pub fn encode_vector(p: u32, v: &[u32]) -> String {
    if p <= 36 {
        v.iter().map(|&x| char::from_digit(x, 36).expect("residue below 36")).collect()
    } else {
        v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

pub fn decode_vector(p: u32, len: usize, s: &str) -> Result<Vec<u32>> {
    let out: Vec<u32> = if p <= 36 {
        s.chars()
            .map(|c| c.to_digit(36).filter(|&x| x < p).ok_or_else(|| Error::Format(format!("bad digit {c:?} for p = {p}"))))
            .collect::<Result<_>>()?
    } else if s.is_empty() {
        Vec::new()
    } else {
        s.split(',')
            .map(|x| x.parse::<u32>().ok().filter(|&x| x < p).ok_or_else(|| Error::Format(format!("bad entry {x:?}"))))
            .collect::<Result<_>>()?
    };
    if out.len() != len {
        return Err(Error::Format(format!("vector of length {}, expected {len}", out.len())));
    }
    Ok(out)
}

fn modes_text(m: &Modes) -> String {
    let mut flags = Vec::new();
    if m.relaxed {
        flags.push("relaxed");
    }
    if m.force_hlist {
        flags.push("force-hlist");
    }
    if m.test_budget {
        flags.push("test-budget");
    }
    if flags.is_empty() {
        "strict".into()
    } else {
        flags.join(" ")
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

pub fn to_text(t: &TowerState) -> String {
    let c = t.config();
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "version {VERSION}");
    let _ = writeln!(s, "d {}", c.d);
    let _ = writeln!(s, "epsilon {}", fmt_ratio(&c.epsilon));
    let _ = writeln!(s, "primes {}", join(&c.primes));
    let _ = writeln!(s, "budget {} {}", c.budget.scale, c.budget.base);
    let _ = writeln!(s, "modes {}", modes_text(&c.modes));
    let _ = writeln!(s, "depth {}", c.depth);
    let _ = writeln!(s, "cap {}", c.enumeration_cap);
    match &c.seed {
        None => {
            let _ = writeln!(s, "seed trivial");
        }
        Some(g) => {
            let _ = writeln!(s, "seed table");
            s.push_str(&g.to_seed_text());
            let _ = writeln!(s, "end-seed");
        }
    }
    let _ = writeln!(s, "frozen {}", t.ledger().entries().len());
    for e in t.ledger().entries() {
        let _ = writeln!(s, "{} {} {}", e.level, e.order, e.word);
    }
    let _ = writeln!(s, "levels {}", t.height());
    for l in t.levels() {
        let p = l.prime;
        let r = &l.record;
        let _ = writeln!(s, "level {}", l.index);
        let _ = writeln!(s, "prime {p}");
        let _ = writeln!(s, "ambient {}", l.module.ambient_dim());
        let _ = writeln!(s, "kind {}", if r.kind == BuildKind::Seed { "seed" } else { "forge" });
        let _ = writeln!(s, "delta {}", fmt_ratio(&r.delta));
        let _ = writeln!(s, "gate {}", r.gate as u8);
        let _ = writeln!(s, "relaxed {}", r.relaxed as u8);
        let _ = writeln!(s, "words {}", r.words.len());
        for (w, o) in &r.words {
            let _ = writeln!(s, "{o} {w}");
        }
        let _ = writeln!(s, "hlist {}", r.hlist.len());
        for h in &r.hlist {
            let _ = writeln!(s, "{}", join(h));
        }
        let killed = l.module.killed();
        let _ = writeln!(s, "killed {}", killed.dim());
        for row in killed.basis() {
            let _ = writeln!(s, "{}", encode_vector(p, row));
        }
        let _ = writeln!(s, "decorations {}", l.decorations.len());
        for v in &l.decorations {
            let _ = writeln!(s, "{}", encode_vector(p, v));
        }
        let _ = writeln!(s, "split {}", encode_vector(p, &l.splitting.total));
    }
    let _ = writeln!(s, "end");
    s
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let (i, l) = self.it.next().ok_or_else(|| Error::Format(format!("truncated after line {}", self.last)))?;
        self.last = i + 1;
        Ok(l)
    }

    /// The rest of a line `key rest`.
    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        let at = self.last;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest),
            _ if line == key => Ok(""),
            _ => Err(Error::Format(format!("line {at}: expected `{key}`, found {line:?}"))),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        let at = self.last;
        v.trim().parse().map_err(|_| Error::Format(format!("line {at}: bad value for `{key}`: {v:?}")))
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split_whitespace().map(|x| x.parse().map_err(|_| Error::Format(format!("bad list entry {x:?}")))).collect()
}

pub fn parse_ratio(s: &str) -> Result<Rational> {
    let bad = || Error::Format(format!("bad rational {s:?}"));
    let (n, d) = s.trim().split_once('/').unwrap_or((s.trim(), "1"));
    let n: i128 = n.trim().parse().map_err(|_| bad())?;
    let d: i128 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn invariant(k: usize, what: &str, e: Error) -> Error {
    Error::Invariant(format!("level {k}: {what}: {e}"))
}

pub fn from_text(text: &str) -> Result<TowerState> {
    let mut lines = Lines { it: text.lines().enumerate(), last: 0 };
    if lines.next()? != MAGIC {
        return Err(Error::Format("not a tower file".into()));
    }
    let version: u32 = lines.parse("version")?;
    if version != VERSION {
        return Err(Error::Format(format!("version {version}, expected {VERSION}")));
    }
    let d: usize = lines.parse("d")?;
    let epsilon = parse_ratio(lines.field("epsilon")?)?;
    let primes: Vec<u32> = parse_list(lines.field("primes")?)?;
    let budget: Vec<u64> = parse_list(lines.field("budget")?)?;
    if budget.len() != 2 {
        return Err(Error::Format("budget needs scale and base".into()));
    }
    let mut modes = Modes::default();
    for flag in lines.field("modes")?.split_whitespace() {
        match flag {
            "strict" => {}
            "relaxed" => modes.relaxed = true,
            "force-hlist" => modes.force_hlist = true,
            "test-budget" => modes.test_budget = true,
            other => return Err(Error::Format(format!("unknown mode {other:?}"))),
        }
    }
    let budget = if modes.test_budget {
        OrderBudget::test(budget[0], budget[1])?
    } else {
        OrderBudget::new(budget[0], budget[1], d)?
    };
    let depth: usize = lines.parse("depth")?;
    let enumeration_cap: usize = lines.parse("cap")?;
    let seed = match lines.field("seed")? {
        "trivial" => None,
        "table" => {
            let mut body = String::new();
            loop {
                let l = lines.next()?;
                if l == "end-seed" {
                    break;
                }
                body.push_str(l);
                body.push('\n');
            }
            Some(GroupTable::parse_seed(&body)?)
        }
        other => return Err(Error::Format(format!("unknown seed {other:?}"))),
    };
    let config = TowerConfig { d, primes, epsilon, budget, seed, depth, modes, enumeration_cap };

    let mut ledger = FrozenLedger::default();
    let n_frozen: usize = lines.parse("frozen")?;
    for _ in 0..n_frozen {
        let l = lines.next()?;
        let mut parts = l.splitn(3, ' ');
        let bad = || Error::Format(format!("bad frozen entry {l:?}"));
        let level: usize = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let order: u64 = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let word = Word::parse(d, parts.next().ok_or_else(bad)?)?;
        if !ledger.insert(FrozenWord { word, order, level }) {
            return Err(bad());
        }
    }

    let mut state = TowerState::from_parts(config, ledger)?;
    let n_levels: usize = lines.parse("levels")?;
    if n_levels == 0 || n_levels > state.config().primes.len() {
        return Err(Error::Format(format!("level count {n_levels} out of range")));
    }
    for k in 1..=n_levels {
        let level = read_level(&mut lines, &state, k)?;
        state.push_level(level);
    }
    if lines.next()? != "end" {
        return Err(Error::Format("missing end marker".into()));
    }
    Ok(state)
}

fn read_level(lines: &mut Lines<'_>, state: &TowerState, k: usize) -> Result<Level> {
    let d = state.config().d;
    let index: usize = lines.parse("level")?;
    if index != k {
        return Err(Error::Format(format!("level {index} where {k} was expected")));
    }
    let prime: u32 = lines.parse("prime")?;
    if prime != state.config().primes[k - 1] {
        return Err(Error::Invariant(format!("level {k}: prime {prime} differs from the configured sequence")));
    }
    let f = PrimeField::new(prime)?;
    let base = state.group(k - 1)?.table.clone();
    check_coprime(prime, &base).map_err(|e| invariant(k, "prime", e))?;
    let ambient: usize = lines.parse("ambient")?;
    if ambient != d * base.order() {
        return Err(Error::Invariant(format!("level {k}: ambient {ambient}, expected {}", d * base.order())));
    }
    let kind = match lines.field("kind")? {
        "seed" if k == 1 => BuildKind::Seed,
        "forge" if k > 1 => BuildKind::Forge,
        other => return Err(Error::Format(format!("level {k}: unexpected kind {other:?}"))),
    };
    let delta = parse_ratio(lines.field("delta")?)?;
    let flag = |s: &str| match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::Format(format!("bad flag {s:?}"))),
    };
    let gate = flag(lines.field("gate")?)?;
    let relaxed = flag(lines.field("relaxed")?)?;
    let n_words: usize = lines.parse("words")?;
    let mut words = Vec::with_capacity(n_words);
    for _ in 0..n_words {
        let l = lines.next()?;
        let (o, w) = l.split_once(' ').ok_or_else(|| Error::Format(format!("bad word entry {l:?}")))?;
        let o: u64 = o.parse().map_err(|_| Error::Format(format!("bad word order {o:?}")))?;
        words.push((Word::parse(d, w)?, o));
    }
    let n_h: usize = lines.parse("hlist")?;
    let mut hlist: Vec<ElementSet> = Vec::with_capacity(n_h);
    for _ in 0..n_h {
        let h: ElementSet = parse_list(lines.next()?)?;
        if h.iter().any(|&x| x as usize >= base.order()) || base.subgroup_closure(&h) != h {
            return Err(Error::Invariant(format!("level {k}: listed subgroup is not a subgroup")));
        }
        hlist.push(h);
    }

    let dim_s: usize = lines.parse("killed")?;
    let mut rows = Vec::with_capacity(dim_s);
    for _ in 0..dim_s {
        rows.push(decode_vector(prime, ambient, lines.next()?)?);
    }
    let killed = Subspace::from_rref_rows(f, ambient, rows).map_err(|e| invariant(k, "killed basis", e))?;
    let carrier = boundary_kernel(f, &base);
    let module = GModule::new(f, base.clone(), d, carrier, killed).map_err(|e| invariant(k, "killed subspace", e))?;

    let n_dec: usize = lines.parse("decorations")?;
    if n_dec != d {
        return Err(Error::Format(format!("level {k}: {n_dec} decorations, expected {d}")));
    }
    let mut decorations = Vec::with_capacity(d);
    for i in 0..d {
        let v = decode_vector(prime, ambient, lines.next()?)?;
        if v != module.reduce(&module.basis_vector(i, 0)) {
            return Err(Error::Invariant(format!("level {k}: decoration {} is not the reduced lift", i + 1)));
        }
        decorations.push(v);
    }
    let total = decode_vector(prime, ambient, lines.field("split")?)?;
    let expected = Splitting::new(f, &base)?;
    if total != expected.total {
        return Err(Error::Invariant(format!("level {k}: splitting vector differs from its recomputation")));
    }
    let record = BuildRecord { kind, delta, words, hlist, gate, relaxed };
    Ok(Level::new(k, prime, module, decorations, Splitting::from_total(f, &base, total), record))
}

pub fn save(t: &TowerState, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(t))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TowerState> {
    from_text(&std::fs::read_to_string(path)?)
}
