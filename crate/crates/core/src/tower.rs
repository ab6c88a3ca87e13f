//! The tower `G_0 ← G_1 ← G_2 ← …`. Level `k` is the split extension
//! `V_k ⋊ G_{k−1}` realised on Magnus pairs over `G_{k−1}` modulo a killed
//! subspace; elements are pairs `(reduced vector, index in G_{k−1})`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::cert::{Check, Status};
use crate::error::{Error, Result};
use crate::ff::{span_elements, PrimeField, Subspace};
use crate::forge::{
    build_module, coinvariant_module, compute_delta, conclusions_with_dims, cyclic_fixed_dims, fixed_dimension_check,
    fmt_ratio, pair_order, ForgeInput, ForgeOutput, Rational, Splitting, ORDER_CAP,
};
use crate::gmodule::{act_ambient, GModule};
use crate::group::{ElementSet, FiniteGroup, GroupTable, DEFAULT_ENUMERATION_CAP};
use crate::relmod::{magnus_embed, MagnusPair};
use crate::words::{budget_check, enumerate_words, words_of_length, OrderBudget, Word};

/// Longest word list a single step is allowed to scan.
const WORD_SCAN_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Modes {
    /// Accept `δ ≤ 1 − ε` (and `δ ≤ 0`) instead of failing the step.
    pub relaxed: bool,
    /// Build the subgroup list even when the prime-size gate fails.
    pub force_hlist: bool,
    /// Allow a budget whose tail sum is not below `ε/2`.
    pub test_budget: bool,
}

impl Modes {
    pub fn is_strict(&self) -> bool {
        !self.relaxed && !self.force_hlist && !self.test_budget
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerConfig {
    pub d: usize,
    pub primes: Vec<u32>,
    pub epsilon: Rational,
    pub budget: OrderBudget,
    /// `None` for the trivial seed.
    pub seed: Option<GroupTable>,
    pub depth: usize,
    pub modes: Modes,
    pub enumeration_cap: usize,
}

impl TowerConfig {
    /// `d = 2`, primes `(2, 3, 5)`, `ε = 1/10`, budget `16 · 8^|w|`, depth 3.
    pub fn standard() -> Self {
        TowerConfig {
            d: 2,
            primes: vec![2, 3, 5],
            epsilon: Rational::new(1, 10),
            budget: OrderBudget::new(16, 8, 2).expect("valid budget"),
            seed: None,
            depth: 3,
            modes: Modes::default(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    pub fn seed_group(&self) -> GroupTable {
        self.seed.clone().unwrap_or_else(|| GroupTable::trivial(self.d))
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Config(format!("d = {} must be at least 2", self.d)));
        }
        if self.primes.is_empty() {
            return Err(Error::Config("prime list is empty".into()));
        }
        for (i, &p) in self.primes.iter().enumerate() {
            PrimeField::new(p)?;
            if self.primes[..i].contains(&p) {
                return Err(Error::Config(format!("prime {p} repeated")));
            }
        }
        let zero = Rational::from_integer(0);
        if self.epsilon <= zero || self.epsilon >= Rational::new(1, 4) {
            return Err(Error::Config(format!("epsilon = {} must lie in (0, 1/4)", fmt_ratio(&self.epsilon))));
        }
        if self.budget.test_mode != self.modes.test_budget {
            return Err(Error::Config("budget test flag disagrees with the mode flags".into()));
        }
        if !self.modes.test_budget {
            OrderBudget::new(self.budget.scale, self.budget.base, self.d)?;
            if !budget_check(&self.budget, self.d, self.epsilon)? {
                return Err(Error::InvalidBudget(format!(
                    "tail sum {} is not below epsilon/2",
                    fmt_ratio(&self.budget.tail_sum(self.d)?)
                )));
            }
        }
        if self.depth == 0 || self.depth > self.primes.len() {
            return Err(Error::Config(format!("depth {} must lie in 1..={}", self.depth, self.primes.len())));
        }
        if let Some(seed) = &self.seed {
            if seed.rank() != self.d {
                return Err(Error::Config(format!("seed has {} generators, d = {}", seed.rank(), self.d)));
            }
            for &p in &self.primes {
                if seed.order() % p as usize == 0 {
                    return Err(Error::PrimeDividesOrder { p, order: seed.order() });
                }
            }
        }
        Ok(())
    }
}

/// A word whose order stopped growing, and the level where that was first seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenWord {
    pub word: Word,
    pub order: u64,
    pub level: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrozenLedger {
    entries: Vec<FrozenWord>,
}

impl FrozenLedger {
    pub fn entries(&self) -> &[FrozenWord] {
        &self.entries
    }

    pub fn get(&self, w: &Word) -> Option<&FrozenWord> {
        self.entries.iter().find(|e| &e.word == w)
    }

    /// Adds `w` unless already frozen; returns whether it was new.
    pub fn insert(&mut self, entry: FrozenWord) -> bool {
        if self.get(&entry.word).is_some() {
            return false;
        }
        self.entries.push(entry);
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildKind {
    /// First level: coinvariants of the relation module of the seed.
    Seed,
    Forge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildRecord {
    pub kind: BuildKind,
    pub delta: Rational,
    pub words: Vec<(Word, u64)>,
    /// Subgroups of the base group, as element sets.
    pub hlist: Vec<ElementSet>,
    /// Whether the prime-size gate held for this step.
    pub gate: bool,
    /// Whether `δ ≤ 1 − ε` was accepted because of a mode flag.
    pub relaxed: bool,
}

impl BuildRecord {
    fn seed() -> Self {
        BuildRecord {
            kind: BuildKind::Seed,
            delta: Rational::from_integer(1),
            words: Vec::new(),
            hlist: Vec::new(),
            gate: false,
            relaxed: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Level {
    pub index: usize,
    pub prime: u32,
    /// Over `G_{k−1}`; carrier is the boundary kernel.
    pub module: GModule,
    pub decorations: Vec<Vec<u32>>,
    pub splitting: Splitting,
    pub record: BuildRecord,
    fixed_dims: OnceLock<Vec<(ElementSet, usize)>>,
}

impl Level {
    pub fn new(
        index: usize,
        prime: u32,
        module: GModule,
        decorations: Vec<Vec<u32>>,
        splitting: Splitting,
        record: BuildRecord,
    ) -> Self {
        Level { index, prime, module, decorations, splitting, record, fixed_dims: OnceLock::new() }
    }

    pub fn field(&self) -> PrimeField {
        self.module.field()
    }

    pub fn base(&self) -> &Arc<GroupTable> {
        self.module.group()
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// `p^dim · |G_{k−1}|`, if it fits.
    pub fn order(&self) -> Option<u128> {
        (self.prime as u128).checked_pow(self.dim() as u32)?.checked_mul(self.base().order() as u128)
    }

    /// `dim V^K` over cyclic subgroups up to conjugacy, then the H-list.
    pub fn fixed_dims(&self) -> &[(ElementSet, usize)] {
        self.fixed_dims.get_or_init(|| cyclic_fixed_dims(&self.module, &self.record.hlist))
    }

    pub fn forge_output(&self) -> ForgeOutput {
        ForgeOutput {
            module: self.module.clone(),
            decorations: self.decorations.clone(),
            delta: self.record.delta,
            word_orders: self.record.words.iter().map(|(_, o)| *o).collect(),
            words: self.record.words.iter().map(|(w, _)| w.clone()).collect(),
            subgroups: self.record.hlist.clone(),
        }
    }
}

/// An enumerated level: its table and the pair behind each index.
#[derive(Debug)]
pub struct Enumerated {
    pub table: Arc<GroupTable>,
    pub elements: Vec<MagnusPair>,
    index: HashMap<MagnusPair, u32>,
}

impl Enumerated {
    pub fn new(table: GroupTable, elements: Vec<MagnusPair>) -> Self {
        let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        Enumerated { table: Arc::new(table), elements, index }
    }

    pub fn index_of(&self, x: &MagnusPair) -> Option<u32> {
        self.index.get(x).copied()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

type Slot = OnceLock<std::result::Result<Arc<Enumerated>, Error>>;

#[derive(Debug, Clone)]
pub struct TowerState {
    config: TowerConfig,
    seed: Arc<GroupTable>,
    levels: Vec<Level>,
    groups: Vec<Slot>,
    ledger: FrozenLedger,
}

/// Whether `log p > max{1/ε, log ε / (2ε − 1/2)}`.
pub fn log_gate(p: u32, eps: &Rational) -> bool {
    let e = *eps.numer() as f64 / *eps.denom() as f64;
    let threshold = (1.0 / e).max(e.ln() / (2.0 * e - 0.5));
    (p as f64).ln() > threshold
}

fn seed_enumerated(seed: &GroupTable) -> Enumerated {
    let elements = seed.elements().map(|g| MagnusPair { vector: Vec::new(), element: g }).collect();
    Enumerated::new(seed.clone(), elements)
}

impl TowerState {
    /// Levels `G_0` and `G_1`.
    pub fn init(config: TowerConfig) -> Result<Self> {
        config.validate()?;
        let seed = Arc::new(config.seed_group());
        let f = PrimeField::new(config.primes[0])?;
        let module = coinvariant_module(f, seed.clone())?;
        let decorations = (0..config.d).map(|i| module.reduce(&module.basis_vector(i, 0))).collect();
        let splitting = Splitting::new(f, &seed)?;
        let level = Level::new(1, f.p(), module, decorations, splitting, BuildRecord::seed());
        let g0 = OnceLock::new();
        let _ = g0.set(Ok(Arc::new(seed_enumerated(&seed))));
        Ok(TowerState { config, seed, levels: vec![level], groups: vec![g0, OnceLock::new()], ledger: FrozenLedger::default() })
    }

    /// A state holding only the seed; levels are then added with
    /// [`TowerState::push_level`]. Used when loading.
    pub fn from_parts(config: TowerConfig, ledger: FrozenLedger) -> Result<Self> {
        config.validate()?;
        let seed = Arc::new(config.seed_group());
        let g0 = OnceLock::new();
        let _ = g0.set(Ok(Arc::new(seed_enumerated(&seed))));
        Ok(TowerState { config, seed, levels: Vec::new(), groups: vec![g0], ledger })
    }

    pub(crate) fn push_level(&mut self, level: Level) {
        self.levels.push(level);
        self.groups.push(OnceLock::new());
    }

    pub fn config(&self) -> &TowerConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut TowerConfig {
        &mut self.config
    }

    pub fn seed(&self) -> &Arc<GroupTable> {
        &self.seed
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Level `k ≥ 1`.
    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k - 1]
    }

    /// Index of the top level.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn ledger(&self) -> &FrozenLedger {
        &self.ledger
    }

    /// `G_k`, enumerated on first use.
    pub fn group(&self, k: usize) -> Result<Arc<Enumerated>> {
        let slot = self.groups.get(k).ok_or_else(|| Error::Config(format!("level {k} is not built")))?;
        slot.get_or_init(|| self.enumerate(k).map(Arc::new)).clone()
    }

    /// Order of `G_k` without enumerating it.
    pub fn group_order(&self, k: usize) -> Option<u128> {
        if k == 0 {
            Some(self.seed.order() as u128)
        } else {
            self.level(k).order()
        }
    }

    fn enumerate(&self, k: usize) -> Result<Enumerated> {
        let cap = self.config.enumeration_cap;
        let order = self.group_order(k);
        if order.is_none_or(|o| o > cap as u128) {
            let order = order.map_or(usize::MAX, |o| usize::try_from(o).unwrap_or(usize::MAX));
            return Err(Error::EnumerationCap { order, cap });
        }
        let gens: Vec<MagnusPair> = (0..self.config.d).map(|i| self.generator(k, i)).collect();
        let (table, elements) = GroupTable::from_closure(self.identity(k), &gens, |a, b| self.mul(k, a, b), cap)?;
        Ok(Enumerated::new(table, elements))
    }

    pub fn identity(&self, k: usize) -> MagnusPair {
        if k == 0 {
            MagnusPair { vector: Vec::new(), element: 0 }
        } else {
            MagnusPair::identity(self.level(k).module.ambient_dim())
        }
    }

    /// The image of the free generator `x_{i+1}` in `G_k`.
    pub fn generator(&self, k: usize, i: usize) -> MagnusPair {
        if k == 0 {
            MagnusPair { vector: Vec::new(), element: self.seed.generators()[i] }
        } else {
            let l = self.level(k);
            MagnusPair { vector: l.decorations[i].clone(), element: l.base().generators()[i] }
        }
    }

    pub fn mul(&self, k: usize, a: &MagnusPair, b: &MagnusPair) -> MagnusPair {
        if k == 0 {
            return MagnusPair { vector: Vec::new(), element: self.seed.mul(&a.element, &b.element) };
        }
        let l = self.level(k);
        let mut x = a.mul(l.field(), l.base(), b);
        l.module.killed().reduce_in_place(&mut x.vector);
        x
    }

    pub fn inverse(&self, k: usize, a: &MagnusPair) -> MagnusPair {
        if k == 0 {
            return MagnusPair { vector: Vec::new(), element: self.seed.inv(&a.element) };
        }
        let l = self.level(k);
        let f = l.field();
        let gi = l.base().inv(&a.element);
        let mut v = act_ambient(l.base(), self.config.d, gi, &a.vector);
        f.scale(&mut v, f.neg(1));
        l.module.killed().reduce_in_place(&mut v);
        MagnusPair { vector: v, element: gi }
    }

    /// `π_k(w)` through the Magnus embedding over `G_{k−1}`.
    pub fn word_image(&self, k: usize, w: &Word) -> MagnusPair {
        if k == 0 {
            return MagnusPair { vector: Vec::new(), element: self.seed.eval(w) };
        }
        let l = self.level(k);
        let mut x = magnus_embed(l.field(), l.base(), w);
        l.module.killed().reduce_in_place(&mut x.vector);
        x
    }

    /// `π_k(w)` as a product of generator images.
    pub fn word_image_by_generators(&self, k: usize, w: &Word) -> MagnusPair {
        let mut acc = self.identity(k);
        for &l in w.letters() {
            let t = self.generator(k, l.unsigned_abs() as usize - 1);
            let t = if l > 0 { t } else { self.inverse(k, &t) };
            acc = self.mul(k, &acc, &t);
        }
        acc
    }

    pub fn element_order(&self, k: usize, a: &MagnusPair) -> Result<u64> {
        if k == 0 {
            return Ok(self.seed.element_order(a.element));
        }
        let l = self.level(k);
        pair_order(l.field(), l.base(), l.module.killed(), a, ORDER_CAP)
    }

    /// `q_k : G_k → G_{k−1}`.
    pub fn project(&self, k: usize, a: &MagnusPair) -> Result<MagnusPair> {
        Ok(self.group(k - 1)?.elements[a.element as usize].clone())
    }

    /// `σ_k : G_{k−1} → G_k`, the splitting of the projection.
    pub fn section(&self, k: usize, g: u32) -> MagnusPair {
        let l = self.level(k);
        let mut s = l.splitting.section(l.field(), l.base(), g);
        l.module.killed().reduce_in_place(&mut s.vector);
        s
    }

    /// A multiple of the exponent of `G_k`: the seed exponent times `p_1 ⋯ p_k`.
    pub fn exponent_bound(&self, k: usize) -> u128 {
        self.config.primes[..k].iter().fold(self.seed.exponent() as u128, |acc, &p| acc * p as u128)
    }

    /// `(W, M)` for the normal closure of `σ_k(g)` in `G_k`: `M` is the
    /// normal closure of `g` in `G_{k−1}` and `W` the augmentation span of `M`
    /// in `V_k`, as a preimage containing the killed subspace.
    pub fn normal_closure_in_extension(&self, k: usize, g: u32) -> Result<(Subspace, ElementSet)> {
        let below = self.group(k - 1)?;
        let m = below.table.normal_closure(&[g]);
        let w = self.level(k).module.augmentation_span(&below.table.subgroup_generators(&m));
        Ok((w, m))
    }

    /// Element set in `G_k` of `W ⋊ σ(M)`.
    pub fn extension_elements(&self, k: usize, w: &Subspace, m: &[u32]) -> Result<ElementSet> {
        let top = self.group(k)?;
        let l = self.level(k);
        let f = l.field();
        let reps = l.module.killed().complement_in(w)?;
        let vectors = span_elements(f, l.module.ambient_dim(), &reps);
        let mut out = Vec::with_capacity(vectors.len() * m.len());
        for &g in m {
            let s = self.section(k, g);
            for v in &vectors {
                let mut x = MagnusPair { vector: f.add_vec(v, &s.vector), element: g };
                l.module.killed().reduce_in_place(&mut x.vector);
                let idx = top
                    .index_of(&x)
                    .ok_or_else(|| Error::Invariant(format!("split element outside G_{k}")))?;
                out.push(idx);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Builds levels until `depth`; stops early with the cap error when a
    /// base group cannot be enumerated.
    pub fn extend_to(&mut self, depth: usize) -> Result<Option<Error>> {
        if depth > self.config.primes.len() {
            return Err(Error::Config(format!("depth {depth} needs {depth} primes")));
        }
        while self.levels.len() < depth {
            match self.step() {
                Ok(()) => {}
                Err(e @ Error::EnumerationCap { .. }) => return Ok(Some(e)),
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    }

    /// Builds level `k + 1` from the top level `G_k`.
    pub fn step(&mut self) -> Result<()> {
        let k = self.levels.len();
        let cfg = self.config.clone();
        let p = *cfg.primes.get(k).ok_or_else(|| Error::Config(format!("no prime for level {}", k + 1)))?;
        let f = PrimeField::new(p)?;
        let top = self.group(k)?;
        let table = top.table.clone();
        if table.order() % p as usize == 0 {
            return Err(Error::PrimeDividesOrder { p, order: table.order() });
        }

        let mut words = Vec::new();
        if let Some(len) = cfg.budget.max_len_below(self.exponent_bound(k)) {
            let count: u128 = (0..=len).map(|n| words_of_length(cfg.d, n)).sum();
            if count > WORD_SCAN_CAP {
                return Err(Error::Config(format!("word scan of {count} words exceeds {WORD_SCAN_CAP}")));
            }
            for w in enumerate_words(cfg.d, len) {
                let ord = table.element_order(table.eval(&w));
                if ord as u128 > cfg.budget.of(&w) {
                    words.push((w, ord));
                }
            }
        }
        for e in self.ledger.entries() {
            if !words.iter().any(|(w, _)| w == &e.word) {
                words.push((e.word.clone(), table.element_order(table.eval(&e.word))));
            }
        }
        for (w, ord) in &words {
            self.ledger.insert(FrozenWord { word: w.clone(), order: *ord, level: k });
        }

        let gate = log_gate(cfg.primes[k - 1], &cfg.epsilon);
        let mut hlist: Vec<ElementSet> = Vec::new();
        if gate || cfg.modes.force_hlist {
            let below = self.group(k - 1)?;
            for g in 1..below.order() as u32 {
                let (w, m) = self.normal_closure_in_extension(k, g)?;
                let set = self.extension_elements(k, &w, &m)?;
                if !hlist.contains(&set) {
                    hlist.push(set);
                }
            }
        }

        let input = ForgeInput {
            field: f,
            group: table.clone(),
            words: words.iter().map(|(w, _)| w.clone()).collect(),
            subgroups: hlist.clone(),
        };
        let delta = compute_delta(&input)?;
        let bound = Rational::from_integer(1) - cfg.epsilon;
        let relaxed = delta <= bound;
        if relaxed && !(cfg.modes.relaxed || cfg.modes.force_hlist) {
            return Err(Error::DeltaBelowBound { delta: fmt_ratio(&delta), bound: fmt_ratio(&bound) });
        }
        let out = build_module(&input, cfg.modes.relaxed)?;
        let splitting = Splitting::new(f, &table)?;
        let record = BuildRecord { kind: BuildKind::Forge, delta, words, hlist, gate, relaxed };
        self.push_level(Level::new(k + 1, p, out.module, out.decorations, splitting, record));
        Ok(())
    }

    /// Orders at the top level of every word up to `max_len` stay within
    /// `max(o(w), frozen order)`.
    pub fn torsion_check(&self, max_len: usize) -> Result<Check> {
        let k = self.height();
        let mut bad = Vec::new();
        let words = enumerate_words(self.config.d, max_len);
        for w in &words {
            let ord = self.element_order(k, &self.word_image(k, w))?;
            let frozen = self.ledger.get(w).map_or(0, |e| e.order as u128);
            let allowed = self.config.budget.of(w).max(frozen);
            if ord as u128 > allowed {
                bad.push(format!("{w}: order {ord} exceeds {allowed}"));
            }
        }
        Ok(Check::new(
            "torsion-shadow",
            "top-level word orders bounded by max(o(w), frozen order)",
            if bad.is_empty() { Status::Sampled } else { Status::Fail },
            format!("{} words of length <= {max_len} at level {k}", words.len()),
        )
        .with_witnesses(bad))
    }

    /// Conditions on the split extension, projections, frozen words,
    /// dimension and fixed points, for each level built by a step.
    pub fn condition_checks(&self) -> Result<Vec<Check>> {
        let mut checks = Vec::new();
        let d = self.config.d;
        let eps = self.config.epsilon;
        let one_minus = Rational::from_integer(1) - eps;
        for k in 2..=self.height() {
            let l = self.level(k);
            let f = l.field();
            let base = l.base();
            let tag = |s: &str| format!("level{k}-{s}");
            let on_violation = if l.record.relaxed { Status::Relaxed } else { Status::Fail };

            // split extension of the right order
            let split_ok = l.splitting.verify(f, base);
            let (order_ok, order_detail) = match self.group(k) {
                Ok(g) => {
                    let expected = l.order();
                    (expected == Some(g.order() as u128), format!("|G_{k}| = {}", g.order()))
                }
                Err(_) => (true, format!("|G_{k}| = {}^{} * {} (not enumerated)", l.prime, l.dim(), base.order())),
            };
            checks.push(Check::pass_if(
                tag("split-extension"),
                "G_k is V_k ⋊ G_{k-1} with a homomorphic section",
                split_ok && order_ok,
                format!("section homomorphic = {split_ok}; {order_detail}"),
            ));

            // the projection is a homomorphism
            let below = self.group(k - 1)?;
            let mut bad = Vec::new();
            let status = match self.group(k) {
                Ok(g) => {
                    for a in 0..g.order() as u32 {
                        for b in 0..g.order() as u32 {
                            let ab = g.table.mul(&a, &b) as usize;
                            let lhs = g.elements[ab].element;
                            let rhs = below.table.mul(&g.elements[a as usize].element, &g.elements[b as usize].element);
                            if lhs != rhs && bad.len() < 5 {
                                bad.push(format!("pair ({a}, {b})"));
                            }
                        }
                    }
                    Status::Pass
                }
                Err(_) => {
                    let sample = enumerate_words(d, 2);
                    for u in &sample {
                        for v in &sample {
                            let prod = self.mul(k, &self.word_image(k, u), &self.word_image(k, v));
                            if self.project(k, &prod)? != self.word_image(k - 1, &u.mul(v)) && bad.len() < 5 {
                                bad.push(format!("({u}) * ({v})"));
                            }
                        }
                    }
                    Status::Sampled
                }
            };
            checks.push(
                Check::new(
                    tag("projection-homomorphism"),
                    "q_k : G_k -> G_{k-1} is a homomorphism",
                    if bad.is_empty() { status } else { Status::Fail },
                    "products project to products",
                )
                .with_witnesses(bad),
            );

            // q_k ∘ π_k = π_{k−1}
            let mut bad = Vec::new();
            let sample = enumerate_words(d, 4);
            for w in &sample {
                let x = self.word_image(k, w);
                if self.project(k, &x)? != self.word_image(k - 1, w) || x != self.word_image_by_generators(k, w) {
                    bad.push(w.to_string());
                }
            }
            checks.push(
                Check::new(
                    tag("projection-compatible"),
                    "q_k ∘ π_k = π_{k-1}",
                    if bad.is_empty() { Status::Sampled } else { Status::Fail },
                    format!("{} words of length <= 4", sample.len()),
                )
                .with_witnesses(bad),
            );

            // dimension lower bound
            let lower = Rational::from_integer(((d - 1) * base.order()) as i128) * one_minus;
            let ok = Rational::from_integer(l.dim() as i128) >= lower;
            checks.push(Check::new(
                tag("dimension-lower-bound"),
                "dim V_k >= (d-1)|G_{k-1}|(1-eps)",
                if ok { Status::Pass } else { on_violation },
                format!("dim V_{k} = {}, bound {}", l.dim(), fmt_ratio(&lower)),
            ));

            // fixed points of cyclic subgroups
            checks.push(fixed_dimension_check(
                &tag("cyclic-fixed-points"),
                "dim V_k^K <= dim V_k / ((1-eps)|K|) for cyclic K",
                l.dim(),
                &one_minus,
                l.fixed_dims(),
                on_violation,
            ));

            checks.push(Check::new(
                tag("delta-gate"),
                "delta > 1 - eps",
                if l.record.delta > one_minus { Status::Pass } else { Status::Relaxed },
                format!(
                    "delta = {}, 1 - eps = {}, r = {}, s = {}",
                    fmt_ratio(&l.record.delta),
                    fmt_ratio(&one_minus),
                    l.record.words.len(),
                    l.record.hlist.len()
                ),
            ));
        }

        // frozen orders persist
        let mut bad = Vec::new();
        let mut checked = 0;
        for e in self.ledger.entries() {
            for i in e.level..=self.height() {
                checked += 1;
                let ord = self.element_order(i, &self.word_image(i, &e.word))?;
                if ord != e.order {
                    bad.push(format!("{}: frozen {} at level {}, order {ord} at level {i}", e.word, e.order, e.level));
                }
            }
        }
        if self.height() >= 2 {
            checks.push(
                Check::new(
                    "frozen-orders",
                    "frozen word orders are unchanged at every later level",
                    if bad.is_empty() { Status::Pass } else { Status::Fail },
                    format!("{} words, {checked} level checks", self.ledger.entries().len()),
                )
                .with_witnesses(bad),
            );
            checks.push(self.torsion_check(4)?);
        }
        Ok(checks)
    }

    /// Dimension bound, word orders, fixed-point freeness and fixed-point
    /// dimensions for every forged level.
    pub fn forge_checks(&self) -> Result<Vec<Check>> {
        let mut checks = Vec::new();
        for k in 2..=self.height() {
            let l = self.level(k);
            for mut c in conclusions_with_dims(&l.forge_output(), l.fixed_dims())? {
                c.id = format!("level{k}-{}", c.id);
                checks.push(c);
            }
        }
        Ok(checks)
    }

    /// Each recorded H-list equals the deduplicated brute-force normal
    /// closures of the embedded nontrivial elements.
    pub fn hlist_checks(&self) -> Result<Vec<Check>> {
        let mut checks = Vec::new();
        for k in 2..=self.height() {
            let l = self.level(k);
            if l.record.hlist.is_empty() && !l.record.gate {
                continue;
            }
            let base_level = k - 1;
            let g = self.group(base_level)?;
            let below = self.group(base_level - 1)?;
            let mut closures: Vec<ElementSet> = Vec::new();
            for x in 1..below.order() as u32 {
                let s = g.index_of(&self.section(base_level, x)).ok_or_else(|| Error::Invariant("section".into()))?;
                let c = g.table.normal_closure(&[s]);
                if !closures.contains(&c) {
                    closures.push(c);
                }
            }
            let mut a = closures.clone();
            let mut b = l.record.hlist.clone();
            a.sort();
            b.sort();
            checks.push(Check::pass_if(
                format!("level{k}-hlist-closures"),
                "normal closures in G_k are W ⋊ M with W the augmentation span of M",
                a == b,
                format!(
                    "{} nontrivial elements, {} distinct closures, orders {:?}",
                    below.order() - 1,
                    b.len(),
                    b.iter().map(Vec::len).collect::<Vec<_>>()
                ),
            ));
        }
        Ok(checks)
    }
}
