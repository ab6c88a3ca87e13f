//! Normal subgroups of split extensions, normal subgroup counts, the
//! graded chain of a tower level, and dimension ratios.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::cert::{Check, Status};
use crate::error::{Error, Result};
use crate::ff::{span_elements, Subspace};
use crate::forge::{fmt_ratio, Rational};
use crate::gmodule::{act_ambient, GModule};
use crate::group::{ElementSet, FiniteGroup, GroupTable};
use crate::relmod::MagnusPair;
use crate::tower::{Enumerated, TowerState};

/// Largest group handed to [`brute_force_normals`].
pub const BRUTE_FORCE_CAP: usize = 2000;
/// Default limit on the number of submodules enumerated per level.
pub const SUBMODULE_GUARD: usize = 100_000;

/// `V ⋊ G` on pairs `(v + s_g, g)`, where `v` runs over `carrier / killed`
/// and `s_g` is a fixed offset per base element (zero for a plain
/// semidirect product, the splitting for a tower level).
#[derive(Debug, Clone)]
pub struct SplitExtension {
    pub module: GModule,
    offsets: Vec<Vec<u32>>,
    pub group: Arc<Enumerated>,
}

impl SplitExtension {
    /// `(carrier / killed) ⋊ G` with the zero section, enumerated.
    pub fn semidirect(module: GModule, cap: usize) -> Result<Self> {
        let f = module.field();
        let g = module.group().clone();
        let n = module.ambient_dim();
        let order = (f.p() as u128).checked_pow(module.dim() as u32).and_then(|x| x.checked_mul(g.order() as u128));
        if order.is_none_or(|o| o > cap as u128) {
            return Err(Error::EnumerationCap { order: order.map_or(usize::MAX, |o| o as usize), cap });
        }
        let mut gens: Vec<MagnusPair> =
            g.generators().iter().map(|&t| MagnusPair { vector: vec![0; n], element: t }).collect();
        gens.extend(module.quotient_basis().iter().map(|q| MagnusPair { vector: module.reduce(q), element: 0 }));
        let copies = module.copies();
        let killed = module.killed().clone();
        let mul = |a: &MagnusPair, b: &MagnusPair| {
            let mut v = f.add_vec(&a.vector, &act_ambient(&g, copies, a.element, &b.vector));
            killed.reduce_in_place(&mut v);
            MagnusPair { vector: v, element: g.mul(&a.element, &b.element) }
        };
        let (table, elements) = GroupTable::from_closure(MagnusPair::identity(n), &gens, mul, cap)?;
        let offsets = vec![vec![0; n]; g.order()];
        Ok(SplitExtension { module, offsets, group: Arc::new(Enumerated::new(table, elements)) })
    }

    /// Level `k` of a tower, which must be enumerable.
    pub fn from_tower(t: &TowerState, k: usize) -> Result<Self> {
        let group = t.group(k)?;
        let l = t.level(k);
        let offsets = (0..l.base().order() as u32).map(|g| t.section(k, g).vector).collect();
        Ok(SplitExtension { module: l.module.clone(), offsets, group })
    }

    pub fn table(&self) -> &GroupTable {
        &self.group.table
    }

    /// Base element under each element of the extension.
    pub fn projection(&self) -> Vec<u32> {
        self.group.elements.iter().map(|e| e.element).collect()
    }

    /// Element set of `W ⋊ s(N)` for a preimage `W` and base subgroup `N`.
    pub fn elements_of(&self, w: &Subspace, n: &[u32]) -> Result<ElementSet> {
        let f = self.module.field();
        let killed = self.module.killed();
        let reps = killed.complement_in(w)?;
        let vectors = span_elements(f, self.module.ambient_dim(), &reps);
        let mut out = Vec::with_capacity(vectors.len() * n.len());
        for &g in n {
            for v in &vectors {
                let mut x = MagnusPair { vector: f.add_vec(v, &self.offsets[g as usize]), element: g };
                killed.reduce_in_place(&mut x.vector);
                out.push(self.group.index_of(&x).ok_or_else(|| Error::Invariant("pair outside the extension".into()))?);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// A normal subgroup `W ⋊ N` of a split extension.
#[derive(Debug, Clone)]
pub struct ExtensionNormal {
    /// Preimage of `W`, containing the killed subspace.
    pub w: Subspace,
    /// Position of `N` in the list of base normal subgroups.
    pub below: usize,
    /// `dim V − dim W`.
    pub codim: usize,
}

/// Every normal subgroup of `V ⋊ G` as `W ⋊ N`: `N` normal in `G` and `W`
/// a submodule containing `(N − 1)V`.
pub fn classify_extension(module: &GModule, base_normals: &[ElementSet], guard: usize) -> Result<Vec<ExtensionNormal>> {
    let g = module.group();
    let submodules = module.enumerate_submodules(guard)?;
    let base_dim = module.killed().dim();
    let mut out = Vec::new();
    for (i, n) in base_normals.iter().enumerate() {
        let aug = module.augmentation_span(&g.subgroup_generators(n));
        for w in &submodules {
            if aug.is_subspace_of(w)? {
                out.push(ExtensionNormal { w: w.clone(), below: i, codim: module.dim() - (w.dim() - base_dim) });
            }
        }
    }
    Ok(out)
}

/// Module, normality and trivial-action checks for each classified pair.
pub fn defining_properties_check(module: &GModule, base_normals: &[ElementSet], entries: &[ExtensionNormal]) -> Check {
    let g = module.group();
    let mut bad = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let n = &base_normals[e.below];
        let stable = module.is_stable(&e.w);
        let normal = g.is_normal(n);
        let trivial = module.augmentation_span(&g.subgroup_generators(n)).is_subspace_of(&e.w).unwrap_or(false);
        if !(stable && normal && trivial) {
            bad.push(format!("entry {i}: submodule {stable}, normal {normal}, trivial action {trivial}"));
        }
    }
    Check::new(
        "classification-defining-properties",
        "W is a submodule, N is normal, N acts trivially on V/W",
        if bad.is_empty() { Status::Pass } else { Status::Fail },
        format!("{} pairs", entries.len()),
    )
    .with_witnesses(bad)
}

/// `dim W ≥ dim V − dim V^N` for every pair.
pub fn normal_size_bound_check(module: &GModule, base_normals: &[ElementSet], entries: &[ExtensionNormal]) -> Check {
    let g = module.group();
    let fixed: Vec<usize> = base_normals.iter().map(|n| module.invariant_dim(&g.subgroup_generators(n))).collect();
    let dim = module.dim();
    let mut bad = Vec::new();
    for e in entries {
        let w = dim - e.codim;
        let f = fixed[e.below];
        if w + f < dim {
            bad.push(format!("|N| = {}: dim W = {w}, dim V - dim V^N = {}", base_normals[e.below].len(), dim - f));
        }
    }
    Check::new(
        "normal-size-bound",
        "dim W >= dim V - dim V^N",
        if bad.is_empty() { Status::Pass } else { Status::Fail },
        format!("{} pairs, dim V = {dim}", entries.len()),
    )
    .with_witnesses(bad)
}

/// `AB` for normal `A`, `B`, one coset `Ab` per new `b`.
fn product_set(g: &GroupTable, a: &[u32], b: &[u32]) -> ElementSet {
    let mut member = g.membership(a);
    for &y in b {
        if !member[y as usize] {
            for &x in a {
                member[g.mul(&x, &y) as usize] = true;
            }
        }
    }
    (0..g.order() as u32).filter(|&x| member[x as usize]).collect()
}

/// All normal subgroups, as joins of normal closures of single elements.
/// One closure is taken per conjugacy class.
pub fn brute_force_normals(g: &GroupTable) -> Result<Vec<ElementSet>> {
    let n = g.order();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::EnumerationCap { order: n, cap: BRUTE_FORCE_CAP });
    }
    let mut classified = vec![false; n];
    let mut atoms: Vec<ElementSet> = Vec::new();
    let mut seen: HashSet<ElementSet> = HashSet::new();
    for x in g.elements() {
        if classified[x as usize] {
            continue;
        }
        let mut class: Vec<u32> = g.elements().map(|h| g.conjugate(h, x)).collect();
        class.sort_unstable();
        class.dedup();
        for &c in &class {
            classified[c as usize] = true;
        }
        let c = g.subgroup_closure(&class);
        if seen.insert(c.clone()) {
            atoms.push(c);
        }
    }
    let mut out = atoms.clone();
    let mut k = 0;
    while k < out.len() {
        for a in &atoms {
            if a.iter().all(|x| out[k].binary_search(x).is_ok()) {
                continue;
            }
            let j = product_set(g, &out[k], a);
            if seen.insert(j.clone()) {
                out.push(j);
            }
        }
        k += 1;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// A normal subgroup of a tower level.
#[derive(Debug, Clone)]
pub struct TowerNormal {
    /// `None` at the seed.
    pub w: Option<Subspace>,
    pub below: Option<usize>,
    pub index: u128,
    pub elements: ElementSet,
}

/// Normal subgroups of `G_0, …, G_k`, each level classified from the one below.
pub fn tower_normals(t: &TowerState, k: usize, guard: usize) -> Result<Vec<Vec<TowerNormal>>> {
    let seed = t.seed();
    let mut levels = vec![brute_force_normals(seed)?
        .into_iter()
        .map(|n| TowerNormal { w: None, below: None, index: (seed.order() / n.len()) as u128, elements: n })
        .collect::<Vec<_>>()];
    for j in 1..=k {
        let ext = SplitExtension::from_tower(t, j)?;
        let prev = &levels[j - 1];
        let base: Vec<ElementSet> = prev.iter().map(|n| n.elements.clone()).collect();
        let p = t.level(j).prime as u128;
        let mut current = Vec::new();
        for e in classify_extension(&ext.module, &base, guard)? {
            let elements = ext.elements_of(&e.w, &base[e.below])?;
            let index = p.pow(e.codim as u32) * prev[e.below].index;
            current.push(TowerNormal { w: Some(e.w), below: Some(e.below), index, elements });
        }
        levels.push(current);
    }
    Ok(levels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub index: u128,
    pub count: usize,
    pub cumulative: usize,
}

/// Exact normal subgroup counts by index, up to `max_index`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    pub max_index: u128,
    pub rows: Vec<GrowthRow>,
    pub truncated: bool,
}

impl GrowthTable {
    pub fn from_indices(indices: impl IntoIterator<Item = u128>, max_index: u128) -> Self {
        let mut counts: BTreeMap<u128, usize> = BTreeMap::new();
        for i in indices {
            if i <= max_index {
                *counts.entry(i).or_default() += 1;
            }
        }
        let mut total = 0;
        let rows = counts
            .into_iter()
            .map(|(index, count)| {
                total += count;
                GrowthRow { index, count, cumulative: total }
            })
            .collect();
        GrowthTable { max_index, rows, truncated: false }
    }

    pub fn count(&self, index: u128) -> usize {
        self.rows.iter().find(|r| r.index == index).map_or(0, |r| r.count)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].cumulative <= w[1].cumulative)
    }
}

/// Growth table of level `k` from the classification.
pub fn growth_table(t: &TowerState, k: usize, max_index: u128, guard: usize) -> Result<GrowthTable> {
    let normals = tower_normals(t, k, guard)?;
    Ok(GrowthTable::from_indices(normals[k].iter().map(|n| n.index), max_index))
}

/// Growth table of an enumerated group by brute force.
pub fn brute_force_growth(g: &GroupTable, max_index: u128) -> Result<GrowthTable> {
    let n = g.order();
    Ok(GrowthTable::from_indices(brute_force_normals(g)?.iter().map(|s| (n / s.len()) as u128), max_index))
}

/// Classification against brute force, defining properties, the size
/// bound, and the two growth tables, for level `k`.
pub fn normals_checks(t: &TowerState, k: usize, guard: usize) -> Result<Vec<Check>> {
    let normals = tower_normals(t, k, guard)?;
    let g = t.group(k)?;
    let mut classified: Vec<ElementSet> = normals[k].iter().map(|n| n.elements.clone()).collect();
    classified.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let distinct = classified.windows(2).all(|w| w[0] != w[1]);
    let brute = brute_force_normals(&g.table)?;
    let mut checks = vec![Check::pass_if(
        format!("level{k}-classification"),
        "normal subgroups of V ⋊ G are exactly W ⋊ N",
        distinct && classified == brute,
        format!("{} classified, {} by brute force, duplicate-free = {distinct}", classified.len(), brute.len()),
    )];
    let ext = SplitExtension::from_tower(t, k)?;
    let base: Vec<ElementSet> = normals[k - 1].iter().map(|n| n.elements.clone()).collect();
    let entries: Vec<ExtensionNormal> = normals[k]
        .iter()
        .map(|n| {
            let w = n.w.clone().expect("non-seed level");
            let codim = ext.module.dim() - (w.dim() - ext.module.killed().dim());
            ExtensionNormal { w, below: n.below.expect("non-seed level"), codim }
        })
        .collect();
    for mut c in [defining_properties_check(&ext.module, &base, &entries), normal_size_bound_check(&ext.module, &base, &entries)] {
        c.id = format!("level{k}-{}", c.id);
        checks.push(c);
    }
    let order = g.order() as u128;
    let via = GrowthTable::from_indices(normals[k].iter().map(|n| n.index), order);
    let direct = brute_force_growth(&g.table, order)?;
    checks.push(Check::pass_if(
        format!("level{k}-growth"),
        "index of W ⋊ N is p^codim W · |G:N|; counts agree with brute force",
        via == direct && via.is_monotone(),
        format!(
            "rows {}",
            via.rows.iter().map(|r| format!("{}:{}", r.index, r.count)).collect::<Vec<_>>().join(" ")
        ),
    ));
    Ok(checks)
}

/// Whether every normal subgroup of `G_{i+1}` with nontrivial image in
/// `G_{i−1}` contains all of `V_{i+1}`.
pub fn normal_closure_check(t: &TowerState, i: usize, guard: usize) -> Result<Check> {
    let id = format!("level{i}-normal-closure-condition");
    let anchor = "normal subgroups of G_{i+1} with nontrivial image in G_{i-1} contain V_{i+1}";
    if t.group_order(i - 1) == Some(1) {
        return Ok(Check::new(id, anchor, Status::Pass, format!("vacuous: G_{} is trivial", i - 1)));
    }
    let gi = t.group(i)?;
    let above = t.level(i + 1);
    let normals = &tower_normals(t, i, guard)?[i];
    let mut bad = Vec::new();
    let mut tested = 0;
    for n in normals {
        if n.elements.iter().all(|&x| gi.elements[x as usize].element == 0) {
            continue;
        }
        tested += 1;
        // coprime action: (N − 1)V = V exactly when V^N = 0
        let fixed = above.module.invariant_dim(&gi.table.subgroup_generators(&n.elements));
        if fixed != 0 {
            bad.push(format!("|N| = {}, index {}: dim V^N = {fixed}", n.elements.len(), n.index));
        }
    }
    let guaranteed = above.record.gate || !above.record.hlist.is_empty();
    let status = match (guaranteed, bad.is_empty()) {
        (true, true) => Status::Pass,
        (true, false) => Status::Fail,
        (false, _) => Status::NotGuaranteed,
    };
    let reason = if guaranteed { "subgroup list built" } else { "log p gate failed" };
    Ok(Check::new(id, anchor, status, format!("{reason}; {tested} normal subgroups tested, {} violate", bad.len()))
        .with_witnesses(bad))
}

/// Subgroup generated by commutators and `p`-th powers of `h`.
pub fn d_p(g: &GroupTable, h: &[u32], p: u32) -> ElementSet {
    let mut gens: Vec<u32> = Vec::new();
    for &a in h {
        gens.push(g.power(a, p as u64));
        for &b in h {
            gens.push(g.commutator(a, b));
        }
    }
    gens.sort_unstable();
    gens.dedup();
    g.subgroup_closure(&gens)
}

/// Elements of `G_k` mapping to the identity of `G_n`.
pub fn kernel_to(t: &TowerState, k: usize, n: usize) -> Result<ElementSet> {
    let groups: Vec<Arc<Enumerated>> = (n + 1..=k).map(|j| t.group(j)).collect::<Result<_>>()?;
    let top = t.group(k)?;
    Ok((0..top.order() as u32)
        .filter(|&x| groups.iter().rev().fold(x, |e, g| g.elements[e as usize].element) == 0)
        .collect())
}

/// The chain `C_0 = ker(G_k → G_0)`, `C_n = D_{p_n}(C_{n−1})` against the
/// projection kernels.
pub fn pi_graded_check(t: &TowerState, k: usize) -> Result<Vec<Check>> {
    let g = t.group(k)?;
    let mut chain = kernel_to(t, k, 0)?;
    let mut checks = Vec::new();
    let mut sizes = vec![chain.len()];
    for n in 1..=k {
        let next = d_p(&g.table, &chain, t.level(n).prime);
        let expected = kernel_to(t, k, n)?;
        let shrinks = next.len() < chain.len() || chain.len() == 1;
        checks.push(Check::pass_if(
            format!("level{k}-grading-{n}"),
            "D_{p_n} of the previous chain term is the kernel to G_n",
            next == expected && shrinks,
            format!("p = {}, |term| = {}, |ker(G_{k} -> G_{n})| = {}", t.level(n).prime, next.len(), expected.len()),
        ));
        sizes.push(next.len());
        chain = next;
    }
    checks.push(Check::pass_if(
        format!("level{k}-grading-chain"),
        "the chain descends to the trivial group",
        chain.len() == 1,
        format!("orders {sizes:?}"),
    ));
    Ok(checks)
}

/// `dim V_{k+1} / |G_k|` against `(d − 1)(1 − ε)`, and the rank-gradient
/// lower bound it gives.
pub fn betti_checks(t: &TowerState) -> Vec<Check> {
    let d = t.config().d as i128;
    let threshold = Rational::from_integer(d - 1) * (Rational::from_integer(1) - t.config().epsilon);
    let mut checks = Vec::new();
    for k in 1..t.height() {
        let above = t.level(k + 1);
        let Some(order) = t.group_order(k).and_then(|o| i128::try_from(o).ok()) else {
            continue;
        };
        let ratio = Rational::new(above.dim() as i128, order);
        let status = if ratio >= threshold {
            Status::Pass
        } else if above.record.relaxed {
            Status::Relaxed
        } else {
            Status::Fail
        };
        let approx = *ratio.numer() as f64 / *ratio.denom() as f64;
        checks.push(Check::new(
            format!("level{k}-betti-ratio"),
            "dim V_{k+1} / |G_k| >= (d-1)(1-eps)",
            status,
            format!("{} (~{approx:.4}) vs {}", fmt_ratio(&ratio), fmt_ratio(&threshold)),
        ));
        checks.push(Check::new(
            format!("level{k}-rank-gradient"),
            "d(N_k)/[G:N_k] >= dim V_{k+1} / |G_k| for N_k the kernel onto G_k",
            Status::Pass,
            format!("lower bound {} with [G:N_k] = {order}", fmt_ratio(&ratio)),
        ));
    }
    checks
}
