//! Building a module `V` as a quotient of the relation module that keeps
//! the orders of chosen words, has no fixed vectors under chosen
//! subgroups, and keeps fixed-point dimensions small for every subgroup.

use std::sync::Arc;

use num_rational::Ratio;

use crate::cert::{Check, Status};
use crate::error::{Error, Result};
use crate::ff::{PrimeField, Subspace};
use crate::gmodule::{act_ambient, GModule};
use crate::group::{ElementSet, FiniteGroup, GroupTable};
use crate::relmod::{boundary, magnus_embed, minus_one, relation_module, relator_power_image, MagnusPair};
use crate::words::Word;

pub type Rational = Ratio<i128>;

/// Cap on element orders computed inside an extension.
pub const ORDER_CAP: u64 = 1 << 20;

#[derive(Debug, Clone)]
pub struct ForgeInput {
    pub field: PrimeField,
    pub group: Arc<GroupTable>,
    pub words: Vec<Word>,
    /// The subgroups `H_j`, as element sets.
    pub subgroups: Vec<ElementSet>,
}

#[derive(Debug, Clone)]
pub struct ForgeOutput {
    pub module: GModule,
    /// `e_i` reduced modulo the killed subspace: the vector parts of the lifted generators.
    pub decorations: Vec<Vec<u32>>,
    pub delta: Rational,
    pub word_orders: Vec<u64>,
    pub words: Vec<Word>,
    pub subgroups: Vec<ElementSet>,
}

/// `1 − Σ 1/(ord π(w_i) (d−1)) − Σ |G| / (|H_j| |N_G(H_j)|)`.
pub fn compute_delta(input: &ForgeInput) -> Result<Rational> {
    let g = &input.group;
    let d = g.rank() as i128;
    if d < 2 && !input.words.is_empty() {
        return Err(Error::Config("word list needs at least two generators".into()));
    }
    let mut delta = Rational::from_integer(1);
    for w in &input.words {
        let ord = g.element_order(g.eval(w)) as i128;
        delta -= Rational::new(1, ord * (d - 1));
    }
    for h in &input.subgroups {
        delta -= Rational::new(g.order() as i128, h.len() as i128 * g.normalizer_order(h) as i128);
    }
    Ok(delta)
}

/// The norm vector of one copy of F_p[G] inside F_p[G]^d.
pub fn norm_vector(group: &GroupTable, copy: usize) -> Vec<u32> {
    let n = group.order();
    let mut v = vec![0u32; group.rank() * n];
    v[copy * n..(copy + 1) * n].iter_mut().for_each(|x| *x = 1);
    v
}

fn decorations(module: &GModule) -> Vec<Vec<u32>> {
    (0..module.copies()).map(|i| module.reduce(&module.basis_vector(i, 0))).collect()
}

/// Builds `V = V_{T,p} / (Σ U_i + Σ W_j)`, or `V_{T,p}` modulo the norm line
/// of the first copy when both lists are empty. A non-positive `δ` is an
/// error unless `allow_nonpositive` is set.
pub fn build_module(input: &ForgeInput, allow_nonpositive: bool) -> Result<ForgeOutput> {
    let f = input.field;
    let g = &input.group;
    let delta = compute_delta(input)?;
    if delta <= Rational::from_integer(0) && !allow_nonpositive {
        return Err(Error::NonPositiveDelta(fmt_ratio(&delta)));
    }
    let relation = relation_module(f, g.clone())?;
    let killed = if input.words.is_empty() && input.subgroups.is_empty() {
        relation.g_span(&[norm_vector(g, 0)])
    } else {
        let mut acc = Subspace::zero(f, relation.ambient_dim());
        for w in &input.words {
            acc = acc.sum(&relation.g_span(&[relator_power_image(f, g, w)]))?;
        }
        for h in &input.subgroups {
            let fixed = relation.invariants(&g.subgroup_generators(h));
            acc = acc.sum(&relation.g_span(fixed.basis()))?;
        }
        acc
    };
    let module = relation.quotient(&killed)?;
    Ok(ForgeOutput {
        decorations: decorations(&module),
        delta,
        word_orders: input.words.iter().map(|w| g.element_order(g.eval(w))).collect(),
        words: input.words.clone(),
        subgroups: input.subgroups.clone(),
        module,
    })
}

/// The relation module modulo its augmentation submodule: the largest
/// quotient on which `G` acts trivially. Over the trivial group this is
/// F_p^d itself.
pub fn coinvariant_module(f: PrimeField, group: Arc<GroupTable>) -> Result<GModule> {
    let relation = relation_module(f, group.clone())?;
    let aug = relation.augmentation_span(group.generators());
    relation.quotient(&aug)
}

pub fn fmt_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Order of a Magnus pair in `(carrier / killed) ⋊ G`.
pub fn pair_order(f: PrimeField, group: &GroupTable, killed: &Subspace, x: &MagnusPair, cap: u64) -> Result<u64> {
    let x = MagnusPair { vector: killed.reduce_mod(&x.vector)?, element: x.element };
    let mut acc = x.clone();
    let mut k = 1;
    while acc.element != 0 || acc.vector.iter().any(|&c| c != 0) {
        if k >= cap {
            return Err(Error::OrderOverflow(cap));
        }
        acc = acc.mul(f, group, &x);
        killed.reduce_in_place(&mut acc.vector);
        k += 1;
    }
    Ok(k)
}

/// `dim V^K` for one cyclic subgroup per conjugacy class, then `extra`.
/// Conjugate subgroups have isomorphic fixed spaces, so this covers every
/// cyclic subgroup.
pub fn cyclic_fixed_dims(m: &GModule, extra: &[ElementSet]) -> Vec<(ElementSet, usize)> {
    let g = m.group();
    let mut sample = g.cyclic_subgroup_classes();
    sample.extend(extra.iter().cloned());
    sample
        .into_iter()
        .map(|k| {
            let dim = m.invariant_dim(&g.subgroup_generators(&k));
            (k, dim)
        })
        .collect()
}

/// `dim V^K · factor · |K| <= dim V` over the sample; `on_violation` is
/// the status reported when some subgroup breaks the bound.
pub fn fixed_dimension_check(
    id: &str,
    anchor: &str,
    dim: usize,
    factor: &Rational,
    dims: &[(ElementSet, usize)],
    on_violation: Status,
) -> Check {
    if *factor <= Rational::from_integer(0) {
        return Check::new(id, anchor, Status::Skipped, "factor is not positive");
    }
    let mut bad = Vec::new();
    for (k, fixed) in dims {
        let lhs = Rational::from_integer(*fixed as i128) * factor * (k.len() as i128);
        if lhs > Rational::from_integer(dim as i128) {
            bad.push(format!("|K|={} elements={:?}: dim V^K = {fixed}", k.len(), k));
        }
    }
    let status = if bad.is_empty() { Status::Sampled } else { on_violation };
    Check::new(
        id,
        anchor,
        status,
        format!("dim V = {dim}, factor {}, {} subgroups (cyclic up to conjugacy plus supplied)", fmt_ratio(factor), dims.len()),
    )
    .with_witnesses(bad)
}

/// Checks the order, fixed-point and fixed-dimension properties of a build.
/// The fixed-dimension bound is run on one cyclic subgroup per conjugacy
/// class plus `extra`.
pub fn verify_conclusions(out: &ForgeOutput, extra: &[ElementSet]) -> Result<Vec<Check>> {
    let dims = cyclic_fixed_dims(&out.module, extra);
    conclusions_with_dims(out, &dims)
}

/// As [`verify_conclusions`], with the fixed-point dimensions supplied.
pub fn conclusions_with_dims(out: &ForgeOutput, dims: &[(ElementSet, usize)]) -> Result<Vec<Check>> {
    let m = &out.module;
    let g = m.group();
    let f = m.field();
    let d = g.rank() as i128;
    let n = g.order() as i128;
    let dim = m.dim() as i128;
    let mut checks = Vec::new();

    let bound = Rational::from_integer((d - 1) * n) * out.delta;
    checks.push(Check::pass_if(
        "forge-dimension-bound",
        "dim V >= (d-1)|G| delta",
        Rational::from_integer(dim) >= bound,
        format!("dim V = {dim}, (d-1)|G| delta = {}", fmt_ratio(&bound)),
    ));

    let stable = m.is_stable(m.killed());
    let lifted_ok = out
        .decorations
        .iter()
        .enumerate()
        .all(|(i, v)| boundary(f, g, v) == minus_one(f, g.order(), g.generators()[i]));
    checks.push(Check::pass_if(
        "forge-lifted-generators",
        "killed subspace is G-stable; lifted generators satisfy the derivation constraint",
        stable && lifted_ok,
        format!("stable = {stable}, derivation = {lifted_ok}"),
    ));

    let mut bad = Vec::new();
    for (w, &ord) in out.words.iter().zip(&out.word_orders) {
        let lifted = pair_order(f, g, m.killed(), &magnus_embed(f, g, w), ORDER_CAP)?;
        if lifted != ord {
            bad.push(format!("{w}: order {ord} below, {lifted} in extension"));
        }
    }
    checks.push(
        Check::new(
            "forge-word-orders",
            "listed word orders are preserved in the extension",
            if bad.is_empty() { Status::Pass } else { Status::Fail },
            format!("{} words", out.words.len()),
        )
        .with_witnesses(bad),
    );

    let mut bad = Vec::new();
    for h in &out.subgroups {
        let fixed = m.invariant_dim(&g.subgroup_generators(h));
        if fixed != 0 {
            bad.push(format!("|H|={}: dim V^H = {fixed}", h.len()));
        }
    }
    checks.push(
        Check::new(
            "forge-no-fixed-vectors",
            "V^{H_j} = 0 for every listed subgroup",
            if bad.is_empty() { Status::Pass } else { Status::Fail },
            format!("{} subgroups", out.subgroups.len()),
        )
        .with_witnesses(bad),
    );

    checks.push(fixed_dimension_check(
        "forge-fixed-dimension",
        "dim V^K <= dim V / (delta |K|)",
        m.dim(),
        &out.delta,
        dims,
        Status::Fail,
    ));
    Ok(checks)
}

/// A homomorphic section `g ↦ ((1/|G|)(1 − g)·A, g)` of Magnus pairs,
/// where `A = Σ_h a_h` for particular solutions `∂a_h = h − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    pub total: Vec<u32>,
    inv_order: u32,
}

impl Splitting {
    pub fn new(f: PrimeField, group: &GroupTable) -> Result<Self> {
        let n = group.order();
        if n % f.p() as usize == 0 {
            return Err(Error::PrimeDividesOrder { p: f.p(), order: n });
        }
        let mut total = vec![0u32; group.rank() * n];
        for h in group.elements() {
            let a = magnus_embed(f, group, group.word_of(h));
            debug_assert_eq!(a.element, h);
            total = f.add_vec(&total, &a.vector);
        }
        Ok(Splitting { total, inv_order: f.inv((n % f.p() as usize) as u32) })
    }

    pub fn from_total(f: PrimeField, group: &GroupTable, total: Vec<u32>) -> Self {
        Splitting { total, inv_order: f.inv((group.order() % f.p() as usize) as u32) }
    }

    pub fn section(&self, f: PrimeField, group: &GroupTable, g: u32) -> MagnusPair {
        let moved = act_ambient(group, group.rank(), g, &self.total);
        let mut v = f.sub_vec(&self.total, &moved);
        f.scale(&mut v, self.inv_order);
        MagnusPair { vector: v, element: g }
    }

    /// Exhaustive homomorphism and derivation check.
    pub fn verify(&self, f: PrimeField, group: &GroupTable) -> bool {
        let sections: Vec<MagnusPair> = group.elements().map(|g| self.section(f, group, g)).collect();
        if !sections.iter().all(|s| s.satisfies_derivation(f, group)) {
            return false;
        }
        for a in group.elements() {
            for b in group.elements() {
                let prod = sections[a as usize].mul(f, group, &sections[b as usize]);
                if prod != sections[group.mul(&a, &b) as usize] {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn input(p: u32, group: GroupTable, words: Vec<Word>, subgroups: Vec<ElementSet>) -> ForgeInput {
        ForgeInput { field: field(p), group: Arc::new(group), words, subgroups }
    }

    #[test]
    fn delta_examples() {
        let v4 = GroupTable::elementary_abelian(2, 2);
        assert_eq!(compute_delta(&input(3, v4.clone(), vec![], vec![])).unwrap(), Rational::from_integer(1));
        let one = input(3, v4.clone(), vec![Word::generator(1)], vec![]);
        assert_eq!(compute_delta(&one).unwrap(), Rational::new(1, 2));
        let whole: ElementSet = v4.elements().collect();
        let s = input(3, v4, vec![], vec![whole]);
        assert_eq!(compute_delta(&s).unwrap(), Rational::new(3, 4));
    }

    #[test]
    fn build_examples() {
        let v4 = GroupTable::elementary_abelian(2, 2);
        let out = build_module(&input(3, v4.clone(), vec![], vec![]), false).unwrap();
        assert_eq!(out.module.dim(), 4);
        assert!(verify_conclusions(&out, &[]).unwrap().iter().all(|c| !c.failed()));
        // V_{T,p}^G has dimension d = 2; killing the norm line leaves one fixed
        // line, and the fixed-dimension bound is met with equality: 1 <= 4/(1*4).
        assert_eq!(out.module.invariant_dim(v4.generators()), 1);

        let whole: ElementSet = v4.elements().collect();
        let out = build_module(&input(3, v4.clone(), vec![], vec![whole]), false).unwrap();
        assert_eq!(out.module.invariant_dim(v4.generators()), 0);
        assert!(verify_conclusions(&out, &[]).unwrap().iter().all(|c| !c.failed()));

        let triv = build_module(&input(5, GroupTable::trivial(2), vec![], vec![]), false).unwrap();
        assert_eq!(triv.module.dim(), 1);

        let bad = input(3, v4.clone(), vec![Word::generator(1), Word::generator(2)], vec![]);
        assert!(matches!(build_module(&bad, false), Err(Error::NonPositiveDelta(_))));
        assert!(build_module(&bad, true).is_ok());
        assert!(build_module(&input(2, v4, vec![], vec![]), false).is_err());
    }

    #[test]
    fn word_orders_are_kept() {
        let s3 = GroupTable::symmetric3();
        let w = Word::reduce(2, &[1, 2]).unwrap();
        let out = build_module(&input(5, s3, vec![w], vec![]), false).unwrap();
        let checks = verify_conclusions(&out, &[]).unwrap();
        assert!(checks.iter().all(|c| !c.failed()), "{checks:?}");
    }

    #[test]
    fn coinvariants_of_trivial_group_are_free() {
        let m = coinvariant_module(field(2), Arc::new(GroupTable::trivial(2))).unwrap();
        assert_eq!(m.dim(), 2);
        let c3 = Arc::new(GroupTable::cyclic(3, 2));
        let m = coinvariant_module(field(2), c3.clone()).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.invariant_dim(c3.generators()), 2);
    }

    #[test]
    fn splitting_examples() {
        let f = field(3);
        let v4 = GroupTable::elementary_abelian(2, 2);
        let s = Splitting::new(f, &v4).unwrap();
        assert_eq!(s.section(f, &v4, 0), MagnusPair::identity(8));
        assert!(s.verify(f, &v4));
        let s3 = GroupTable::symmetric3();
        assert!(Splitting::new(field(5), &s3).unwrap().verify(field(5), &s3));
    }
}
