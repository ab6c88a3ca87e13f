//! The relation module as the kernel of the boundary map
//! `F_p[G]^d → F_p[G]`, `e_(i,h) ↦ h·t_i − h`, and the multiplicative
//! embedding of free words as pairs `(a, g)` with `∂a = g − 1`.

use std::sync::Arc;

use crate::cert::{Check, Status};
use crate::error::{Error, Result};
use crate::ff::{Matrix, PrimeField, Subspace};
use crate::gmodule::{act_ambient, GModule};
use crate::group::{ElementSet, FiniteGroup, GroupTable};
use crate::words::Word;

pub fn boundary_matrix(f: PrimeField, group: &GroupTable) -> Matrix {
    let n = group.order();
    let d = group.rank();
    let mut m = Matrix::zeros(f, n, d * n);
    for (i, &t) in group.generators().iter().enumerate() {
        for h in 0..n as u32 {
            let ht = group.mul(&h, &t);
            if ht != h {
                let col = i * n + h as usize;
                m.set(ht as usize, col, 1);
                m.set(h as usize, col, f.neg(1));
            }
        }
    }
    m
}

/// `∂v` as a dense element of F_p[G].
pub fn boundary(f: PrimeField, group: &GroupTable, v: &[u32]) -> Vec<u32> {
    let n = group.order();
    let mut out = vec![0u32; n];
    for (i, &t) in group.generators().iter().enumerate() {
        for h in 0..n as u32 {
            let c = v[i * n + h as usize];
            if c != 0 {
                let ht = group.mul(&h, &t) as usize;
                out[ht] = f.add(out[ht], c);
                out[h as usize] = f.sub(out[h as usize], c);
            }
        }
    }
    out
}

/// `g - 1` as a dense element of F_p[G].
pub fn minus_one(f: PrimeField, n: usize, g: u32) -> Vec<u32> {
    let mut out = vec![0u32; n];
    out[g as usize] = f.add(out[g as usize], 1);
    out[0] = f.sub(out[0], 1);
    out
}

pub fn check_coprime(p: u32, group: &GroupTable) -> Result<()> {
    if group.order() % p as usize == 0 {
        return Err(Error::PrimeDividesOrder { p, order: group.order() });
    }
    Ok(())
}

pub fn boundary_kernel(f: PrimeField, group: &GroupTable) -> Subspace {
    boundary_matrix(f, group).kernel_basis()
}

/// The relation module `ker ∂ ⊆ F_p[G]^d` for the generating tuple of `group`.
pub fn relation_module(f: PrimeField, group: Arc<GroupTable>) -> Result<GModule> {
    check_coprime(f.p(), &group)?;
    let kernel = boundary_kernel(f, &group);
    let n = group.rank() * group.order();
    GModule::new(f, group.clone(), group.rank(), kernel, Subspace::zero(f, n))
}

/// `(a, g)` with `∂a = g − 1`; multiplication `(a,g)(b,h) = (a + g·b, gh)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MagnusPair {
    pub vector: Vec<u32>,
    pub element: u32,
}

impl MagnusPair {
    pub fn identity(ambient: usize) -> Self {
        MagnusPair { vector: vec![0; ambient], element: 0 }
    }

    pub fn mul(&self, f: PrimeField, group: &GroupTable, other: &MagnusPair) -> MagnusPair {
        let moved = act_ambient(group, group.rank(), self.element, &other.vector);
        MagnusPair { vector: f.add_vec(&self.vector, &moved), element: group.mul(&self.element, &other.element) }
    }

    pub fn pow(&self, f: PrimeField, group: &GroupTable, e: u64) -> MagnusPair {
        let mut acc = MagnusPair::identity(self.vector.len());
        for _ in 0..e {
            acc = acc.mul(f, group, self);
        }
        acc
    }

    /// Whether `∂a = g − 1`.
    pub fn satisfies_derivation(&self, f: PrimeField, group: &GroupTable) -> bool {
        boundary(f, group, &self.vector) == minus_one(f, group.order(), self.element)
    }
}

/// Fox coordinates of `w` together with its image: coordinate `(i, h)` is
/// the coefficient of `h` in `(∂w/∂x_i)^π`.
pub fn magnus_embed(f: PrimeField, group: &GroupTable, w: &Word) -> MagnusPair {
    let n = group.order();
    let gens = group.generators();
    let mut v = vec![0u32; gens.len() * n];
    let mut prefix = 0u32;
    for &l in w.letters() {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            let at = i * n + prefix as usize;
            v[at] = f.add(v[at], 1);
            prefix = group.mul(&prefix, &gens[i]);
        } else {
            prefix = group.mul(&prefix, &group.inv(&gens[i]));
            let at = i * n + prefix as usize;
            v[at] = f.sub(v[at], 1);
        }
    }
    MagnusPair { vector: v, element: prefix }
}

/// Fox coordinates of `w^{ord π(w)}`; always lies in `ker ∂`.
pub fn relator_power_image(f: PrimeField, group: &GroupTable, w: &Word) -> Vec<u32> {
    let m = magnus_embed(f, group, w);
    let ord = group.element_order(m.element);
    let out = m.pow(f, group, ord);
    debug_assert_eq!(out.element, 0);
    out.vector
}

/// `dim V^H = (d−1)|G:H| + 1` for each supplied subgroup, plus the kernel dimension.
pub fn gaschuetz_check(f: PrimeField, group: &Arc<GroupTable>, subgroups: &[ElementSet]) -> Result<Vec<Check>> {
    let module = relation_module(f, group.clone())?;
    let d = group.rank();
    let n = group.order();
    let mut checks = Vec::new();
    let kernel_expected = (d - 1) * n + 1;
    checks.push(Check::pass_if(
        "relation-module-dimension",
        "relation module decomposes as (d-1) free summands plus a trivial line",
        module.dim() == kernel_expected,
        format!("dim ker = {}, expected (d-1)|G|+1 = {kernel_expected}", module.dim()),
    ));
    let mut bad = Vec::new();
    for h in subgroups {
        let got = module.invariant_dim(&group.subgroup_generators(h));
        let expected = (d - 1) * (n / h.len()) + 1;
        if got != expected {
            bad.push(format!("|H|={} elements={:?}: dim={got}, expected {expected}", h.len(), h));
        }
    }
    checks.push(
        Check::new(
            "relation-module-invariants",
            "fixed-point dimension (d-1)|G:H| + 1",
            if bad.is_empty() { Status::Pass } else { Status::Fail },
            format!("{} subgroups checked, p = {}, d = {d}, |G| = {n}", subgroups.len(), f.p()),
        )
        .with_witnesses(bad),
    );
    Ok(checks)
}
