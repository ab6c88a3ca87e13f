//! F_p[G]-modules presented as subquotients of the free module F_p[G]^m.
//!
//! Ambient coordinates are indexed by `(copy j, element h)` at position
//! `j * |G| + h`; the group acts by left multiplication on `h`. A module is
//! a G-stable `carrier` subspace modulo a G-stable `killed` subspace.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{rref_rows, span_elements, PrimeField, Subspace};
use crate::group::GroupTable;

/// Ambient coordinate vector, reduced modulo the killed subspace where it
/// represents a module element.
pub type ModuleVector = Vec<u32>;

/// Cap on the number of quotient vectors scanned while enumerating submodules.
const VECTOR_SCAN_CAP: u64 = 2_000_000;

#[derive(Debug, Clone)]
pub struct GModule {
    field: PrimeField,
    group: Arc<GroupTable>,
    copies: usize,
    carrier: Subspace,
    killed: Subspace,
}

/// `g · v` on ambient coordinates (no reduction).
pub fn act_ambient(group: &GroupTable, copies: usize, g: u32, v: &[u32]) -> Vec<u32> {
    let n = group.order();
    let row = group.row(g);
    let mut out = vec![0u32; copies * n];
    for j in 0..copies {
        let base = j * n;
        for h in 0..n {
            out[base + row[h] as usize] = v[base + h];
        }
    }
    out
}

impl GModule {
    /// The free module F_p[G]^m.
    pub fn free(field: PrimeField, group: Arc<GroupTable>, copies: usize) -> Self {
        let n = copies * group.order();
        GModule { field, group, copies, carrier: Subspace::full(field, n), killed: Subspace::zero(field, n) }
    }

    pub fn new(
        field: PrimeField,
        group: Arc<GroupTable>,
        copies: usize,
        carrier: Subspace,
        killed: Subspace,
    ) -> Result<Self> {
        let n = copies * group.order();
        for s in [&carrier, &killed] {
            if s.ambient_dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.ambient_dim() });
            }
            if s.field() != field {
                return Err(Error::FieldMismatch(field.p(), s.field().p()));
            }
        }
        let m = GModule { field, group, copies, carrier, killed };
        if !m.is_stable(&m.carrier) || !m.is_stable(&m.killed) || !m.killed.is_subspace_of(&m.carrier)? {
            return Err(Error::NotStable);
        }
        Ok(m)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }
    pub fn copies(&self) -> usize {
        self.copies
    }
    pub fn carrier(&self) -> &Subspace {
        &self.carrier
    }
    pub fn killed(&self) -> &Subspace {
        &self.killed
    }
    pub fn ambient_dim(&self) -> usize {
        self.copies * self.group.order()
    }
    /// Dimension of carrier / killed.
    pub fn dim(&self) -> usize {
        self.carrier.dim() - self.killed.dim()
    }

    pub fn basis_vector(&self, copy: usize, h: u32) -> Vec<u32> {
        let mut e = vec![0u32; self.ambient_dim()];
        e[copy * self.group.order() + h as usize] = 1;
        e
    }

    pub fn reduce(&self, v: &[u32]) -> ModuleVector {
        self.killed.reduce_mod(v).expect("ambient length")
    }

    pub fn act(&self, g: u32, v: &[u32]) -> ModuleVector {
        self.reduce(&act_ambient(&self.group, self.copies, g, v))
    }

    /// Whether `s` is mapped into itself by every generator.
    pub fn is_stable(&self, s: &Subspace) -> bool {
        self.group.generators().iter().all(|&t| {
            s.basis().iter().all(|r| s.contains(&act_ambient(&self.group, self.copies, t, r)).unwrap_or(false))
        })
    }

    /// Smallest G-stable subspace of the ambient containing `vectors`.
    pub fn g_span(&self, vectors: &[Vec<u32>]) -> Subspace {
        let mut span = Subspace::zero(self.field, self.ambient_dim());
        let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
        for v in vectors {
            if span.insert(v).expect("ambient length") {
                queue.push_back(v.clone());
            }
        }
        while let Some(v) = queue.pop_front() {
            for &t in self.group.generators() {
                let w = act_ambient(&self.group, self.copies, t, &v);
                if span.insert(&w).expect("ambient length") {
                    queue.push_back(w);
                }
            }
        }
        span
    }

    /// Representatives of a basis of carrier / killed.
    pub fn quotient_basis(&self) -> Vec<Vec<u32>> {
        self.killed.complement_in(&self.carrier).expect("compatible subspaces")
    }

    fn deviation_rows(&self, basis: &[Vec<u32>], subgroup_gens: &[u32]) -> Vec<Vec<u32>> {
        let f = self.field;
        basis
            .iter()
            .map(|q| {
                let mut row = Vec::with_capacity(self.ambient_dim() * subgroup_gens.len());
                for &h in subgroup_gens {
                    let moved = act_ambient(&self.group, self.copies, h, q);
                    row.extend(self.reduce(&f.sub_vec(&moved, q)));
                }
                row
            })
            .collect()
    }

    /// Preimage in the ambient of the fixed space `(carrier/killed)^H`, where
    /// `H` is generated by `subgroup_gens`. Contains `killed`.
    pub fn invariants(&self, subgroup_gens: &[u32]) -> Subspace {
        let f = self.field;
        let basis = self.quotient_basis();
        let m = basis.len();
        let rows = self.deviation_rows(&basis, subgroup_gens);
        let width = rows.first().map_or(0, Vec::len);
        let augmented: Vec<Vec<u32>> = rows
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.extend((0..m).map(|k| (k == i) as u32));
                r
            })
            .collect();
        let (reduced, pivots) = rref_rows(f, width + m, augmented);
        let mut out = self.killed.clone();
        for (row, &c) in reduced.iter().zip(&pivots) {
            if c < width {
                continue;
            }
            let mut v = vec![0u32; self.ambient_dim()];
            for (k, q) in basis.iter().enumerate() {
                f.axpy(&mut v, row[width + k], q);
            }
            out.insert(&v).expect("ambient length");
        }
        out
    }

    /// `dim (carrier/killed)^H`.
    pub fn invariant_dim(&self, subgroup_gens: &[u32]) -> usize {
        let basis = self.quotient_basis();
        let m = basis.len();
        if subgroup_gens.is_empty() || m == 0 {
            return m;
        }
        let rows = self.deviation_rows(&basis, subgroup_gens);
        let width = rows[0].len();
        m - rref_rows(self.field, width, rows).1.len()
    }

    /// Kills the G-stable subspace `extra` in addition to the current one.
    pub fn quotient(&self, extra: &Subspace) -> Result<GModule> {
        if !self.is_stable(extra) {
            return Err(Error::NotStable);
        }
        if !extra.is_subspace_of(&self.carrier)? {
            return Err(Error::Invariant("quotient subspace leaves the carrier".into()));
        }
        Ok(GModule { killed: self.killed.sum(extra)?, ..self.clone() })
    }

    /// Submodule of carrier/killed generated by the classes of `vectors`,
    /// as a preimage containing `killed`.
    pub fn submodule_generated(&self, vectors: &[Vec<u32>]) -> Subspace {
        self.g_span(vectors).sum(&self.killed).expect("compatible")
    }

    /// Every submodule of carrier/killed, as preimages, each once.
    pub fn enumerate_submodules(&self, guard: usize) -> Result<Vec<Subspace>> {
        let f = self.field;
        let basis = self.quotient_basis();
        let m = basis.len();
        let scan = (f.p() as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
        if scan > VECTOR_SCAN_CAP {
            return Err(Error::GuardExceeded(guard));
        }
        // cyclic submodules from projective representatives (leading coefficient 1)
        let mut cyclic: Vec<Subspace> = Vec::new();
        let mut seen_cyclic: HashSet<Vec<Vec<u32>>> = HashSet::new();
        for lead in 0..m {
            for tail in span_elements(f, m, &unit_vectors(m)[lead + 1..]) {
                let mut coeffs = tail;
                coeffs[lead] = 1;
                let mut v = vec![0u32; self.ambient_dim()];
                for (k, q) in basis.iter().enumerate() {
                    f.axpy(&mut v, coeffs[k], q);
                }
                let c = self.submodule_generated(&[v]);
                if seen_cyclic.insert(c.basis().to_vec()) {
                    cyclic.push(c);
                }
            }
        }
        let mut seen: HashSet<Vec<Vec<u32>>> = HashSet::from([self.killed.basis().to_vec()]);
        let mut out = vec![self.killed.clone()];
        let mut k = 0;
        while k < out.len() {
            for c in &cyclic {
                if c.is_subspace_of(&out[k])? {
                    continue;
                }
                let s = out[k].sum(c)?;
                if seen.insert(s.basis().to_vec()) {
                    if out.len() >= guard {
                        return Err(Error::GuardExceeded(guard));
                    }
                    out.push(s);
                }
            }
            k += 1;
        }
        out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.basis().cmp(b.basis())));
        Ok(out)
    }

    /// `span{(n - 1) v : n ∈ gens, v ∈ carrier}` closed under G, plus killed:
    /// the smallest submodule modulo which the subgroup acts trivially when
    /// `gens` generate a normal subgroup.
    pub fn augmentation_span(&self, subgroup_gens: &[u32]) -> Subspace {
        let f = self.field;
        let mut vecs = Vec::new();
        for q in self.quotient_basis() {
            for &h in subgroup_gens {
                vecs.push(f.sub_vec(&act_ambient(&self.group, self.copies, h, &q), &q));
            }
        }
        self.submodule_generated(&vecs)
    }
}

fn unit_vectors(m: usize) -> Vec<Vec<u32>> {
    (0..m)
        .map(|i| {
            let mut e = vec![0u32; m];
            e[i] = 1;
            e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use proptest::prelude::*;

    fn field(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn norm(m: &GModule, copy: usize) -> Vec<u32> {
        let n = m.group().order();
        let mut v = vec![0; m.ambient_dim()];
        for h in 0..n {
            v[copy * n + h] = 1;
        }
        v
    }

    #[test]
    fn act_examples() {
        let c2 = Arc::new(GroupTable::cyclic(2, 1));
        let m = GModule::free(field(3), c2, 1);
        assert_eq!(m.act(1, &m.basis_vector(0, 0)), m.basis_vector(0, 1));
        let v = vec![2, 1];
        assert_eq!(m.act(0, &v), v);
    }

    #[test]
    fn g_span_examples() {
        let c2 = Arc::new(GroupTable::cyclic(2, 1));
        let m = GModule::free(field(3), c2, 1);
        assert_eq!(m.g_span(&[vec![0, 0]]).dim(), 0);
        assert_eq!(m.g_span(&[m.basis_vector(0, 1)]).dim(), 2);
        assert_eq!(m.g_span(&[norm(&m, 0)]).dim(), 1);
    }

    #[test]
    fn invariant_examples() {
        let c3 = Arc::new(GroupTable::cyclic(3, 1));
        let m = GModule::free(field(5), c3.clone(), 1);
        assert_eq!(m.invariant_dim(&[]), 3);
        assert_eq!(m.invariants(&[1]).dim(), 1);
        assert_eq!(m.invariant_dim(&[1]), 1);
        // brute-force oracle over all 125 vectors
        let fixed = Subspace::full(field(5), 3).elements().into_iter().filter(|v| &m.act(1, v) == v).count();
        assert_eq!(fixed, 5);

        let c2 = Arc::new(GroupTable::cyclic(2, 1));
        let m2 = GModule::free(field(3), c2, 2);
        assert_eq!(m2.invariant_dim(&[1]), 2);
        let fixed = Subspace::full(field(3), 4).elements().into_iter().filter(|v| &m2.act(1, v) == v).count();
        assert_eq!(fixed, 9);
    }

    #[test]
    fn quotient_examples() {
        let c2 = Arc::new(GroupTable::cyclic(2, 1));
        let m = GModule::free(field(3), c2, 1);
        assert_eq!(m.quotient(&Subspace::zero(field(3), 2)).unwrap().dim(), 2);
        assert_eq!(m.quotient(&Subspace::full(field(3), 2)).unwrap().dim(), 0);
        let norm_line = m.g_span(&[norm(&m, 0)]);
        let q = m.quotient(&norm_line).unwrap();
        assert_eq!(q.dim(), 1);
        let not_stable = Subspace::from_vectors(field(3), 2, vec![vec![1, 0]]).unwrap();
        assert_eq!(m.quotient(&not_stable).unwrap_err(), Error::NotStable);
        // on the quotient the generator acts by -1, so nothing nonzero is fixed
        assert_eq!(q.invariant_dim(&[1]), 0);
    }

    fn brute_force_stable_subspaces(m: &GModule) -> usize {
        // every subspace is spanned by at most dim vectors; enumerate spans of pairs
        let n = m.ambient_dim();
        let f = m.field();
        let all = Subspace::full(f, n).elements();
        let mut seen = HashSet::new();
        for a in &all {
            for b in &all {
                let s = Subspace::from_vectors(f, n, vec![a.clone(), b.clone()]).unwrap();
                if m.is_stable(&s) {
                    seen.insert(s.basis().to_vec());
                }
            }
        }
        seen.len()
    }

    #[test]
    fn submodule_enumeration_examples() {
        let triv = Arc::new(GroupTable::trivial(1));
        let zero = GModule::free(field(3), triv.clone(), 0);
        assert_eq!(zero.enumerate_submodules(100).unwrap().len(), 1);

        let plane = GModule::free(field(3), triv, 2);
        assert_eq!(plane.enumerate_submodules(100).unwrap().len(), 6);
        assert_eq!(brute_force_stable_subspaces(&plane), 6);

        let c2 = Arc::new(GroupTable::cyclic(2, 1));
        let reg = GModule::free(field(3), c2, 1);
        let subs = reg.enumerate_submodules(100).unwrap();
        assert_eq!(subs.len(), 4);
        assert_eq!(brute_force_stable_subspaces(&reg), 4);
        assert!(subs.iter().all(|s| reg.is_stable(s)));
        assert_eq!(reg.enumerate_submodules(2).unwrap_err(), Error::GuardExceeded(2));
    }

    #[test]
    fn submodules_of_a_quotient_contain_killed() {
        let s3 = Arc::new(GroupTable::symmetric3());
        let reg = GModule::free(field(5), s3, 1);
        let q = reg.quotient(&reg.g_span(&[norm(&reg, 0)])).unwrap();
        let subs = q.enumerate_submodules(10_000).unwrap();
        for s in &subs {
            assert!(q.killed().is_subspace_of(s).unwrap());
            assert!(q.is_stable(s));
        }
        // F_5[S3] / trivial = sign ⊕ 2-dim irreducible twice
        let dims: Vec<usize> = subs.iter().map(|s| s.dim() - 1).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 0).count(), 1);
        assert_eq!(dims.iter().filter(|&&d| d == 5).count(), 1);
        assert_eq!(subs.len(), 16);
    }

    proptest! {
        #[test]
        fn action_is_linear_and_multiplicative(
            g1 in 0u32..6, g2 in 0u32..6,
            v in prop::collection::vec(0u32..5, 12),
            w in prop::collection::vec(0u32..5, 12),
        ) {
            let f = field(5);
            let s3 = Arc::new(GroupTable::symmetric3());
            let m = GModule::free(f, s3.clone(), 2);
            let lhs = m.act(s3.mul(&g1, &g2), &v);
            prop_assert_eq!(&lhs, &m.act(g1, &m.act(g2, &v)));
            prop_assert_eq!(m.act(g1, &f.add_vec(&v, &w)), f.add_vec(&m.act(g1, &v), &m.act(g1, &w)));
            prop_assert_eq!(m.act(g1, &m.act(s3.inv(&g1), &v)), v.clone());
        }

        #[test]
        fn g_span_is_stable_and_idempotent(v in prop::collection::vec(0u32..3, 6)) {
            let s3 = Arc::new(GroupTable::symmetric3());
            let m = GModule::free(field(3), s3, 1);
            let s = m.g_span(&[v.clone()]);
            prop_assert!(m.is_stable(&s));
            prop_assert!(s.contains(&v).unwrap());
            prop_assert_eq!(m.g_span(s.basis()), s);
        }
    }
}
