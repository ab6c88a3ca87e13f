use std::sync::Arc;

use jitower::analysis::{normal_closure_check, pi_graded_check, tower_normals, SUBMODULE_GUARD};
use jitower::cert::Status;
use jitower::ff::PrimeField;
use jitower::forge::{build_module, ForgeInput, Rational};
use jitower::group::GroupTable;
use jitower::tower::{TowerConfig, TowerState};

fn build(c: TowerConfig) -> TowerState {
    let depth = c.depth;
    let mut t = TowerState::init(c).unwrap();
    assert!(t.extend_to(depth).unwrap().is_none());
    t
}

#[test]
fn standard_tower_sizes() {
    let t = build(TowerConfig::standard());
    assert_eq!(t.group(1).unwrap().order(), 4);
    assert_eq!(t.level(2).dim(), 4);
    assert_eq!(t.group(2).unwrap().order(), 324);
    assert_eq!(t.level(3).dim(), 324);
    assert!(t.group(3).is_err());
    for k in 2..=3 {
        assert!(t.level(k).record.words.is_empty());
        assert!(t.level(k).record.hlist.is_empty());
        assert!(!t.level(k).record.gate);
    }
    let c = normal_closure_check(&t, 2, SUBMODULE_GUARD).unwrap();
    assert_eq!(c.status, Status::NotGuaranteed);
}

#[test]
fn forced_subgroup_list() {
    let mut c = TowerConfig::standard();
    c.modes.force_hlist = true;
    let t = build(c);
    let l = t.level(3);
    assert_eq!(l.record.hlist.len(), 3);
    assert!(l.record.hlist.iter().all(|h| h.len() == 18));
    // three normal closures of order 18 in a group of order 324, each self-normalising
    assert_eq!(l.record.delta, Rational::new(1, 1) - Rational::new(3 * 324, 18 * 324));
    assert_eq!(l.record.delta, Rational::new(5, 6));
    assert!(l.record.relaxed);
    assert!(l.dim() as i128 * 6 >= 324 * 5);
    assert_eq!(normal_closure_check(&t, 2, SUBMODULE_GUARD).unwrap().status, Status::Pass);
    for ch in t.hlist_checks().unwrap().iter().chain(&t.forge_checks().unwrap()) {
        assert!(!ch.failed(), "{ch:?}");
    }
}

#[test]
fn nontrivial_seed_grading() {
    let mut c = TowerConfig::standard();
    c.seed = Some(GroupTable::cyclic(3, 2));
    c.primes = vec![2, 5];
    c.depth = 2;
    let t = build(c);
    assert_eq!(t.seed().order(), 3);
    let mut graded = 0;
    for k in 1..=2 {
        if t.group(k).is_err() {
            continue;
        }
        graded += 1;
        for ch in pi_graded_check(&t, k).unwrap() {
            assert_eq!(ch.status, Status::Pass, "{ch:?}");
        }
    }
    assert!(graded >= 1);
    // F_2^2 ⋊ C3
    assert_eq!(t.group_order(1), Some(12));
    // the first level maps onto the seed
    let g1 = t.group(1).unwrap();
    let image: std::collections::BTreeSet<u32> = g1.elements.iter().map(|e| e.element).collect();
    assert_eq!(image.len(), 3);
}

/// `V^N = 0` exactly when `(N − 1)V` is everything, for `N` of order prime to `p`.
#[test]
fn fixed_points_vanish_iff_augmentation_is_full() {
    let s3 = Arc::new(GroupTable::symmetric3());
    let v4 = Arc::new(GroupTable::elementary_abelian(2, 2));
    let a3 = s3.subgroup_closure(&[s3.generators()[1]]);
    let mut seen = [0usize; 2];
    for (g, p, subgroups) in [(&s3, 5, vec![]), (&s3, 7, vec![a3.clone()]), (&v4, 3, vec![]), (&v4, 5, vec![])] {
        let f = PrimeField::new(p).unwrap();
        let out = build_module(&ForgeInput { field: f, group: g.clone(), words: vec![], subgroups }, false).unwrap();
        let m = &out.module;
        let quotient = m.quotient(m.carrier()).unwrap();
        for n in g.all_subgroups(1000).unwrap().into_iter().filter(|n| g.is_normal(n)) {
            let gens = g.subgroup_generators(&n);
            let aug = m.augmentation_span(&gens);
            let full = aug.same_as(quotient.killed()).unwrap();
            let fixed = m.invariant_dim(&gens);
            assert_eq!(fixed == 0, full, "|N| = {}, dim V^N = {fixed}", n.len());
            assert_eq!(aug.dim() - m.killed().dim() + fixed, m.dim());
            seen[usize::from(full)] += 1;
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn classification_recovers_every_level() {
    let t = build(TowerConfig::standard());
    let levels = tower_normals(&t, 2, SUBMODULE_GUARD).unwrap();
    assert_eq!(levels[0].len(), 1);
    // G_1 = C2^2 has five normal subgroups
    assert_eq!(levels[1].len(), 5);
    assert_eq!(levels[2].len(), 30);
    let g2 = t.group(2).unwrap();
    for n in &levels[2] {
        assert_eq!(n.index * n.elements.len() as u128, g2.order() as u128);
        assert!(g2.table.is_normal(&n.elements));
    }
}
