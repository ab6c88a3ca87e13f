//! Finite groups: the abstraction used by the Fox calculus, and
//! enumerated groups given by a Cayley table with a distinguished
//! generating tuple.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::words::Word;

pub trait FiniteGroup {
    type Elem: Clone + Eq + Hash + Ord + Debug;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

/// Default cap on enumerated group orders. The Cayley table is stored
/// densely, so this also bounds memory.
pub const DEFAULT_ENUMERATION_CAP: usize = 10_000;

/// An enumerated group. Element 0 is the identity; `gens` is the
/// distinguished generating tuple `(t_1, …, t_d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    n: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    gens: Vec<u32>,
    /// A positive word in the generators for every element.
    words: Vec<Word>,
}

impl FiniteGroup for GroupTable {
    type Elem = u32;
    fn identity(&self) -> u32 {
        0
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.mul[*a as usize * self.n + *b as usize]
    }
    #[inline]
    fn inv(&self, a: &u32) -> u32 {
        self.inv[*a as usize]
    }
}

/// Sorted element list of a subgroup.
pub type ElementSet = Vec<u32>;

impl GroupTable {
    pub fn trivial(d: usize) -> Self {
        GroupTable { n: 1, mul: vec![0], inv: vec![0], gens: vec![0; d], words: vec![Word::identity()] }
    }

    /// Enumerates the group generated by `gens` under `mul`, by breadth-first
    /// search over right multiplication by generators. Elements are then
    /// sorted (identity first) and the table is filled by walking words.
    pub fn from_closure<E, F>(identity: E, gens: &[E], mul: F, cap: usize) -> Result<(Self, Vec<E>)>
    where
        E: Clone + Eq + Hash + Ord,
        F: Fn(&E, &E) -> E,
    {
        let d = gens.len();
        let mut elems = vec![identity.clone()];
        let mut index: HashMap<E, usize> = HashMap::from([(identity.clone(), 0)]);
        let mut bfs_words = vec![Vec::<i32>::new()];
        let mut right: Vec<u32> = Vec::new();
        let mut k = 0;
        while k < elems.len() {
            for (j, t) in gens.iter().enumerate() {
                let y = mul(&elems[k], t);
                let at = match index.get(&y) {
                    Some(&at) => at,
                    None => {
                        if elems.len() >= cap {
                            return Err(Error::EnumerationCap { order: elems.len() + 1, cap });
                        }
                        let mut w = bfs_words[k].clone();
                        w.push(j as i32 + 1);
                        bfs_words.push(w);
                        index.insert(y.clone(), elems.len());
                        elems.push(y);
                        elems.len() - 1
                    }
                };
                right.push(at as u32);
            }
            k += 1;
        }
        let n = elems.len();
        // canonical order: identity, then the rest sorted
        let mut order: Vec<usize> = (1..n).collect();
        order.sort_by(|&a, &b| elems[a].cmp(&elems[b]));
        order.insert(0, 0);
        let mut new_of_old = vec![0u32; n];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new as u32;
        }
        let mut right_new = vec![0u32; n * d];
        for old in 0..n {
            for j in 0..d {
                right_new[new_of_old[old] as usize * d + j] = new_of_old[right[old * d + j] as usize];
            }
        }
        let words: Vec<Word> = order.iter().map(|&old| Word::reduce(d, &bfs_words[old]).expect("positive letters")).collect();
        let sorted: Vec<E> = order.iter().map(|&old| elems[old].clone()).collect();
        let gens_idx: Vec<u32> = (0..d).map(|j| right_new[j]).collect();
        let table = Self::from_right_generators(n, d, &right_new, gens_idx, words);
        Ok((table, sorted))
    }

    fn from_right_generators(n: usize, d: usize, right: &[u32], gens: Vec<u32>, words: Vec<Word>) -> Self {
        let mut mul = vec![0u32; n * n];
        for x in 0..n {
            for (y, w) in words.iter().enumerate() {
                let mut acc = x as u32;
                for &l in w.letters() {
                    acc = right[acc as usize * d + (l as usize - 1)];
                }
                mul[x * n + y] = acc;
            }
        }
        let mut inv = vec![0u32; n];
        for x in 0..n {
            inv[x] = (0..n as u32).find(|&y| mul[x * n + y as usize] == 0).expect("group has inverses");
        }
        GroupTable { n, mul, inv, gens, words }
    }

    /// Builds a group from an explicit multiplication table with identity 0,
    /// validating the group axioms and that `gens` generate.
    pub fn from_table(rows: &[Vec<u32>], gens: Vec<u32>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        let mut mul = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::InvalidTable(format!("row of length {} in table of order {n}", r.len())));
            }
            if r.iter().any(|&x| x as usize >= n) {
                return Err(Error::InvalidTable("entry out of range".into()));
            }
            mul.extend_from_slice(r);
        }
        if gens.iter().any(|&g| g as usize >= n) {
            return Err(Error::InvalidTable("generator out of range".into()));
        }
        for x in 0..n {
            if mul[x] as usize != x || mul[x * n] as usize != x {
                return Err(Error::InvalidTable("element 0 is not the identity".into()));
            }
        }
        for x in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for y in 0..n {
                row_seen[mul[x * n + y] as usize] = true;
                col_seen[mul[y * n + x] as usize] = true;
            }
            if row_seen.iter().chain(&col_seen).any(|&s| !s) {
                return Err(Error::InvalidTable("not a Latin square".into()));
            }
        }
        let mut inv = vec![0u32; n];
        for x in 0..n {
            inv[x] = (0..n as u32).find(|&y| mul[x * n + y as usize] == 0).expect("Latin square");
        }
        let t = GroupTable { n, mul, inv, gens, words: Vec::new() };
        // Light's test: associativity on a generating set suffices.
        let closure = t.subgroup_closure(&t.gens);
        if closure.len() != n {
            return Err(Error::NotGenerating { closure: closure.len(), order: n });
        }
        for &g in &t.gens {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if t.mul(&t.mul(&x, &g), &y) != t.mul(&x, &t.mul(&g, &y)) {
                        return Err(Error::InvalidTable("multiplication is not associative".into()));
                    }
                }
            }
        }
        let words = t.bfs_words();
        Ok(GroupTable { words, ..t })
    }

    fn bfs_words(&self) -> Vec<Word> {
        let d = self.gens.len();
        let mut words: Vec<Option<Vec<i32>>> = vec![None; self.n];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for (j, &g) in self.gens.iter().enumerate() {
                let y = self.mul(&x, &g);
                if words[y as usize].is_none() {
                    let mut w = words[x as usize].clone().unwrap();
                    w.push(j as i32 + 1);
                    words[y as usize] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        words.into_iter().map(|w| Word::reduce(d, &w.expect("generators generate")).unwrap()).collect()
    }

    /// The group generated by permutations of `0..m` (composition `(ab)(x) = a(b(x))`).
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self> {
        let m = gens.first().map_or(0, |g| g.len());
        let id: Vec<usize> = (0..m).collect();
        let compose = |a: &Vec<usize>, b: &Vec<usize>| b.iter().map(|&x| a[x]).collect::<Vec<usize>>();
        Ok(Self::from_closure(id, gens, compose, DEFAULT_ENUMERATION_CAP)?.0)
    }

    /// `C_n` with generator 1, repeated `d` times.
    pub fn cyclic(n: usize, d: usize) -> Self {
        let rows: Vec<Vec<u32>> = (0..n).map(|a| (0..n).map(|b| ((a + b) % n) as u32).collect()).collect();
        let gens = vec![if n > 1 { 1 } else { 0 }; d];
        Self::from_table(&rows, gens).expect("cyclic group table")
    }

    /// `(Z/n)^k` with the standard basis as generators.
    pub fn elementary_abelian(n: usize, k: usize) -> Self {
        let gens: Vec<Vec<u32>> = (0..k)
            .map(|i| {
                let mut e = vec![0u32; k];
                e[i] = 1;
                e
            })
            .collect();
        let add = |a: &Vec<u32>, b: &Vec<u32>| a.iter().zip(b).map(|(x, y)| (x + y) % n as u32).collect();
        Self::from_closure(vec![0u32; k], &gens, add, DEFAULT_ENUMERATION_CAP).expect("small group").0
    }

    /// `S_3` generated by a transposition and a 3-cycle.
    pub fn symmetric3() -> Self {
        Self::from_permutations(&[vec![0, 2, 1], vec![1, 2, 0]]).expect("S3")
    }

    /// Same group with a different generating tuple.
    pub fn with_generators(&self, gens: Vec<u32>) -> Result<Self> {
        let rows: Vec<Vec<u32>> = (0..self.n).map(|x| self.mul[x * self.n..(x + 1) * self.n].to_vec()).collect();
        Self::from_table(&rows, gens)
    }

    pub fn order(&self) -> usize {
        self.n
    }
    pub fn rank(&self) -> usize {
        self.gens.len()
    }
    pub fn generators(&self) -> &[u32] {
        &self.gens
    }
    pub fn word_of(&self, x: u32) -> &Word {
        &self.words[x as usize]
    }
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.n as u32
    }
    pub fn row(&self, x: u32) -> &[u32] {
        &self.mul[x as usize * self.n..(x as usize + 1) * self.n]
    }

    pub fn eval(&self, w: &Word) -> u32 {
        w.eval(self, &self.gens)
    }

    pub fn element_order(&self, x: u32) -> u64 {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(&y, &x);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        self.elements().map(|x| self.element_order(x)).fold(1, num_integer::lcm)
    }

    pub fn conjugate(&self, g: u32, x: u32) -> u32 {
        self.mul(&self.mul(&g, &x), &self.inv(&g))
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(&self.mul(&a, &b), &self.mul(&self.inv(&a), &self.inv(&b)))
    }

    pub fn power(&self, x: u32, e: u64) -> u32 {
        (0..e).fold(0, |acc, _| self.mul(&acc, &x))
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn subgroup_closure(&self, gens: &[u32]) -> ElementSet {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut queue = VecDeque::from([0u32]);
        let mut out = vec![0u32];
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.mul(&x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[u32]) -> ElementSet {
        let mut conj: Vec<u32> = seeds
            .iter()
            .flat_map(|&s| self.elements().map(move |g| (g, s)))
            .map(|(g, s)| self.conjugate(g, s))
            .collect();
        conj.sort_unstable();
        conj.dedup();
        self.subgroup_closure(&conj)
    }

    pub fn is_normal(&self, set: &[u32]) -> bool {
        let member = self.membership(set);
        self.generators()
            .iter()
            .chain(std::iter::once(&0))
            .all(|&g| set.iter().all(|&x| member[self.conjugate(g, x) as usize]))
    }

    pub fn membership(&self, set: &[u32]) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &x in set {
            m[x as usize] = true;
        }
        m
    }

    pub fn normalizer_order(&self, set: &[u32]) -> usize {
        let member = self.membership(set);
        self.elements().filter(|&g| set.iter().all(|&x| member[self.conjugate(g, x) as usize])).count()
    }

    /// A small generating set of the subgroup `set`, chosen greedily in element order.
    pub fn subgroup_generators(&self, set: &[u32]) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut current = vec![0u32];
        for &x in set {
            if current.binary_search(&x).is_err() {
                gens.push(x);
                current = self.subgroup_closure(&gens);
                if current.len() == set.len() {
                    break;
                }
            }
        }
        gens
    }

    /// Distinct cyclic subgroups, ordered by their element lists.
    pub fn cyclic_subgroups(&self) -> Vec<ElementSet> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for x in self.elements() {
            let c = self.subgroup_closure(&[x]);
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
        out.sort();
        out
    }

    /// Cyclic subgroups up to conjugacy, one representative per class.
    pub fn cyclic_subgroup_classes(&self) -> Vec<ElementSet> {
        let mut seen: HashSet<ElementSet> = HashSet::new();
        let mut out = Vec::new();
        for c in self.cyclic_subgroups() {
            if seen.contains(&c) {
                continue;
            }
            for g in self.elements() {
                let mut conj: Vec<u32> = c.iter().map(|&x| self.conjugate(g, x)).collect();
                conj.sort_unstable();
                seen.insert(conj);
            }
            out.push(c);
        }
        out
    }

    /// Every subgroup, by closing the cyclic subgroups under joins.
    pub fn all_subgroups(&self, guard: usize) -> Result<Vec<ElementSet>> {
        let cyclic = self.cyclic_subgroups();
        let mut seen: HashSet<ElementSet> = cyclic.iter().cloned().collect();
        let mut queue: VecDeque<ElementSet> = cyclic.iter().cloned().collect();
        while let Some(h) = queue.pop_front() {
            for c in &cyclic {
                if c.iter().all(|x| h.binary_search(x).is_ok()) {
                    continue;
                }
                let mut gens = self.subgroup_generators(&h);
                gens.extend(self.subgroup_generators(c));
                let j = self.subgroup_closure(&gens);
                if seen.insert(j.clone()) {
                    if seen.len() > guard {
                        return Err(Error::GuardExceeded(guard));
                    }
                    queue.push_back(j);
                }
            }
        }
        let mut out: Vec<ElementSet> = seen.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// Parses the seed-group text format: the order, the table rows, then
    /// the generator indices.
    pub fn parse_seed(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let bad = |m: &str| Error::InvalidTable(m.to_string());
        let n: usize = lines.next().ok_or_else(|| bad("missing order"))?.parse().map_err(|_| bad("bad order"))?;
        let parse_row = |l: &str| -> Result<Vec<u32>> {
            l.split_whitespace().map(|x| x.parse::<u32>().map_err(|_| bad("bad table entry"))).collect()
        };
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            rows.push(parse_row(lines.next().ok_or_else(|| bad("truncated table"))?)?);
        }
        let gens = parse_row(lines.next().ok_or_else(|| bad("missing generator line"))?)?;
        if lines.next().is_some() {
            return Err(bad("trailing content"));
        }
        Self::from_table(&rows, gens)
    }

    pub fn to_seed_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for x in 0..self.n {
            let row: Vec<String> = self.row(x as u32).iter().map(u32::to_string).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        let g: Vec<String> = self.gens.iter().map(u32::to_string).collect();
        s.push_str(&g.join(" "));
        s.push('\n');
        s
    }
}
