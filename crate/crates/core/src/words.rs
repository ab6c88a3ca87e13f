//! Words in the free group on `x_1, …, x_d`, the order budget, and Fox
//! derivatives evaluated in a group ring.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::group::FiniteGroup;

/// A freely reduced word. Letter `+i` is `x_i`, `-i` is `x_i^{-1}` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces `letters`, rejecting indices outside `1..=d`.
    pub fn reduce(d: usize, letters: &[i32]) -> Result<Self> {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 || l.unsigned_abs() as usize > d {
                return Err(Error::LetterOutOfRange { index: l, rank: d });
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(Word(out))
    }

    pub fn generator(i: usize) -> Self {
        Word(vec![i as i32])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn pow(&self, n: u64) -> Word {
        (0..n).fold(Word::identity(), |acc, _| acc.mul(self))
    }

    /// Image under the homomorphism sending `x_i` to `images[i-1]`.
    pub fn eval<G: FiniteGroup>(&self, group: &G, images: &[G::Elem]) -> G::Elem {
        let mut acc = group.identity();
        for &l in &self.0 {
            let g = &images[l.unsigned_abs() as usize - 1];
            acc = if l > 0 { group.mul(&acc, g) } else { group.mul(&acc, &group.inv(g)) };
        }
        acc
    }

    /// Parses `x1 x2^-1 x1` style text; `1` denotes the identity.
    pub fn parse(d: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let bad = || Error::Format(format!("bad word token {tok:?}"));
            let body = tok.strip_prefix('x').ok_or_else(bad)?;
            let (idx, inv) = match body.split_once("^-1") {
                Some((i, "")) => (i, true),
                None => (body, false),
                _ => return Err(bad()),
            };
            let i: i32 = idx.parse().map_err(|_| bad())?;
            letters.push(if inv { -i } else { i });
        }
        Word::reduce(d, &letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if l > 0 {
                write!(f, "x{l}")?;
            } else {
                write!(f, "x{}^-1", -l)?;
            }
        }
        Ok(())
    }
}

/// Letters in enumeration order: `x1, x1^-1, x2, x2^-1, …`.
fn letter_order(d: usize) -> Vec<i32> {
    (1..=d as i32).flat_map(|i| [i, -i]).collect()
}

/// All reduced words of length at most `max_len` in (length, lex) order,
/// lex being induced by [`letter_order`].
pub fn enumerate_words(d: usize, max_len: usize) -> Vec<Word> {
    let letters = letter_order(d);
    let mut out = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.0.last() != Some(&-l) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Number of reduced words of length exactly `n` in rank `d`.
pub fn words_of_length(d: usize, n: usize) -> u128 {
    if n == 0 {
        1
    } else {
        2 * d as u128 * (2 * d as u128 - 1).pow(n as u32 - 1)
    }
}

/// `o(w) = A · B^{|w|}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderBudget {
    pub scale: u64,
    pub base: u64,
    /// Set when the summability condition was waived.
    pub test_mode: bool,
}

impl OrderBudget {
    /// A conforming budget; the base must exceed `2d - 1`.
    pub fn new(scale: u64, base: u64, d: usize) -> Result<Self> {
        if scale == 0 {
            return Err(Error::InvalidBudget("scale must be positive".into()));
        }
        let bound = 2 * d as u64 - 1;
        if base <= bound {
            return Err(Error::DivergentBudget { base, bound });
        }
        Ok(OrderBudget { scale, base, test_mode: false })
    }

    /// A budget that may violate the summability condition; only used to
    /// exercise word freezing at small scale.
    pub fn test(scale: u64, base: u64) -> Result<Self> {
        if scale == 0 || base < 2 {
            return Err(Error::InvalidBudget("test budget needs scale >= 1 and base >= 2".into()));
        }
        Ok(OrderBudget { scale, base, test_mode: true })
    }

    pub fn of_len(&self, len: usize) -> u128 {
        (self.base as u128)
            .checked_pow(len as u32)
            .and_then(|b| b.checked_mul(self.scale as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn of(&self, w: &Word) -> u128 {
        self.of_len(w.len())
    }

    /// Longest word length whose budget is still below `bound`.
    pub fn max_len_below(&self, bound: u128) -> Option<usize> {
        if self.of_len(0) >= bound {
            return None;
        }
        let mut n = 0;
        while self.of_len(n + 1) < bound {
            n += 1;
        }
        Some(n)
    }

    /// Closed form of `Σ_{w ≠ 1} 1/o(w) = 2d / (A (B - 2d + 1))`.
    pub fn tail_sum(&self, d: usize) -> Result<Ratio<i128>> {
        let bound = 2 * d as u64 - 1;
        if self.base <= bound {
            return Err(Error::DivergentBudget { base: self.base, bound });
        }
        Ok(Ratio::new(2 * d as i128, self.scale as i128 * (self.base - bound) as i128))
    }
}

/// Whether the tail sum is at most `eps / 2`. Equality is enough: every
/// listed word has order strictly above its budget, so the listed reciprocals
/// still sum to strictly less than `eps / 2`.
pub fn budget_check(o: &OrderBudget, d: usize, eps: Ratio<i128>) -> Result<bool> {
    Ok(o.tail_sum(d)? <= eps / 2)
}

/// An element of F_p[G] as a sparse map from group elements to nonzero
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSum<E: Ord> {
    terms: BTreeMap<E, u32>,
}

impl<E: Ord + Clone> FormalSum<E> {
    pub fn zero() -> Self {
        FormalSum { terms: BTreeMap::new() }
    }

    pub fn single(f: PrimeField, c: i64, e: E) -> Self {
        let mut s = Self::zero();
        s.add_term(f, f.from_i64(c), e);
        s
    }

    pub fn add_term(&mut self, f: PrimeField, c: u32, e: E) {
        let entry = self.terms.entry(e.clone()).or_insert(0);
        *entry = f.add(*entry, c % f.p());
        if *entry == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, f: PrimeField, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(f, c, e.clone());
        }
        out
    }

    pub fn neg(&self, f: PrimeField) -> Self {
        FormalSum { terms: self.terms.iter().map(|(e, &c)| (e.clone(), f.neg(c))).collect() }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&E, u32)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coefficient(&self, e: &E) -> u32 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `g · self`
    pub fn left_mul<G: FiniteGroup<Elem = E>>(&self, f: PrimeField, group: &G, g: &E) -> Self {
        let mut out = Self::zero();
        for (e, &c) in &self.terms {
            out.add_term(f, c, group.mul(g, e));
        }
        out
    }

    pub fn mul<G: FiniteGroup<Elem = E>>(&self, f: PrimeField, group: &G, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, &c) in &self.terms {
            for (b, &d) in &other.terms {
                out.add_term(f, f.mul(c, d), group.mul(a, b));
            }
        }
        out
    }
}

/// The Fox derivative `∂w/∂x_i` pushed into F_p[G] along `x_j ↦ images[j-1]`.
pub fn fox_eval<G: FiniteGroup>(
    f: PrimeField,
    group: &G,
    images: &[G::Elem],
    w: &Word,
    i: usize,
) -> FormalSum<G::Elem> {
    let mut out = FormalSum::zero();
    let mut prefix = group.identity();
    for &l in w.letters() {
        let j = l.unsigned_abs() as usize;
        let t = &images[j - 1];
        if l > 0 {
            if j == i {
                out.add_term(f, 1 % f.p(), prefix.clone());
            }
            prefix = group.mul(&prefix, t);
        } else {
            prefix = group.mul(&prefix, &group.inv(t));
            if j == i {
                out.add_term(f, f.neg(1 % f.p()), prefix.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupTable;
    use proptest::prelude::*;

    fn field(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(Word::reduce(2, &[1, -1]).unwrap(), Word::identity());
        assert_eq!(Word::reduce(2, &[1, 2, -2, 1]).unwrap().letters(), &[1, 1]);
        let w = Word::reduce(2, &[1, -2, 2, 2, -1]).unwrap();
        assert_eq!(Word::reduce(2, w.letters()).unwrap(), w);
        assert_eq!(Word::reduce(2, &[3]), Err(Error::LetterOutOfRange { index: 3, rank: 2 }));
        assert!(Word::reduce(2, &[0]).is_err());
    }

    #[test]
    fn parse_display_round_trip() {
        let w = Word::parse(2, "x1 x2^-1 x1").unwrap();
        assert_eq!(w.letters(), &[1, -2, 1]);
        assert_eq!(Word::parse(2, &w.to_string()).unwrap(), w);
        assert_eq!(Word::parse(2, "1").unwrap(), Word::identity());
        assert!(Word::parse(2, "y1").is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_words(2, 1).len(), 5);
        assert_eq!(enumerate_words(2, 2).iter().filter(|w| w.len() == 2).count(), 12);
        assert_eq!(enumerate_words(3, 0), vec![Word::identity()]);
        for d in 1..=3 {
            let ws = enumerate_words(d, 4);
            for n in 0..=4 {
                assert_eq!(ws.iter().filter(|w| w.len() == n).count() as u128, words_of_length(d, n));
            }
            let set: std::collections::HashSet<_> = ws.iter().collect();
            assert_eq!(set.len(), ws.len());
            for w in &ws {
                assert_eq!(&Word::reduce(d, w.letters()).unwrap(), w);
            }
        }
    }

    #[test]
    fn enumeration_is_length_lex() {
        let ws = enumerate_words(2, 3);
        let order = letter_order(2);
        let key = |w: &Word| -> (usize, Vec<usize>) {
            (w.len(), w.letters().iter().map(|l| order.iter().position(|x| x == l).unwrap()).collect())
        };
        for pair in ws.windows(2) {
            assert!(key(&pair[0]) < key(&pair[1]));
        }
    }

    /// Partial sums of `Σ_n 2d(2d-1)^{n-1} / (A B^n)` up to length 40.
    fn partial_tail(d: usize, a: u64, b: u64) -> f64 {
        (1..=40).map(|n| words_of_length(d, n) as f64 / (a as f64 * (b as f64).powi(n as i32))).sum()
    }

    #[test]
    fn budget_examples() {
        let eps = Ratio::new(1, 5);
        let ok = OrderBudget::new(16, 8, 2).unwrap();
        assert_eq!(ok.tail_sum(2).unwrap(), Ratio::new(1, 20));
        assert!((partial_tail(2, 16, 8) - 0.05).abs() < 1e-9);
        assert!(budget_check(&ok, 2, eps).unwrap());
        // boundary case: tail sum equal to eps/2
        assert!(budget_check(&ok, 2, Ratio::new(1, 10)).unwrap());
        assert!(!budget_check(&ok, 2, Ratio::new(1, 11)).unwrap());

        let bad = OrderBudget::new(1, 8, 2).unwrap();
        assert_eq!(bad.tail_sum(2).unwrap(), Ratio::new(4, 5));
        assert!((partial_tail(2, 1, 8) - 0.8).abs() < 1e-9);
        assert!(!budget_check(&bad, 2, eps).unwrap());

        assert_eq!(OrderBudget::new(16, 3, 2), Err(Error::DivergentBudget { base: 3, bound: 3 }));
        let t = OrderBudget::test(1, 3).unwrap();
        assert!(budget_check(&t, 2, eps).is_err());
    }

    #[test]
    fn budget_is_monotone_in_length() {
        let o = OrderBudget::new(16, 8, 2).unwrap();
        let ws = enumerate_words(2, 4);
        for pair in ws.windows(2) {
            assert!(o.of(&pair[0]) <= o.of(&pair[1]));
        }
        assert_eq!(o.max_len_below(128), Some(0));
        assert_eq!(o.max_len_below(129), Some(1));
        assert_eq!(o.max_len_below(16), None);
    }

    #[test]
    fn fox_examples() {
        let f = field(5);
        let g = GroupTable::symmetric3();
        let images = vec![1u32, 3u32];
        let w = Word::reduce(2, &[1, 2]).unwrap();
        assert_eq!(fox_eval(f, &g, &images, &w, 1), FormalSum::single(f, 1, 0));
        let w = Word::reduce(2, &[-1]).unwrap();
        assert_eq!(fox_eval(f, &g, &images, &w, 1), FormalSum::single(f, -1, g.inv(&1)));
        let w = Word::reduce(2, &[1, 2, -1]).unwrap();
        let expected = FormalSum::single(f, 1, 0).add(f, &FormalSum::single(f, -1, w.eval(&g, &images)));
        assert_eq!(fox_eval(f, &g, &images, &w, 1), expected);
    }

    fn fundamental_identity_holds(f: PrimeField, g: &GroupTable, images: &[u32], w: &Word) -> bool {
        let mut lhs = FormalSum::zero();
        for i in 1..=images.len() {
            let t_minus_1 = FormalSum::single(f, 1, images[i - 1]).add(f, &FormalSum::single(f, -1, 0));
            lhs = lhs.add(f, &fox_eval(f, g, images, w, i).mul(f, g, &t_minus_1));
        }
        let rhs = FormalSum::single(f, 1, w.eval(g, images)).add(f, &FormalSum::single(f, -1, 0));
        lhs == rhs
    }

    proptest! {
        #[test]
        fn fundamental_identity(letters in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2]), 0..12),
                                a in 0u32..6, b in 0u32..6, p in prop::sample::select(vec![5u32, 7])) {
            let g = GroupTable::symmetric3();
            let w = Word::reduce(2, &letters).unwrap();
            prop_assert!(fundamental_identity_holds(field(p), &g, &[a, b], &w));
        }

        #[test]
        fn product_rule(u in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2]), 0..8),
                        v in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2]), 0..8),
                        a in 0u32..6, b in 0u32..6, i in 1usize..=2) {
            let f = field(7);
            let g = GroupTable::symmetric3();
            let images = [a, b];
            let u = Word::reduce(2, &u).unwrap();
            let v = Word::reduce(2, &v).unwrap();
            let lhs = fox_eval(f, &g, &images, &u.mul(&v), i);
            let rhs = fox_eval(f, &g, &images, &u, i)
                .add(f, &fox_eval(f, &g, &images, &v, i).left_mul(f, &g, &u.eval(&g, &images)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
