//! Dense linear algebra over prime fields.
//!
//! Vectors are plain `Vec<u32>` of residues. Subspaces are kept in reduced
//! row echelon form so that equality of subspaces is equality of bases and
//! coset representatives are canonical.

use crate::error::{Error, Result};

/// The prime field F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p as u64 - 2)
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    pub fn from_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    /// `y += c * x`
    #[inline]
    pub fn axpy(&self, y: &mut [u32], c: u32, x: &[u32]) {
        if c == 0 {
            return;
        }
        let p = self.p as u64;
        let c = c as u64;
        for (yi, &xi) in y.iter_mut().zip(x) {
            if xi != 0 {
                *yi = ((*yi as u64 + c * xi as u64) % p) as u32;
            }
        }
    }

    pub fn scale(&self, x: &mut [u32], c: u32) {
        for xi in x.iter_mut() {
            *xi = self.mul(*xi, c);
        }
    }

    pub fn add_vec(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }
}

/// Row-major dense matrix with residues in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p();
        }
        m
    }

    /// Builds a matrix from rows of integers, reducing each entry mod p.
    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r.iter().map(|&x| field.from_i64(x)));
        }
        Ok(Matrix { field, rows: rows.len(), cols, data })
    }

    pub fn from_residue_rows(field: PrimeField, cols: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r.iter().map(|&x| x % field.p()));
        }
        Ok(Matrix { field, rows: rows.len(), cols, data })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p();
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u32, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    /// Reduced row echelon form with its pivot columns; zero rows are dropped.
    pub fn rref(&self) -> (Matrix, Vec<usize>, usize) {
        let (rows, pivots) = rref_rows(self.field, self.cols, self.row_vecs());
        let rank = pivots.len();
        let m = Matrix {
            field: self.field,
            rows: rank,
            cols: self.cols,
            data: rows.into_iter().flatten().collect(),
        };
        (m, pivots, rank)
    }

    pub fn rank(&self) -> usize {
        self.rref().2
    }

    /// `{v : self * v = 0}`
    pub fn kernel_basis(&self) -> Subspace {
        let (r, pivots, _) = self.rref();
        let f = self.field;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut vecs = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1 % f.p();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(r.get(i, free));
            }
            vecs.push(v);
        }
        Subspace::from_vectors(f, self.cols, vecs).expect("kernel vectors have matching length")
    }
}

/// Gauss-Jordan elimination with deterministic pivoting (first nonzero
/// entry in column order). Returns nonzero rows sorted by pivot.
pub fn rref_rows(f: PrimeField, cols: usize, mut rows: Vec<Vec<u32>>) -> (Vec<Vec<u32>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = f.inv(rows[r][c]);
        f.scale(&mut rows[r], inv);
        let pivot_row = std::mem::take(&mut rows[r]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let coef = f.neg(row[c]);
                f.axpy(row, coef, &pivot_row);
            }
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// A subspace of F_p^n held as an RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: PrimeField,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        Subspace { field, n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: PrimeField, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        Subspace { field, n, rows, pivots: (0..n).collect() }
    }

    pub fn from_vectors(field: PrimeField, n: usize, vecs: Vec<Vec<u32>>) -> Result<Self> {
        for v in &vecs {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        let (rows, pivots) = rref_rows(field, n, vecs);
        Ok(Subspace { field, n, rows, pivots })
    }

    /// Accepts a basis that is claimed to already be in RREF, validating it.
    pub fn from_rref_rows(field: PrimeField, n: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let mut pivots = Vec::with_capacity(rows.len());
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            if r.iter().any(|&x| x >= field.p()) {
                return Err(Error::Invariant("entry out of range".into()));
            }
            let Some(c) = r.iter().position(|&x| x != 0) else {
                return Err(Error::Invariant("zero basis row".into()));
            };
            if r[c] != 1 {
                return Err(Error::Invariant("pivot entry is not 1".into()));
            }
            if pivots.last().is_some_and(|&last| last >= c) {
                return Err(Error::Invariant("pivots not strictly increasing".into()));
            }
            pivots.push(c);
        }
        for (i, &c) in pivots.iter().enumerate() {
            if rows.iter().enumerate().any(|(j, r)| j != i && r[c] != 0) {
                return Err(Error::Invariant("pivot column not cleared".into()));
            }
        }
        Ok(Subspace { field, n, rows, pivots })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn ambient_dim(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_len(&self, v: &[u32]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    /// Clears pivot coordinates in place.
    pub fn reduce_in_place(&self, v: &mut [u32]) {
        let f = self.field;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let coef = v[c];
            if coef != 0 {
                f.axpy(v, f.neg(coef), row);
            }
        }
    }

    /// Canonical representative of the coset `v + self`.
    pub fn reduce_mod(&self, v: &[u32]) -> Result<Vec<u32>> {
        self.check_len(v)?;
        let mut out = v.to_vec();
        self.reduce_in_place(&mut out);
        Ok(out)
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        Ok(self.reduce_mod(v)?.iter().all(|&x| x == 0))
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u32]) -> Result<bool> {
        self.check_len(v)?;
        let mut v = v.to_vec();
        self.reduce_in_place(&mut v);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return Ok(false);
        };
        let f = self.field;
        let inv = f.inv(v[c]);
        f.scale(&mut v, inv);
        for row in self.rows.iter_mut() {
            let coef = row[c];
            if coef != 0 {
                f.axpy(row, f.neg(coef), &v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < c);
        self.rows.insert(at, v);
        self.pivots.insert(at, c);
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let (a, b) = if self.dim() >= other.dim() { (self, other) } else { (other, self) };
        let mut out = a.clone();
        for r in &b.rows {
            out.insert(r)?;
        }
        Ok(out)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        for r in &self.rows {
            if !other.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_as(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.rows == other.rows)
    }

    /// Vectors completing `self` to a basis of `outer`; their classes form a
    /// basis of `outer / self`. Requires `self ⊆ outer`.
    pub fn complement_in(&self, outer: &Subspace) -> Result<Vec<Vec<u32>>> {
        self.check_compatible(outer)?;
        let mut acc = self.clone();
        let mut out = Vec::new();
        for r in &outer.rows {
            let red = acc.reduce_mod(r)?;
            if red.iter().any(|&x| x != 0) {
                acc.insert(&red)?;
                out.push(red);
            }
        }
        Ok(out)
    }

    /// Every vector of the subspace (`p^dim` of them).
    pub fn elements(&self) -> Vec<Vec<u32>> {
        span_elements(self.field, self.n, &self.rows)
    }
}

/// All linear combinations of `gens` (assumed independent for a duplicate-free list).
pub fn span_elements(f: PrimeField, n: usize, gens: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; n]];
    for g in gens {
        let mut next = Vec::with_capacity(out.len() * f.p() as usize);
        for v in &out {
            for c in 0..f.p() {
                let mut w = v.clone();
                f.axpy(&mut w, c, g);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// Independent rank oracle: the largest k such that some k×k minor is
    /// nonzero, via cofactor expansion.
    fn det(fl: PrimeField, m: &[Vec<u32>]) -> u32 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut acc = 0;
        for j in 0..n {
            let minor: Vec<Vec<u32>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let term = fl.mul(m[0][j], det(fl, &minor));
            acc = if j % 2 == 0 { fl.add(acc, term) } else { fl.sub(acc, term) };
        }
        acc
    }

    fn minor_rank(fl: PrimeField, m: &[Vec<u32>], cols: usize) -> usize {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let mut best = 0;
        for k in 1..=m.len().min(cols) {
            for rs in subsets(m.len(), k) {
                for cs in subsets(cols, k) {
                    let sub: Vec<Vec<u32>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                    if det(fl, &sub) != 0 {
                        best = k;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn primality() {
        assert!(PrimeField::new(7).is_ok());
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn rref_examples() {
        let id = Matrix::identity(f(5), 2);
        let (r, piv, rank) = id.rref();
        assert_eq!((r, piv, rank), (id.clone(), vec![0, 1], 2));

        let z = Matrix::zeros(f(7), 3, 3);
        assert_eq!(z.rref().2, 0);

        let m = Matrix::from_rows(f(5), 2, &[vec![1, 2], vec![2, 4]]).unwrap();
        let (r, piv, rank) = m.rref();
        assert_eq!(rank, 1);
        assert_eq!(piv, vec![0]);
        assert_eq!(r.row(0), &[1, 2]);
        assert_eq!(minor_rank(f(5), &m.row_vecs(), 2), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(f(3), 2).kernel_basis().dim(), 0);
        assert_eq!(Matrix::zeros(f(5), 1, 4).kernel_basis().dim(), 4);
        let m = Matrix::from_rows(f(2), 3, &[vec![1, 1, 1]]).unwrap();
        let k = m.kernel_basis();
        // oracle: count all 8 vectors of F_2^3 killed by the map
        let killed = span_elements(f(2), 3, &Subspace::full(f(2), 3).rows)
            .into_iter()
            .filter(|v| m.mul_vec(v).unwrap() == vec![0])
            .count();
        assert_eq!(killed, 4);
        assert_eq!(k.dim(), 2);
        for v in k.elements() {
            assert_eq!(m.mul_vec(&v).unwrap(), vec![0]);
        }
    }

    #[test]
    fn reduce_examples() {
        let s = Subspace::from_vectors(f(5), 2, vec![vec![1, 0]]).unwrap();
        assert_eq!(s.reduce_mod(&[3, 2]).unwrap(), vec![0, 2]);
        assert_eq!(Subspace::zero(f(5), 2).reduce_mod(&[3, 2]).unwrap(), vec![3, 2]);
        assert_eq!(Subspace::full(f(5), 2).reduce_mod(&[3, 2]).unwrap(), vec![0, 0]);
        assert_eq!(s.reduce_mod(&[1]), Err(Error::DimensionMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn sum_examples() {
        let e1 = Subspace::from_vectors(f(3), 2, vec![vec![1, 0]]).unwrap();
        let e2 = Subspace::from_vectors(f(3), 2, vec![vec![0, 1]]).unwrap();
        assert!(e1.sum(&e2).unwrap().same_as(&Subspace::full(f(3), 2)).unwrap());
        assert!(e1.sum(&e1).unwrap().same_as(&e1).unwrap());
        let a = Subspace::from_vectors(f(3), 2, vec![vec![1, 1]]).unwrap();
        let b = Subspace::from_vectors(f(3), 2, vec![vec![1, 2]]).unwrap();
        let s = a.sum(&b).unwrap();
        assert_eq!(s.dim(), 2);
        // oracle: the two lines together with sums cover all 9 vectors
        let mut seen = std::collections::HashSet::new();
        for u in a.elements() {
            for v in b.elements() {
                seen.insert(f(3).add_vec(&u, &v));
            }
        }
        assert_eq!(seen.len(), 9);
        let other = Subspace::zero(f(5), 2);
        assert!(a.sum(&other).is_err());
    }

    #[test]
    fn from_rref_rows_validates() {
        let fl = f(5);
        assert!(Subspace::from_rref_rows(fl, 3, vec![vec![1, 0, 2], vec![0, 1, 3]]).is_ok());
        assert!(Subspace::from_rref_rows(fl, 3, vec![vec![1, 1, 2], vec![0, 1, 3]]).is_err());
        assert!(Subspace::from_rref_rows(fl, 3, vec![vec![2, 0, 2]]).is_err());
        assert!(Subspace::from_rref_rows(fl, 3, vec![vec![0, 0, 0]]).is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = (u32, usize, usize, Vec<u32>)> {
        (prop::sample::select(vec![2u32, 3, 5, 7]), 1usize..6, 1usize..6)
            .prop_flat_map(|(p, r, c)| (Just(p), Just(r), Just(c), prop::collection::vec(0..p, r * c)))
    }

    proptest! {
        #[test]
        fn rank_nullity((p, r, c, data) in matrix_strategy()) {
            let rows: Vec<Vec<u32>> = data.chunks(c).map(|x| x.to_vec()).collect();
            let m = Matrix::from_residue_rows(f(p), c, rows).unwrap();
            prop_assert_eq!(m.rank() + m.kernel_basis().dim(), c);
            prop_assert!(r >= m.rank());
        }

        #[test]
        fn rref_idempotent((p, _r, c, data) in matrix_strategy()) {
            let rows: Vec<Vec<u32>> = data.chunks(c).map(|x| x.to_vec()).collect();
            let m = Matrix::from_residue_rows(f(p), c, rows).unwrap();
            let (once, _, _) = m.rref();
            let (twice, _, _) = once.rref();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn rank_matches_minor_oracle((p, _r, c, data) in matrix_strategy()) {
            let rows: Vec<Vec<u32>> = data.chunks(c).map(|x| x.to_vec()).collect();
            let m = Matrix::from_residue_rows(f(p), c, rows.clone()).unwrap();
            prop_assert_eq!(m.rank(), minor_rank(f(p), &rows, c));
        }

        #[test]
        fn reduce_is_coset_invariant(
            p in prop::sample::select(vec![2u32, 3, 5]),
            gens in prop::collection::vec(prop::collection::vec(0u32..5, 4), 0..3),
            v in prop::collection::vec(0u32..5, 4),
            coefs in prop::collection::vec(0u32..5, 3),
        ) {
            let fl = f(p);
            let gens: Vec<Vec<u32>> = gens.into_iter().map(|g| g.into_iter().map(|x| x % p).collect()).collect();
            let v: Vec<u32> = v.into_iter().map(|x| x % p).collect();
            let s = Subspace::from_vectors(fl, 4, gens.clone()).unwrap();
            let mut u = vec![0; 4];
            for (g, &c) in gens.iter().zip(&coefs) {
                fl.axpy(&mut u, c % p, g);
            }
            let shifted = fl.add_vec(&v, &u);
            let red = s.reduce_mod(&v).unwrap();
            prop_assert_eq!(&red, &s.reduce_mod(&shifted).unwrap());
            for &c in s.pivots() {
                prop_assert_eq!(red[c], 0);
            }
        }

        #[test]
        fn sum_laws(
            vs in prop::collection::vec(prop::collection::vec(0u32..3, 4), 6),
        ) {
            let fl = f(3);
            let a = Subspace::from_vectors(fl, 4, vs[0..2].to_vec()).unwrap();
            let b = Subspace::from_vectors(fl, 4, vs[2..4].to_vec()).unwrap();
            let c = Subspace::from_vectors(fl, 4, vs[4..6].to_vec()).unwrap();
            let l = a.sum(&b).unwrap().sum(&c).unwrap();
            let r = a.sum(&b.sum(&c).unwrap()).unwrap();
            prop_assert_eq!(&l, &r);
            prop_assert_eq!(a.sum(&b).unwrap(), b.sum(&a).unwrap());
            prop_assert_eq!(a.sum(&a).unwrap(), a.clone());
        }
    }
}
