//! Exact linear algebra over the rationals.
//!
//! Everything in this crate that decides a rank, a kernel or a homology class
//! goes through [`rref`], so the elimination here is the single place where
//! exactness matters. Blocks below [`DENSE_CUTOFF`] in both dimensions are
//! eliminated densely; larger ones use a sparse forward pass where rows are
//! bucketed by their leading column, followed by back substitution.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number; always kept in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Matrices smaller than this in both dimensions are reduced densely.
pub const DENSE_CUTOFF: usize = 64;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `n` or `n/d`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Rational::one())] }
    }

    /// Builds from unsorted `(index, value)` pairs, summing duplicates.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in pairs {
            *map.entry(i).or_insert_with(Rational::zero) += v;
        }
        Self { entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(v: &[Rational]) -> Self {
        Self {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> Rational {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    fn get_ref(&self, i: usize) -> Option<&Rational> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }

    pub fn scale(&mut self, c: &Rational) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for (_, v) in &mut self.entries {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Rational, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, _)), Some((ib, _))) => {
                    if ia < ib {
                        out.push(a.next().unwrap());
                    } else if ib < ia {
                        let (ib, vb) = b.next().unwrap();
                        out.push((*ib, c * vb));
                    } else {
                        let (ia, va) = a.next().unwrap();
                        let (_, vb) = b.next().unwrap();
                        let s = va + c * vb;
                        if !s.is_zero() {
                            out.push((ia, s));
                        }
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (ib, vb) = b.next().unwrap();
                    out.push((*ib, c * vb));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&-Rational::one(), other);
        out
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, va) = &self.entries[i];
            let (b, vb) = &other.entries[j];
            if a < b {
                i += 1;
            } else if b < a {
                j += 1;
            } else {
                acc += va * vb;
                i += 1;
                j += 1;
            }
        }
        acc
    }

    /// Re-indexes entries through `f`; entries mapped to `None` are dropped.
    pub fn reindex(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().filter_map(|(i, v)| f(*i).map(|j| (j, v.clone()))))
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (i, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", i, fmt_rational(v))?;
        }
        write!(f, "]")
    }
}

/// Row-major sparse matrix over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, data: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.entries.last().is_none_or(|(i, _)| *i < cols)));
        Self { rows: rows.len(), cols, data: rows }
    }

    /// Builds a `rows x cols` matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut triplets = Vec::new();
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c.iter() {
                triplets.push((i, j, v.clone()));
            }
        }
        Self::from_triplets(rows, columns.len(), triplets)
    }

    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, Rational)>>(
        rows: usize,
        cols: usize,
        triplets: I,
    ) -> Self {
        let mut buckets: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "triplet ({i},{j}) out of bounds {rows}x{cols}");
            buckets[i].push((j, v));
        }
        Self { rows, cols, data: buckets.into_iter().map(SparseVec::from_pairs).collect() }
    }

    pub fn from_dense(m: &[Vec<Rational>]) -> Self {
        let cols = m.first().map_or(0, |r| r.len());
        Self { rows: m.len(), cols, data: m.iter().map(|r| SparseVec::from_dense(r)).collect() }
    }

    pub fn from_i64(m: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        Self::from_dense(&dense)
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.data.iter().map(|r| r.to_dense(self.cols)).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i].get(j)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.nnz()).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r.iter() {
                triplets.push((j, i, v.clone()));
            }
        }
        Self::from_triplets(self.cols, self.rows, triplets)
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(
            self.data
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.dot(v)))
                .filter(|(_, x)| !x.is_zero()),
        )
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = SparseVec::new();
                for (k, v) in r.iter() {
                    acc.axpy(v, &other.data[k]);
                }
                acc
            })
            .collect();
        Self { rows: self.rows, cols: other.cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }
}

/// Reduced row echelon form and pivot columns.
///
/// The returned matrix has `rank` rows, one per pivot, each with a leading 1
/// in its pivot column and zeros in every other pivot column. The reduced
/// form of a matrix is unique, so the pivot order chosen during elimination
/// affects only running time, never the output.
pub fn rref(m: &SparseMatrix) -> (SparseMatrix, Vec<usize>) {
    if m.rows < DENSE_CUTOFF && m.cols < DENSE_CUTOFF {
        rref_dense(m)
    } else {
        rref_sparse(m)
    }
}

fn rref_dense(m: &SparseMatrix) -> (SparseMatrix, Vec<usize>) {
    let mut a = m.to_dense();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        // fewest nonzeros among candidate rows, lowest index on ties
        let candidate = (r..m.rows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| (a[i][c..].iter().filter(|x| !x.is_zero()).count(), i));
        let Some(p) = candidate else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r][c..].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..m.cols {
                    if !a[r][j].is_zero() {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    let rows = a.iter().map(|row| SparseVec::from_dense(row)).collect();
    (SparseMatrix::from_rows(m.cols, rows), pivots)
}

fn rref_sparse(m: &SparseMatrix) -> (SparseMatrix, Vec<usize>) {
    // forward pass: rows bucketed by leading column
    let mut buckets: Vec<Vec<SparseVec>> = vec![Vec::new(); m.cols];
    for r in &m.data {
        if let Some(l) = r.leading() {
            buckets[l].push(r.clone());
        }
    }
    let mut echelon: Vec<(usize, SparseVec)> = Vec::new();
    for c in 0..m.cols {
        let mut bucket = std::mem::take(&mut buckets[c]);
        if bucket.is_empty() {
            continue;
        }
        let p = (0..bucket.len()).min_by_key(|&i| (bucket[i].nnz(), i)).unwrap();
        let mut pivot = bucket.swap_remove(p);
        let inv = pivot.entries[0].1.recip();
        pivot.scale(&inv);
        for mut row in bucket {
            let f = -row.entries[0].1.clone();
            row.axpy(&f, &pivot);
            if let Some(l) = row.leading() {
                buckets[l].push(row);
            }
        }
        echelon.push((c, pivot));
    }
    // back substitution, last pivot first
    for k in (0..echelon.len()).rev() {
        let (pc, pivot_row) = {
            let (pc, row) = &echelon[k];
            (*pc, row.clone())
        };
        for (_, row) in echelon.iter_mut().take(k) {
            if let Some(f) = row.get_ref(pc) {
                let f = -f.clone();
                row.axpy(&f, &pivot_row);
            }
        }
    }
    let pivots = echelon.iter().map(|(c, _)| *c).collect();
    let rows = echelon.into_iter().map(|(_, r)| r).collect();
    (SparseMatrix::from_rows(m.cols, rows), pivots)
}

/// Basis of the null space, one vector per free column.
///
/// Each returned vector has a 1 at its free column and zeros at every other
/// free column, so the coordinates of a kernel element in this basis are
/// just its entries at the free columns.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let (r, pivots) = rref(m);
    kernel_from_rref(&r, &pivots, m.cols)
}

/// Free (non-pivot) columns in increasing order.
pub fn free_columns(pivots: &[usize], cols: usize) -> Vec<usize> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols).filter(|&c| !is_pivot[c]).collect()
}

pub fn kernel_from_rref(r: &SparseMatrix, pivots: &[usize], cols: usize) -> Vec<SparseVec> {
    let free = free_columns(pivots, cols);
    let mut free_pos = vec![usize::MAX; cols];
    for (k, &c) in free.iter().enumerate() {
        free_pos[c] = k;
    }
    let mut kernel: Vec<Vec<(usize, Rational)>> = free.iter().map(|&c| vec![(c, Rational::one())]).collect();
    for (row, &pc) in r.data.iter().zip(pivots) {
        for (j, v) in row.iter() {
            if j != pc {
                kernel[free_pos[j]].push((pc, -v.clone()));
            }
        }
    }
    kernel.into_iter().map(SparseVec::from_pairs).collect()
}

/// A complement of `span(subspace)` inside `Q^ambient`.
///
/// `representatives` are the unit vectors at the non-pivot columns of the
/// reduced subspace basis; `projection` maps ambient coordinates onto them
/// and has kernel exactly the span of `subspace`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub representatives: Vec<SparseVec>,
    pub projection: SparseMatrix,
    /// Reduced basis of the subspace, one row per pivot.
    pub subspace_rref: SparseMatrix,
    pub subspace_pivots: Vec<usize>,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Quotient coordinates of an ambient vector.
    pub fn project(&self, v: &SparseVec) -> SparseVec {
        self.projection.mul_vec(v)
    }

    /// Whether `v` lies in the subspace.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.project(v).is_zero()
    }
}

pub fn quotient_basis(ambient_dim: usize, subspace: &[SparseVec]) -> Quotient {
    let sub = SparseMatrix::from_rows(ambient_dim, subspace.to_vec());
    let (r, pivots) = rref(&sub);
    let free = free_columns(&pivots, ambient_dim);
    let mut free_pos = vec![usize::MAX; ambient_dim];
    for (k, &c) in free.iter().enumerate() {
        free_pos[c] = k;
    }
    // v ↦ v - Σ_p v_p · row_p, read off at the free columns
    let mut triplets = Vec::new();
    for (k, &c) in free.iter().enumerate() {
        triplets.push((k, c, Rational::one()));
    }
    for (row, &pc) in r.data.iter().zip(&pivots) {
        for (j, v) in row.iter() {
            if j != pc {
                triplets.push((free_pos[j], pc, -v.clone()));
            }
        }
    }
    let projection = SparseMatrix::from_triplets(free.len(), ambient_dim, triplets);
    Quotient {
        representatives: free.iter().map(|&c| SparseVec::unit(c)).collect(),
        projection,
        subspace_rref: r,
        subspace_pivots: pivots,
    }
}

/// Solves `m x = y` exactly; `None` when inconsistent. Free variables are set to zero.
pub fn solve(m: &SparseMatrix, y: &SparseVec) -> Option<SparseVec> {
    // reduce the augmented matrix [m | y]
    let cols = m.cols + 1;
    let rows: Vec<SparseVec> = m
        .data
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            let yi = y.get(i);
            if !yi.is_zero() {
                row.entries.push((m.cols, yi));
            }
            row
        })
        .collect();
    let aug = SparseMatrix::from_rows(cols, rows);
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    Some(SparseVec::from_pairs(
        r.data.iter().zip(&pivots).map(|(row, &pc)| (pc, row.get(m.cols))),
    ))
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse(m: &SparseMatrix) -> Option<SparseMatrix> {
    assert_eq!(m.rows, m.cols, "inverse of a non-square matrix");
    let n = m.rows;
    let rows: Vec<SparseVec> = m
        .data
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.entries.push((n + i, Rational::one()));
            row
        })
        .collect();
    let (r, pivots) = rref(&SparseMatrix::from_rows(2 * n, rows));
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    let inv_rows = r
        .data
        .iter()
        .map(|row| SparseVec::from_pairs(row.iter().filter(|(j, _)| *j >= n).map(|(j, v)| (j - n, v.clone()))))
        .collect();
    Some(SparseMatrix::from_rows(n, inv_rows))
}

pub fn determinant_is_nonzero(m: &SparseMatrix) -> bool {
    m.rows == m.cols && m.rank() == m.rows
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// A finite-dimensional graded vector space with opaque basis labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSpace {
    pieces: BTreeMap<i64, Vec<String>>,
}

impl GradedSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_dims<I: IntoIterator<Item = (i64, usize)>>(dims: I) -> Self {
        let mut s = Self::new();
        for (d, n) in dims {
            for k in 0..n {
                s.push(d, format!("v{d}_{k}"));
            }
        }
        s
    }

    pub fn push(&mut self, degree: i64, label: impl Into<String>) {
        self.pieces.entry(degree).or_default().push(label.into());
    }

    pub fn dim_in(&self, degree: i64) -> usize {
        self.pieces.get(&degree).map_or(0, |v| v.len())
    }

    pub fn total_dim(&self) -> usize {
        self.pieces.values().map(|v| v.len()).sum()
    }

    /// Nonzero `(degree, dim)` pairs in increasing degree.
    pub fn dims(&self) -> Vec<(i64, usize)> {
        self.pieces.iter().filter(|(_, v)| !v.is_empty()).map(|(d, v)| (*d, v.len())).collect()
    }

    pub fn labels(&self, degree: i64) -> &[String] {
        self.pieces.get(&degree).map_or(&[], |v| v.as_slice())
    }

    /// `M[n]`: every element moves from degree `d` to degree `d + n`.
    pub fn shift(&self, n: i64) -> GradedSpace {
        Self { pieces: self.pieces.iter().map(|(d, v)| (d + n, v.clone())).collect() }
    }

    /// Graded dual, `M*(n) = M(-n)*`.
    pub fn dual(&self) -> GradedSpace {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|(d, v)| (-d, v.iter().map(|l| format!("{l}*")).collect()))
                .collect(),
        }
    }

    pub fn direct_sum(&self, other: &GradedSpace) -> GradedSpace {
        let mut out = self.clone();
        for (d, v) in &other.pieces {
            out.pieces.entry(*d).or_default().extend(v.iter().cloned());
        }
        out
    }

    pub fn same_dims(&self, other: &GradedSpace) -> bool {
        self.dims() == other.dims()
    }
}
