//! The preprojective algebra of a Dynkin quiver as an explicit graded algebra.
//!
//! Paths compose left to right: `xy` is "traverse `x`, then `y`", so `xy` is
//! nonzero only when `x` ends where `y` starts. The relation at vertex `i` is
//!
//! ```text
//! ρ_i = Σ_{a ∈ Q, s(a)=i} a a*  -  Σ_{a ∈ Q, t(a)=i} a* a
//! ```
//!
//! and `A(d)` is built as `(A(d-1) ⊗_R V) / A(d-2)·ρ`, keeping the
//! lexicographically smallest surviving words as the basis.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fmt_rational, inverse, rat, rref, solve, Rational, SparseMatrix, SparseVec};
use crate::quiver::{coxeter, CoxeterData, DoubleQuiver};

/// A basis monomial: a path written as a word in the arrows of the double quiver.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(vertex: usize) -> Self {
        Self { source: vertex, target: vertex, arrows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// Element of `A` in basis coordinates.
pub type Element = SparseVec;

#[derive(Clone, Debug)]
pub struct PreprojectiveAlgebra {
    pub quiver: DoubleQuiver,
    pub coxeter: CoxeterData,
    basis: Vec<Path>,
    /// `degree_start[d]..degree_start[d+1]` indexes the basis of `A(d)`.
    degree_start: Vec<usize>,
    index: HashMap<(usize, Vec<usize>), usize>,
    /// Normal form of `basis[b] · arrow`, indexed `[b][arrow]`.
    ext: Vec<Vec<Element>>,
    mult: Vec<Vec<Element>>,
}

impl PreprojectiveAlgebra {
    pub fn build(quiver: &DoubleQuiver) -> Result<Self> {
        quiver.ty.ensure_supported()?;
        let cox = coxeter(quiver.ty);
        let r = quiver.vertex_count();
        let n_arrows = quiver.arrows.len();

        let mut basis: Vec<Path> = (0..r).map(Path::trivial).collect();
        let mut degree_start = vec![0, r];
        for (a, arrow) in quiver.arrows.iter().enumerate() {
            basis.push(Path { source: arrow.source, target: arrow.target, arrows: vec![a] });
        }
        degree_start.push(basis.len());
        let mut ext: Vec<Vec<Element>> = Vec::new();
        // degree 0 times an arrow is the arrow itself
        for (i, _) in (0..r).enumerate() {
            ext.push(
                (0..n_arrows)
                    .map(|a| if quiver.arrows[a].source == i { SparseVec::unit(r + a) } else { SparseVec::new() })
                    .collect(),
            );
        }

        let mut d = 2;
        loop {
            let prev = degree_start[d - 1]..degree_start[d];
            let prev2 = degree_start[d - 2]..degree_start[d - 1];
            // candidates m·a, m in A(d-1)
            let mut candidates: Vec<(usize, usize)> = Vec::new();
            for m in prev.clone() {
                for (a, arrow) in quiver.arrows.iter().enumerate() {
                    if basis[m].target == arrow.source {
                        candidates.push((m, a));
                    }
                }
            }
            let word = |&(m, a): &(usize, usize)| {
                let mut w = basis[m].arrows.clone();
                w.push(a);
                w
            };
            // columns sorted by descending word so pivots are the largest words
            let mut order: Vec<usize> = (0..candidates.len()).collect();
            order.sort_by(|&x, &y| word(&candidates[y]).cmp(&word(&candidates[x])));
            let mut col_of = HashMap::new();
            for (col, &ci) in order.iter().enumerate() {
                col_of.insert(candidates[ci], col);
            }
            // v·a for v ∈ A(d-1), in candidate coordinates
            let times_arrow = |v: &Element, a: usize| -> Vec<(usize, Rational)> {
                v.iter().map(|(m, c)| (col_of[&(m, a)], c.clone())).collect()
            };
            let mut relations = Vec::new();
            for p in prev2.clone() {
                let j = basis[p].target;
                let mut rel = Vec::new();
                for (a, arrow) in quiver.arrows.iter().enumerate() {
                    if arrow.source != j {
                        continue;
                    }
                    // a a* with a ∈ Q, or -a* a with a* ∈ Q* (a* leaving j)
                    let sign = rat(arrow.epsilon());
                    let pa = &ext[p][a];
                    for (col, c) in times_arrow(pa, arrow.partner) {
                        rel.push((col, c * &sign));
                    }
                }
                let rel = SparseVec::from_pairs(rel);
                if !rel.is_zero() {
                    relations.push(rel);
                }
            }
            let (reduced, pivots) = rref(&SparseMatrix::from_rows(candidates.len(), relations));
            let mut is_pivot = vec![false; candidates.len()];
            for &p in &pivots {
                is_pivot[p] = true;
            }
            // surviving words, ascending
            let mut survivors: Vec<usize> = (0..candidates.len()).filter(|&c| !is_pivot[c]).collect();
            survivors.reverse();
            let start = basis.len();
            let mut new_index_of_col = vec![usize::MAX; candidates.len()];
            let new_paths: Vec<Path> = survivors
                .iter()
                .map(|&col| {
                    let (m, a) = candidates[order[col]];
                    Path { source: basis[m].source, target: quiver.arrows[a].target, arrows: word(&(m, a)) }
                })
                .collect();
            for (k, &col) in survivors.iter().enumerate() {
                new_index_of_col[col] = start + k;
            }
            basis.extend(new_paths);
            degree_start.push(basis.len());
            // ext rows for A(d-1)
            let mut nf_of_col: Vec<Element> = vec![SparseVec::new(); candidates.len()];
            for &col in &survivors {
                nf_of_col[col] = SparseVec::unit(new_index_of_col[col]);
            }
            for (row, &pc) in reduced.row_vecs().iter().zip(&pivots) {
                nf_of_col[pc] = SparseVec::from_pairs(
                    row.iter().filter(|(j, _)| *j != pc).map(|(j, v)| (new_index_of_col[j], -v.clone())),
                );
            }
            for m in prev.clone() {
                let mut row = vec![SparseVec::new(); n_arrows];
                for (a, slot) in row.iter_mut().enumerate() {
                    if let Some(&col) = col_of.get(&(m, a)) {
                        *slot = nf_of_col[col].clone();
                    }
                }
                ext.push(row);
            }
            if survivors.is_empty() {
                break;
            }
            d += 1;
        }
        degree_start.pop();

        let index = basis
            .iter()
            .enumerate()
            .map(|(k, p)| ((p.source, p.arrows.clone()), k))
            .collect();
        let mut alg = Self { quiver: quiver.clone(), coxeter: cox, basis, degree_start, index, ext, mult: Vec::new() };
        alg.mult = (0..alg.dim())
            .map(|x| (0..alg.dim()).map(|y| alg.compute_product(x, y)).collect())
            .collect();
        alg.check_hilbert()?;
        Ok(alg)
    }

    fn compute_product(&self, x: usize, y: usize) -> Element {
        if self.basis[x].target != self.basis[y].source {
            return SparseVec::new();
        }
        let mut v = SparseVec::unit(x);
        for &a in &self.basis[y].arrows {
            v = self.times_arrow(&v, a);
        }
        v
    }

    fn times_arrow(&self, v: &Element, a: usize) -> Element {
        let mut out = SparseVec::new();
        for (m, c) in v.iter() {
            out.axpy(c, &self.ext[m][a]);
        }
        out
    }

    fn check_hilbert(&self) -> Result<()> {
        let hm = hilbert_matrix(&self.quiver);
        let r = self.quiver.vertex_count();
        let top = self.top_degree();
        for d in 0..=top.max(hm.degree()) + 1 {
            for i in 0..r {
                for j in 0..r {
                    let expected = hm.coefficient(d, i, j);
                    let found = self.piece(d, i, j).len();
                    if expected < 0 || expected as usize != found {
                        return Err(Error::HilbertMismatch { degree: d, i, j, expected: expected.max(0) as usize, found });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn h(&self) -> usize {
        self.coxeter.h
    }

    pub fn nu(&self) -> &[usize] {
        &self.coxeter.nu
    }

    pub fn vertex_count(&self) -> usize {
        self.quiver.vertex_count()
    }

    /// Highest degree with a nonzero component.
    pub fn top_degree(&self) -> usize {
        self.degree_start.len() - 2
    }

    pub fn basis(&self) -> &[Path] {
        &self.basis
    }

    pub fn path(&self, b: usize) -> &Path {
        &self.basis[b]
    }

    pub fn degree(&self, b: usize) -> usize {
        self.basis[b].len()
    }

    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        if d + 1 >= self.degree_start.len() {
            return 0..0;
        }
        self.degree_start[d]..self.degree_start[d + 1]
    }

    /// Basis indices of `e_i A(d) e_j`.
    pub fn piece(&self, d: usize, i: usize, j: usize) -> Vec<usize> {
        self.degree_range(d).filter(|&b| self.basis[b].source == i && self.basis[b].target == j).collect()
    }

    pub fn idempotent(&self, i: usize) -> usize {
        i
    }

    pub fn index_of(&self, p: &Path) -> Option<usize> {
        self.index.get(&(p.source, p.arrows.clone())).copied()
    }

    pub fn name(&self, b: usize) -> String {
        let p = &self.basis[b];
        if p.is_empty() {
            format!("e{}", p.source + 1)
        } else {
            p.arrows.iter().map(|&a| self.quiver.arrow_name(a)).collect::<Vec<_>>().join("")
        }
    }

    pub fn product(&self, x: usize, y: usize) -> &Element {
        &self.mult[x][y]
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let mut out = SparseVec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let p = &self.mult[i][j];
                if !p.is_zero() {
                    out.axpy(&(a * b), p);
                }
            }
        }
        out
    }

    pub fn one(&self) -> Element {
        SparseVec::from_pairs((0..self.vertex_count()).map(|i| (i, Rational::one())))
    }

    /// Normal form of an arbitrary word starting at `source`.
    pub fn word(&self, source: usize, arrows: &[usize]) -> Element {
        let mut v = SparseVec::unit(source);
        for &a in arrows {
            if self.quiver.arrows[a].source != self.basis_target_of(&v) {
                return SparseVec::new();
            }
            v = self.times_arrow(&v, a);
            if v.is_zero() {
                break;
            }
        }
        v
    }

    fn basis_target_of(&self, v: &Element) -> usize {
        v.iter().next().map_or(usize::MAX, |(b, _)| self.basis[b].target)
    }

    /// The anti-involution reversing every path and starring every arrow.
    pub fn star(&self, x: &Element) -> Element {
        let mut out = SparseVec::new();
        for (b, c) in x.iter() {
            let p = &self.basis[b];
            let rev: Vec<usize> = p.arrows.iter().rev().map(|&a| self.quiver.arrows[a].partner).collect();
            out.axpy(c, &self.word(p.target, &rev));
        }
        out
    }

    /// Right multiplication by basis element `y`, as a matrix on coordinates.
    pub fn right_mult_matrix(&self, y: &Element) -> SparseMatrix {
        let cols: Vec<SparseVec> = (0..self.dim()).map(|x| self.mul(&SparseVec::unit(x), y)).collect();
        SparseMatrix::from_columns(self.dim(), &cols)
    }

    pub fn frobenius(&self) -> Result<FrobeniusStructure> {
        FrobeniusStructure::new(self)
    }

    pub fn to_document(&self, frob: &FrobeniusStructure) -> AlgebraDocument {
        let r = self.vertex_count();
        let mut dims = Vec::new();
        for d in 0..=self.top_degree() {
            for i in 0..r {
                for j in 0..r {
                    let n = self.piece(d, i, j).len();
                    if n > 0 {
                        dims.push(DimEntry { d, i: i + 1, j: j + 1, dim: n });
                    }
                }
            }
        }
        let mut mult = Vec::new();
        for x in 0..self.dim() {
            for y in 0..self.dim() {
                let p = &self.mult[x][y];
                if !p.is_zero() {
                    mult.push(MultEntry { left: x, right: y, coeffs: coeff_list(p) });
                }
            }
        }
        AlgebraDocument {
            version: ALGEBRA_DOC_VERSION,
            ty: self.quiver.ty.to_string(),
            h: self.h(),
            basis: (0..self.dim())
                .map(|b| BasisEntry { index: b, name: self.name(b), degree: self.degree(b), source: self.basis[b].source + 1, target: self.basis[b].target + 1 })
                .collect(),
            dims,
            mult,
            frobenius: FrobeniusEntry {
                f: coeff_list(&frob.f),
                eta: (0..self.dim()).map(|x| coeff_list(&frob.eta_of_basis(x))).collect(),
            },
        }
    }
}

fn coeff_list(v: &SparseVec) -> Vec<(usize, String)> {
    v.iter().map(|(i, c)| (i, fmt_rational(c))).collect()
}

pub const ALGEBRA_DOC_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimEntry {
    pub d: usize,
    pub i: usize,
    pub j: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub index: usize,
    pub name: String,
    pub degree: usize,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultEntry {
    pub left: usize,
    pub right: usize,
    pub coeffs: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusEntry {
    pub f: Vec<(usize, String)>,
    pub eta: Vec<Vec<(usize, String)>>,
}

/// Versioned JSON form of an algebra, for golden files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub version: u32,
    #[serde(rename = "type")]
    pub ty: String,
    pub h: usize,
    pub basis: Vec<BasisEntry>,
    pub dims: Vec<DimEntry>,
    pub mult: Vec<MultEntry>,
    pub frobenius: FrobeniusEntry,
}

/// Matrix-valued polynomial `H_A(t)`, coefficients indexed `[d][i][j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertMatrix {
    pub coeffs: Vec<Vec<Vec<i64>>>,
}

impl HilbertMatrix {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coefficient(&self, d: usize, i: usize, j: usize) -> i64 {
        self.coeffs.get(d).map_or(0, |m| m[i][j])
    }

    /// Entry `(i, j)` as a coefficient list in `t`.
    pub fn entry(&self, i: usize, j: usize) -> Vec<i64> {
        self.coeffs.iter().map(|m| m[i][j]).collect()
    }

    /// Sum of all entries at `t = 1`.
    pub fn total(&self) -> i64 {
        self.coeffs.iter().flat_map(|m| m.iter().flatten()).sum()
    }
}

/// `(1 + P t^h)(1 - C t + t^2)^{-1}`, expanded as a power series and
/// certified to vanish from degree `h-1` through `2h`.
///
/// Beyond degree `h` both summands obey `X_n = C X_{n-1} - X_{n-2}` (`P`
/// commutes with `C`), so two consecutive zero coefficients at `h-1`, `h`
/// force every later coefficient to vanish.
pub fn hilbert_matrix(q: &DoubleQuiver) -> HilbertMatrix {
    let cox = coxeter(q.ty);
    let h = cox.h;
    let r = q.vertex_count();
    let c = &cox.adjacency;
    let p = &cox.p;
    let matmul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        (0..r).map(|i| (0..r).map(|j| (0..r).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    let id: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    let zero = vec![vec![0i64; r]; r];
    let bound = 2 * h;
    let mut s: Vec<Vec<Vec<i64>>> = vec![id.clone(), c.clone()];
    for n in 2..=bound {
        let cs = matmul(c, &s[n - 1]);
        s.push((0..r).map(|i| (0..r).map(|j| cs[i][j] - s[n - 2][i][j]).collect()).collect());
    }
    let coeffs: Vec<Vec<Vec<i64>>> = (0..=bound)
        .map(|n| {
            if n >= h {
                let ps = matmul(p, &s[n - h]);
                (0..r).map(|i| (0..r).map(|j| s[n][i][j] + ps[i][j]).collect()).collect()
            } else {
                s[n].clone()
            }
        })
        .collect();
    for (n, m) in coeffs.iter().enumerate().skip(h - 1) {
        assert_eq!(m, &zero, "Hilbert series has a nonzero coefficient in degree {n} >= h-1");
    }
    HilbertMatrix { coeffs: coeffs[..h - 1].to_vec() }
}

/// Frobenius form `(x, y) = f(xy)` and its Nakayama automorphism.
#[derive(Clone, Debug)]
pub struct FrobeniusStructure {
    /// `f` as a coefficient vector: `f(b)` for each basis element `b`.
    pub f: SparseVec,
    pub gram: SparseMatrix,
    /// Matrix of `η` on coordinates: column `x` is `η(basis[x])`.
    pub eta: SparseMatrix,
}

impl FrobeniusStructure {
    /// `f` is 1 on the basis word of each `e_i A(h-2) e_ν(i)` and 0 elsewhere.
    pub fn new(alg: &PreprojectiveAlgebra) -> Result<Self> {
        let top = alg.top_degree();
        let f = SparseVec::from_pairs(alg.degree_range(top).map(|b| (b, Rational::one())));
        Self::with_functional(alg, f)
    }

    pub fn with_functional(alg: &PreprojectiveAlgebra, f: SparseVec) -> Result<Self> {
        let n = alg.dim();
        let gram = SparseMatrix::from_triplets(
            n,
            n,
            (0..n).flat_map(|x| {
                let f = &f;
                (0..n).filter_map(move |y| {
                    let v = f.dot(alg.product(x, y));
                    (!v.is_zero()).then_some((x, y, v))
                })
            }),
        );
        let inv = inverse(&gram).ok_or(Error::DegenerateForm)?;
        // f(xy) = f(y η(x))  ⇔  G^T e_x = G η(x)
        let eta = inv.mul(&gram.transpose());
        Ok(Self { f, gram, eta })
    }

    pub fn form(&self, x: &Element, y: &Element) -> Rational {
        self.gram.mul_vec(y).dot(x)
    }

    pub fn eta_of_basis(&self, x: usize) -> Element {
        SparseVec::from_pairs((0..self.eta.rows()).map(|z| (z, self.eta.get(z, x))).filter(|(_, v)| !v.is_zero()))
    }

    pub fn eta(&self, x: &Element) -> Element {
        self.eta.mul_vec(x)
    }

    /// An invertible `u` with `other(x) = f(xu)` for all `x`, if one exists.
    pub fn unit_relating(&self, alg: &PreprojectiveAlgebra, other: &SparseVec) -> Option<Element> {
        // Σ_z u_z f(x z) = other(x)  ⇔  G u = other
        let u = solve(&self.gram, other)?;
        let m = alg.right_mult_matrix(&u);
        (m.rank() == alg.dim()).then_some(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::QuiverType;

    fn alg(ty: QuiverType) -> PreprojectiveAlgebra {
        PreprojectiveAlgebra::build(&DoubleQuiver::canonical(ty)).unwrap()
    }

    #[test]
    fn a2_basis_and_products() {
        let a = alg(QuiverType::a(2));
        assert_eq!(a.dim(), 4);
        let names: Vec<_> = (0..4).map(|b| a.name(b)).collect();
        assert_eq!(names, vec!["e1", "e2", "a1", "a1*"]);
        assert!(a.product(2, 3).is_zero());
        assert!(a.product(3, 2).is_zero());
        assert_eq!(a.top_degree(), 1);
        assert_eq!(a.product(0, 2), &SparseVec::unit(2));
    }

    #[test]
    fn a2_hilbert() {
        let hm = hilbert_matrix(&DoubleQuiver::canonical(QuiverType::a(2)));
        assert_eq!(hm.entry(0, 0), vec![1, 0]);
        assert_eq!(hm.entry(0, 1), vec![0, 1]);
        assert_eq!(hm.entry(1, 0), vec![0, 1]);
        assert_eq!(hm.entry(1, 1), vec![1, 0]);
    }

    #[test]
    fn a3_hilbert() {
        let hm = hilbert_matrix(&DoubleQuiver::canonical(QuiverType::a(3)));
        // only the ν-fixed middle vertex carries t^2 on the diagonal
        assert_eq!(hm.entry(1, 1), vec![1, 0, 1]);
        assert_eq!(hm.entry(0, 0), vec![1, 0, 0]);
        assert_eq!(hm.entry(0, 2), vec![0, 0, 1]);
        assert_eq!(hm.total(), 10);
    }

    #[test]
    fn degree_zero_is_r() {
        for ty in [QuiverType::a(3), QuiverType::d(4), QuiverType::d(5)] {
            let a = alg(ty);
            assert_eq!(a.degree_range(0).len(), ty.rank);
            let hm = hilbert_matrix(&a.quiver);
            for i in 0..ty.rank {
                for j in 0..ty.rank {
                    assert_eq!(hm.coefficient(0, i, j), i64::from(i == j));
                }
            }
        }
    }

    #[test]
    fn star_basics() {
        let a = alg(QuiverType::a(2));
        assert_eq!(a.star(&SparseVec::unit(0)), SparseVec::unit(0));
        assert_eq!(a.star(&SparseVec::unit(2)), SparseVec::unit(3));
        let aastar = a.mul(&SparseVec::unit(2), &SparseVec::unit(3));
        assert!(aastar.is_zero());
        assert_eq!(a.star(&aastar), aastar);
    }

    #[test]
    fn a2_frobenius() {
        let a = alg(QuiverType::a(2));
        let fr = a.frobenius().unwrap();
        assert_eq!(fr.f, SparseVec::from_pairs([(2, rat(1)), (3, rat(1))]));
        assert_eq!(fr.gram.rank(), 4);
        assert_eq!(fr.eta_of_basis(0), SparseVec::unit(1));
    }

    #[test]
    fn d4_nakayama_fixes_idempotents() {
        let a = alg(QuiverType::d(4));
        let fr = a.frobenius().unwrap();
        for i in 0..4 {
            assert_eq!(fr.eta_of_basis(i), SparseVec::unit(i));
        }
    }

    #[test]
    fn a2_second_functional_differs_by_unit() {
        let a = alg(QuiverType::a(2));
        let fr = a.frobenius().unwrap();
        let other = SparseVec::from_pairs([(2, rat(2)), (3, rat(1))]);
        let u = fr.unit_relating(&a, &other).expect("unit exists");
        for x in 0..a.dim() {
            let lhs = other.get(x);
            let rhs = fr.f.dot(&a.mul(&SparseVec::unit(x), &u));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn document_round_trips() {
        let a = alg(QuiverType::a(3));
        let doc = a.to_document(&a.frobenius().unwrap());
        let text = serde_json::to_string(&doc).unwrap();
        let back: AlgebraDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(doc.basis.len(), 10);
    }
}
