//! Normalized bar complexes of `A` relative to `R = ⊕ k e_i`.
//!
//! Chains: `C_n = A ⊗_{R^e} Ā^{⊗_R n}`, spanned by cyclic words
//! `(a0; a1, …, an)` of basis monomials with `a1..an` of positive degree.
//! Cochains: `C^n = Hom_{R^e}(Ā^{⊗_R n}, A)`, spanned by pairs
//! `(a1 ⊗ … ⊗ an ↦ x)` with matching endpoints. Both are graded by internal
//! degree (path length for chains, output minus input length for cochains),
//! and every operator is stored or evaluated block by block in that grading.
//!
//! Sign conventions are collected in [`signs`].

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, PreprojectiveAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{kernel_from_rref, quotient_basis, rref, solve, Quotient, Rational, SparseMatrix, SparseVec};

/// The sign table for every chain-level formula in this module.
///
/// ```text
/// b(a0;a1..an)  = (a0a1;a2..an) + Σ_{i=1}^{n-1} (-1)^i (a0;..,a_i a_{i+1},..) + (-1)^n (an a0;a1..a_{n-1})
/// B(a0;a1..an)  = Σ_{i=0}^{n} (-1)^{ni} (1;a_i..an,a0..a_{i-1})
/// δf(a1..a_{n+1}) = a1 f(a2..) + Σ_{i=1}^{n} (-1)^i f(..,a_i a_{i+1},..) + (-1)^{n+1} f(a1..an) a_{n+1}
/// (f∪g)(a1..a_{p+q}) = f(a1..ap) g(a_{p+1}..a_{p+q})
/// (f∘g)(a1..a_{p+q-1}) = Σ_{i=0}^{p-1} (-1)^{i(q-1)} f(a1..a_i, g(a_{i+1}..a_{i+q}), ..)
/// [f,g] = f∘g - (-1)^{(p-1)(q-1)} g∘f
/// ι_f(a0;a1..an) = (-1)^{contraction(p,n)} (a0 f(a1..ap); a_{p+1}..an)
/// L_f(a0;..an) = Σ_{i=0}^{n-p} (-1)^{lie_inner(p,i)} (a0;..a_i, f(a_{i+1}..a_{i+p}), ..)
///              + Σ_{j=n-p+1}^{n} (-1)^{lie_wrap(p,n,j)} (f(a_{j+1}..an,a0,..); .., a_j)
/// ```
pub mod signs {
    /// Parity of the sign in front of the contraction `ι_f` on `C_n`.
    pub fn contraction(p: usize, n: usize) -> usize {
        p * n
    }

    /// Parity for the Lie derivative term inserting `f` after position `i`.
    pub fn lie_inner(p: usize, i: usize) -> usize {
        (p + 1) * i
    }

    /// Parity for the Lie derivative term whose window wraps through `a0`.
    pub fn lie_wrap(p: usize, n: usize, j: usize) -> usize {
        n * (j + 1) + p + 1
    }
}

fn parity_sign(parity: usize) -> Rational {
    if parity.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Homology,
    Cohomology,
}

/// Composable words in `Ā` of a fixed length `n`.
#[derive(Clone, Debug, Default)]
struct TensorSpace {
    items: Vec<Vec<u32>>,
    start: Vec<usize>,
    end: Vec<usize>,
    degree: Vec<usize>,
    index: HashMap<(usize, Vec<u32>), usize>,
}

impl TensorSpace {
    fn push(&mut self, start: usize, end: usize, degree: usize, items: Vec<u32>) {
        self.index.insert((start, items.clone()), self.items.len());
        self.items.push(items);
        self.start.push(start);
        self.end.push(end);
        self.degree.push(degree);
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn lookup(&self, start: usize, items: &[u32]) -> Option<usize> {
        self.index.get(&(start, items.to_vec())).copied()
    }
}

/// Basis of `C_n` or `C^n`, sorted by internal degree.
#[derive(Clone, Debug, Default)]
struct CellSpace {
    /// `(a0, tensor)` for chains, `(tensor, output)` for cochains.
    cells: Vec<(u32, u32)>,
    degree: Vec<i64>,
    index: HashMap<(u32, u32), usize>,
    blocks: BTreeMap<i64, Range<usize>>,
}

impl CellSpace {
    fn from_cells(mut cells: Vec<((u32, u32), i64)>) -> Self {
        cells.sort_by_key(|&(c, d)| (d, c));
        let mut space = CellSpace::default();
        for (k, (c, d)) in cells.into_iter().enumerate() {
            space.index.insert(c, k);
            space.cells.push(c);
            space.degree.push(d);
            space.blocks.entry(d).or_insert(k..k).end = k + 1;
        }
        space
    }

    fn len(&self) -> usize {
        self.cells.len()
    }

    fn block(&self, d: i64) -> Range<usize> {
        self.blocks.get(&d).cloned().unwrap_or(0..0)
    }
}

/// A block-diagonal operator between two cell spaces, keyed by internal degree.
#[derive(Clone, Debug, Default)]
struct BlockOperator {
    blocks: BTreeMap<i64, SparseMatrix>,
}

/// Homology of one bidegree block.
#[derive(Clone, Debug)]
pub struct HomologyBlock {
    pub kind: Kind,
    pub n: usize,
    pub d: i64,
    /// Free columns of the reduced outgoing differential; a cycle's
    /// coordinates in the cycle basis are its entries at these columns.
    free: Vec<usize>,
    cycle_basis: Vec<SparseVec>,
    quotient: Quotient,
    /// Representatives in block-local coordinates.
    reps: Vec<SparseVec>,
}

impl HomologyBlock {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn cycle_dim(&self) -> usize {
        self.cycle_basis.len()
    }

    fn coords(&self, local: &SparseVec) -> SparseVec {
        let mut pos = HashMap::new();
        for (k, &c) in self.free.iter().enumerate() {
            pos.insert(c, k);
        }
        let z = local.reindex(|i| pos.get(&i).copied());
        self.quotient.project(&z)
    }
}

/// A basis class of `HH_n` or `HH^n` in one internal degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HHClass {
    pub kind: Kind,
    pub n: usize,
    pub d: i64,
    /// Position inside the `(n, d)` block.
    pub index: usize,
    /// Cycle or cocycle representative, in global coordinates of `C_n` / `C^n`.
    pub representative: SparseVec,
}

/// Row of a bidegree dimension table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DimRow {
    pub kind: Kind,
    pub n: usize,
    pub d: i64,
    pub dim: usize,
}

/// Outcome of one complex identity on one `(n, d)` block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub n: usize,
    pub d: i64,
    pub holds: bool,
}

/// Homogeneous element of the chain or cochain complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub kind: Kind,
    pub n: usize,
    pub vec: SparseVec,
}

type CochainMap = HashMap<u32, Element>;

/// Truncated chain and cochain complexes of `A`, with homology.
pub struct ChainComplexPair {
    alg: Arc<PreprojectiveAlgebra>,
    max_degree: usize,
    tensors: Vec<TensorSpace>,
    chains: Vec<CellSpace>,
    cochains: Vec<CellSpace>,
    /// `b[n]: C_n -> C_{n-1}` for `1 <= n <= N`.
    b: Vec<BlockOperator>,
    /// `delta[n]: C^n -> C^{n+1}` for `0 <= n < N`.
    delta: Vec<BlockOperator>,
    /// `connes[n]: C_n -> C_{n+1}` for `0 <= n < N`.
    connes: Vec<BlockOperator>,
    homology: BTreeMap<(usize, i64), HomologyBlock>,
    cohomology: BTreeMap<(usize, i64), HomologyBlock>,
}

impl ChainComplexPair {
    /// Builds `C_0..C_N`, `C^0..C^N`, all differentials, and (co)homology in
    /// degrees below `N`; the identities `b² = 0`, `δ² = 0`, `B² = 0` and
    /// `bB + Bb = 0` are checked exactly on every block.
    pub fn build(alg: Arc<PreprojectiveAlgebra>, max_degree: usize) -> Result<Self> {
        if max_degree < 2 {
            return Err(Error::TruncationTooShallow { requested: 2, max_degree });
        }
        let tensors = build_tensors(&alg, max_degree);
        let chains: Vec<CellSpace> = (0..=max_degree).map(|n| chain_cells(&alg, &tensors[n])).collect();
        let cochains: Vec<CellSpace> = (0..=max_degree).map(|n| cochain_cells(&alg, &tensors[n])).collect();
        let mut pair = Self {
            alg,
            max_degree,
            tensors,
            chains,
            cochains,
            b: Vec::new(),
            delta: Vec::new(),
            connes: Vec::new(),
            homology: BTreeMap::new(),
            cohomology: BTreeMap::new(),
        };
        pair.b = (0..=max_degree)
            .into_par_iter()
            .map(|n| if n == 0 { BlockOperator::default() } else { pair.assemble_chain_operator(n, n - 1, |p, c| p.boundary_cell(n, c)) })
            .collect();
        pair.connes = (0..max_degree)
            .into_par_iter()
            .map(|n| pair.assemble_chain_operator(n, n + 1, |p, c| p.connes_cell(n, c)))
            .collect();
        pair.delta = (0..max_degree).into_par_iter().map(|n| pair.assemble_coboundary(n)).collect();
        pair.check_identities();
        let homology: Vec<((usize, i64), HomologyBlock)> = (0..max_degree)
            .flat_map(|n| pair.chains[n].blocks.keys().map(move |&d| (n, d)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(n, d)| ((n, d), pair.homology_block(Kind::Homology, n, d)))
            .collect();
        let cohomology: Vec<((usize, i64), HomologyBlock)> = (0..max_degree)
            .flat_map(|n| pair.cochains[n].blocks.keys().map(move |&d| (n, d)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(n, d)| ((n, d), pair.homology_block(Kind::Cohomology, n, d)))
            .collect();
        pair.homology = homology.into_iter().collect();
        pair.cohomology = cohomology.into_iter().collect();
        Ok(pair)
    }

    pub fn algebra(&self) -> &PreprojectiveAlgebra {
        &self.alg
    }

    pub fn algebra_arc(&self) -> Arc<PreprojectiveAlgebra> {
        self.alg.clone()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn h(&self) -> usize {
        self.alg.h()
    }

    fn space(&self, kind: Kind, n: usize) -> &CellSpace {
        match kind {
            Kind::Homology => &self.chains[n],
            Kind::Cohomology => &self.cochains[n],
        }
    }

    pub fn dim(&self, kind: Kind, n: usize) -> usize {
        self.space(kind, n).len()
    }

    pub fn block_dims(&self, kind: Kind, n: usize) -> Vec<(i64, usize)> {
        self.space(kind, n).blocks.iter().map(|(d, r)| (*d, r.len())).collect()
    }

    pub fn cell_degree(&self, kind: Kind, n: usize, idx: usize) -> i64 {
        self.space(kind, n).degree[idx]
    }

    /// Internal degrees of the chain (or cochain) cells of `C_n`.
    pub fn cell_degrees(&self, kind: Kind, n: usize) -> Vec<i64> {
        self.space(kind, n).blocks.keys().copied().collect()
    }

    /// Human-readable form of a basis cell.
    pub fn describe_cell(&self, kind: Kind, n: usize, idx: usize) -> String {
        let (x, y) = self.space(kind, n).cells[idx];
        match kind {
            Kind::Homology => {
                let t = &self.tensors[n].items[y as usize];
                let mut parts = vec![self.alg.name(x as usize)];
                parts.extend(t.iter().map(|&a| self.alg.name(a as usize)));
                format!("({})", parts.join("|"))
            }
            Kind::Cohomology => {
                let t = &self.tensors[n].items[x as usize];
                let args: Vec<String> = t.iter().map(|&a| self.alg.name(a as usize)).collect();
                let start = self.tensors[n].start[x as usize];
                let args = if args.is_empty() { format!("e{}", start + 1) } else { args.join("|") };
                format!("[{} -> {}]", args, self.alg.name(y as usize))
            }
        }
    }

    pub fn describe(&self, c: &Cell) -> String {
        if c.vec.is_zero() {
            return "0".into();
        }
        c.vec
            .iter()
            .map(|(i, v)| format!("{}·{}", crate::linalg::fmt_rational(v), self.describe_cell(c.kind, c.n, i)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    // ---- assembly ------------------------------------------------------

    fn assemble_chain_operator(
        &self,
        from: usize,
        to: usize,
        f: impl Fn(&Self, usize) -> Vec<(usize, Rational)> + Sync,
    ) -> BlockOperator {
        let src = &self.chains[from];
        let dst = &self.chains[to];
        let mut blocks = BTreeMap::new();
        for (&d, range) in &src.blocks {
            let target = dst.block(d);
            let cols: Vec<SparseVec> = range
                .clone()
                .map(|c| {
                    SparseVec::from_pairs(f(self, c).into_iter().map(|(i, v)| {
                        debug_assert!(target.contains(&i), "operator leaves its degree block");
                        (i - target.start, v)
                    }))
                })
                .collect();
            blocks.insert(d, SparseMatrix::from_columns(target.len(), &cols));
        }
        BlockOperator { blocks }
    }

    /// Matrix of `δ: C^n -> C^{n+1}`, assembled row by row.
    fn assemble_coboundary(&self, n: usize) -> BlockOperator {
        let src = &self.cochains[n];
        let dst = &self.cochains[n + 1];
        let alg = &*self.alg;
        let tn = &self.tensors[n];
        let mut triplets: BTreeMap<i64, Vec<(usize, usize, Rational)>> = BTreeMap::new();
        for (row_cell, &(s, o)) in dst.cells.iter().enumerate() {
            let d = dst.degree[row_cell];
            let items = &self.tensors[n + 1].items[s as usize];
            let start = self.tensors[n + 1].start[s as usize];
            let rows_start = dst.block(d).start;
            let cols_start = src.block(d).start;
            let mut push = |col_tensor: usize, out: usize, coef: Rational| {
                if let Some(&col) = src.index.get(&(col_tensor as u32, out as u32)) {
                    triplets.entry(d).or_default().push((row_cell - rows_start, col - cols_start, coef));
                }
            };
            let outputs_for = |t: usize| -> Vec<usize> {
                let (a, b) = (tn.start[t], tn.end[t]);
                (0..alg.dim()).filter(|&u| alg.path(u).source == a && alg.path(u).target == b).collect()
            };
            // a1 f(a2..)
            let first = items[0] as usize;
            if let Some(t) = tn.lookup(alg.path(first).target, &items[1..]) {
                for u in outputs_for(t) {
                    let c = alg.product(first, u).get(o as usize);
                    if !c.is_zero() {
                        push(t, u, c);
                    }
                }
            }
            // (-1)^i f(.., a_i a_{i+1}, ..)
            for i in 1..=n {
                let prod = alg.product(items[i - 1] as usize, items[i] as usize);
                for (w, c) in prod.iter() {
                    let mut merged = items[..i - 1].to_vec();
                    merged.push(w as u32);
                    merged.extend_from_slice(&items[i + 1..]);
                    if let Some(t) = tn.lookup(start, &merged) {
                        if tn.end[t] == alg.path(o as usize).target {
                            push(t, o as usize, parity_sign(i) * c);
                        }
                    }
                }
            }
            // (-1)^{n+1} f(a1..an) a_{n+1}
            let last = items[n] as usize;
            if let Some(t) = tn.lookup(start, &items[..n]) {
                for u in outputs_for(t) {
                    let c = alg.product(u, last).get(o as usize);
                    if !c.is_zero() {
                        push(t, u, parity_sign(n + 1) * c);
                    }
                }
            }
        }
        let mut blocks = BTreeMap::new();
        for (&d, range) in &src.blocks {
            let rows = dst.block(d).len();
            blocks.insert(d, SparseMatrix::from_triplets(rows, range.len(), triplets.remove(&d).unwrap_or_default()));
        }
        BlockOperator { blocks }
    }

    fn check_identities(&self) {
        for c in self.identity_checks() {
            assert!(c.holds, "{} fails on {}_{}({})", c.identity, if c.identity == "δ∘δ" { "C^" } else { "C" }, c.n, c.d);
        }
    }

    /// `b∘b`, `δ∘δ`, `B∘B` and `bB + Bb` on every stored block, as matrix
    /// products of the assembled operators.
    pub fn identity_checks(&self) -> Vec<IdentityCheck> {
        let n_max = self.max_degree;
        let mut out = Vec::new();
        let mut push = |identity: &'static str, n: usize, d: i64, holds: bool| {
            out.push(IdentityCheck { identity, n, d, holds });
        };
        for n in 2..=n_max {
            for (d, m) in &self.b[n].blocks {
                if let Some(prev) = self.b[n - 1].blocks.get(d) {
                    push("b∘b", n, *d, prev.mul(m).is_zero());
                }
            }
        }
        for n in 0..n_max.saturating_sub(1) {
            for (d, m) in &self.delta[n].blocks {
                if let Some(next) = self.delta[n + 1].blocks.get(d) {
                    push("δ∘δ", n, *d, next.mul(m).is_zero());
                }
            }
        }
        for n in 0..n_max.saturating_sub(1) {
            for (d, m) in &self.connes[n].blocks {
                if let Some(next) = self.connes[n + 1].blocks.get(d) {
                    push("B∘B", n, *d, next.mul(m).is_zero());
                }
            }
        }
        for n in 1..n_max {
            for (d, bm) in &self.b[n].blocks {
                let bb = self.connes[n - 1].blocks.get(d).map(|c| c.mul(bm));
                let cb = self.connes[n].blocks.get(d).and_then(|c| self.b[n + 1].blocks.get(d).map(|b| b.mul(c)));
                let holds = match (bb, cb) {
                    (Some(x), Some(y)) => x.row_vecs().iter().zip(y.row_vecs()).all(|(r, s)| r.add(s).is_zero()),
                    (Some(x), None) => x.is_zero(),
                    (None, Some(y)) => y.is_zero(),
                    (None, None) => continue,
                };
                push("bB+Bb", n, *d, holds);
            }
        }
        for (d, c) in &self.connes[0].blocks {
            if let Some(bm) = self.b[1].blocks.get(d) {
                push("bB+Bb", 0, *d, bm.mul(c).is_zero());
            }
        }
        out
    }

    fn homology_block(&self, kind: Kind, n: usize, d: i64) -> HomologyBlock {
        let space = self.space(kind, n);
        let dim = space.block(d).len();
        let (outgoing, incoming) = match kind {
            Kind::Homology => (
                if n == 0 { None } else { self.b[n].blocks.get(&d) },
                self.b.get(n + 1).and_then(|op| op.blocks.get(&d)),
            ),
            Kind::Cohomology => (
                self.delta.get(n).and_then(|op| op.blocks.get(&d)),
                if n == 0 { None } else { self.delta[n - 1].blocks.get(&d) },
            ),
        };
        let (free, cycle_basis) = match outgoing {
            Some(m) if m.rows() > 0 => {
                let (r, pivots) = rref(m);
                let free = crate::linalg::free_columns(&pivots, dim);
                (free, kernel_from_rref(&r, &pivots, dim))
            }
            _ => ((0..dim).collect(), (0..dim).map(SparseVec::unit).collect()),
        };
        let mut pos = vec![usize::MAX; dim];
        for (k, &c) in free.iter().enumerate() {
            pos[c] = k;
        }
        let boundaries: Vec<SparseVec> = match incoming {
            Some(m) => m
                .transpose()
                .row_vecs()
                .iter()
                .map(|col| col.reindex(|i| (pos[i] != usize::MAX).then_some(pos[i])))
                .filter(|v| !v.is_zero())
                .collect(),
            None => Vec::new(),
        };
        let quotient = quotient_basis(free.len(), &boundaries);
        let reps = quotient
            .representatives
            .iter()
            .map(|r| cycle_basis[r.leading().expect("unit vector")].clone())
            .collect();
        HomologyBlock { kind, n, d, free, cycle_basis, quotient, reps }
    }

    // ---- homology queries ---------------------------------------------

    fn blocks_of(&self, kind: Kind) -> &BTreeMap<(usize, i64), HomologyBlock> {
        match kind {
            Kind::Homology => &self.homology,
            Kind::Cohomology => &self.cohomology,
        }
    }

    fn check_reachable(&self, n: usize) -> Result<()> {
        if n >= self.max_degree {
            Err(Error::TruncationTooShallow { requested: n, max_degree: self.max_degree })
        } else {
            Ok(())
        }
    }

    pub fn homology_block_ref(&self, kind: Kind, n: usize, d: i64) -> Option<&HomologyBlock> {
        self.blocks_of(kind).get(&(n, d))
    }

    /// Basis classes of `HH_n` (or `HH^n`), by increasing internal degree.
    pub fn hh(&self, kind: Kind, n: usize) -> Result<Vec<HHClass>> {
        self.check_reachable(n)?;
        let space = self.space(kind, n);
        let mut out = Vec::new();
        for ((_, d), block) in self.blocks_of(kind).range((n, i64::MIN)..=(n, i64::MAX)) {
            let start = space.block(*d).start;
            for (k, rep) in block.reps.iter().enumerate() {
                out.push(HHClass {
                    kind,
                    n,
                    d: *d,
                    index: k,
                    representative: rep.reindex(|i| Some(i + start)),
                });
            }
        }
        Ok(out)
    }

    pub fn hh_dim(&self, kind: Kind, n: usize, d: i64) -> usize {
        self.blocks_of(kind).get(&(n, d)).map_or(0, |b| b.dim())
    }

    /// Nonzero `(d, dim)` pairs of `HH_n` / `HH^n`.
    pub fn hh_dims(&self, kind: Kind, n: usize) -> Result<Vec<(i64, usize)>> {
        self.check_reachable(n)?;
        Ok(self
            .blocks_of(kind)
            .range((n, i64::MIN)..=(n, i64::MAX))
            .filter(|(_, b)| b.dim() > 0)
            .map(|((_, d), b)| (*d, b.dim()))
            .collect())
    }

    pub fn dimension_table(&self) -> Vec<DimRow> {
        let mut rows = Vec::new();
        for kind in [Kind::Homology, Kind::Cohomology] {
            for n in 0..self.max_degree {
                for (d, dim) in self.hh_dims(kind, n).expect("reachable") {
                    rows.push(DimRow { kind, n, d, dim });
                }
            }
        }
        rows
    }

    /// Splits a homogeneous-in-`n` vector into internal-degree components.
    fn split(&self, kind: Kind, n: usize, v: &SparseVec) -> BTreeMap<i64, SparseVec> {
        let space = self.space(kind, n);
        let mut parts: BTreeMap<i64, Vec<(usize, Rational)>> = BTreeMap::new();
        for (i, c) in v.iter() {
            let d = space.degree[i];
            parts.entry(d).or_default().push((i - space.block(d).start, c.clone()));
        }
        parts.into_iter().map(|(d, p)| (d, SparseVec::from_pairs(p))).collect()
    }

    /// Coordinates of the class of a cycle in each degree block it meets.
    pub fn class_coords(&self, c: &Cell) -> Result<BTreeMap<i64, SparseVec>> {
        self.check_reachable(c.n)?;
        let mut out = BTreeMap::new();
        for (d, local) in self.split(c.kind, c.n, &c.vec) {
            let block = self.blocks_of(c.kind).get(&(c.n, d)).expect("block exists");
            let coords = block.coords(&local);
            if !coords.is_zero() {
                out.insert(d, coords);
            }
        }
        Ok(out)
    }

    pub fn is_cycle(&self, c: &Cell) -> bool {
        match c.kind {
            Kind::Homology => c.n == 0 || self.boundary(c).vec.is_zero(),
            Kind::Cohomology => c.n >= self.max_degree || self.coboundary(c).vec.is_zero(),
        }
    }

    /// Whether a cycle is zero in homology.
    pub fn is_boundary(&self, c: &Cell) -> Result<bool> {
        Ok(self.class_coords(c)?.is_empty())
    }

    /// An explicit preimage under `b` (or `δ`), found by an exact solve.
    pub fn boundary_preimage(&self, c: &Cell) -> Result<Option<Cell>> {
        self.check_reachable(c.n)?;
        let (op, pre_n) = match c.kind {
            Kind::Homology => (&self.b[c.n + 1], c.n + 1),
            Kind::Cohomology => {
                if c.n == 0 {
                    return Ok(c.vec.is_zero().then(|| Cell { kind: c.kind, n: 0, vec: SparseVec::new() }));
                }
                (&self.delta[c.n - 1], c.n - 1)
            }
        };
        let pre_space = self.space(c.kind, pre_n);
        let mut acc = SparseVec::new();
        for (d, local) in self.split(c.kind, c.n, &c.vec) {
            let Some(m) = op.blocks.get(&d) else { return Ok(None) };
            let Some(x) = solve(m, &local) else { return Ok(None) };
            let start = pre_space.block(d).start;
            acc = acc.add(&x.reindex(|i| Some(i + start)));
        }
        Ok(Some(Cell { kind: c.kind, n: pre_n, vec: acc }))
    }

    /// The cycle representing given class coordinates in block `(n, d)`.
    pub fn representative(&self, kind: Kind, n: usize, d: i64, coords: &SparseVec) -> Cell {
        let start = self.space(kind, n).block(d).start;
        let mut v = SparseVec::new();
        if let Some(block) = self.blocks_of(kind).get(&(n, d)) {
            for (k, c) in coords.iter() {
                v.axpy(c, &block.reps[k]);
            }
        }
        Cell { kind, n, vec: v.reindex(|i| Some(i + start)) }
    }

    // ---- chain-level operators ----------------------------------------

    fn chain_cell_parts(&self, n: usize, c: usize) -> (usize, &[u32]) {
        let (a0, t) = self.chains[n].cells[c];
        (a0 as usize, &self.tensors[n].items[t as usize])
    }

    /// Expands `coef · (a0; slot_1, …, slot_n)` into chain cells, dropping
    /// degree-0 parts of the `Ā` slots.
    fn push_chain(&self, coef: &Rational, a0: &Element, slots: &[Element], out: &mut Vec<(usize, Rational)>) {
        let n = slots.len();
        let alg = &*self.alg;
        let mut items: Vec<u32> = Vec::with_capacity(n);
        #[allow(clippy::too_many_arguments)]
        fn rec(
            this: &ChainComplexPair,
            n: usize,
            a0: usize,
            slots: &[Element],
            k: usize,
            items: &mut Vec<u32>,
            coef: Rational,
            out: &mut Vec<(usize, Rational)>,
        ) {
            let alg = &*this.alg;
            if k == slots.len() {
                let start = alg.path(a0).target;
                if let Some(t) = this.tensors[n].lookup(start, items) {
                    if let Some(&idx) = this.chains[n].index.get(&(a0 as u32, t as u32)) {
                        out.push((idx, coef));
                    }
                }
                return;
            }
            for (x, c) in slots[k].iter() {
                if alg.degree(x) == 0 {
                    continue;
                }
                items.push(x as u32);
                rec(this, n, a0, slots, k + 1, items, &coef * c, out);
                items.pop();
            }
        }
        for (x0, c0) in a0.iter() {
            let _ = alg;
            rec(self, n, x0, slots, 0, &mut items, coef * c0, out);
        }
    }

    fn boundary_cell(&self, n: usize, c: usize) -> Vec<(usize, Rational)> {
        let (a0, t) = self.chain_cell_parts(n, c);
        let alg = &*self.alg;
        let unit = |x: u32| SparseVec::unit(x as usize);
        let mut out = Vec::new();
        let one = Rational::one();
        // (a0 a1; a2..an)
        let head = alg.product(a0, t[0] as usize).clone();
        let rest: Vec<Element> = t[1..].iter().map(|&x| unit(x)).collect();
        self.push_chain(&one, &head, &rest, &mut out);
        for i in 1..n {
            let mut slots: Vec<Element> = Vec::with_capacity(n - 1);
            slots.extend(t[..i - 1].iter().map(|&x| unit(x)));
            slots.push(alg.product(t[i - 1] as usize, t[i] as usize).clone());
            slots.extend(t[i + 1..].iter().map(|&x| unit(x)));
            self.push_chain(&parity_sign(i), &SparseVec::unit(a0), &slots, &mut out);
        }
        let tail = alg.product(t[n - 1] as usize, a0).clone();
        let rest: Vec<Element> = t[..n - 1].iter().map(|&x| unit(x)).collect();
        self.push_chain(&parity_sign(n), &tail, &rest, &mut out);
        out
    }

    fn connes_cell(&self, n: usize, c: usize) -> Vec<(usize, Rational)> {
        let (a0, t) = self.chain_cell_parts(n, c);
        let alg = &*self.alg;
        let mut out = Vec::new();
        if alg.degree(a0) == 0 {
            return out;
        }
        let mut cycle: Vec<u32> = Vec::with_capacity(n + 1);
        cycle.push(a0 as u32);
        cycle.extend_from_slice(t);
        for i in 0..=n {
            let rotated: Vec<Element> = (0..=n).map(|k| SparseVec::unit(cycle[(i + k) % (n + 1)] as usize)).collect();
            let e = SparseVec::unit(alg.path(cycle[i] as usize).source);
            self.push_chain(&parity_sign(n * i), &e, &rotated, &mut out);
        }
        out
    }

    fn apply_chain_op(&self, c: &Cell, n_out: usize, f: impl Fn(usize) -> Vec<(usize, Rational)>) -> Cell {
        let mut acc = Vec::new();
        for (i, v) in c.vec.iter() {
            for (j, w) in f(i) {
                acc.push((j, v * w));
            }
        }
        Cell { kind: Kind::Homology, n: n_out, vec: SparseVec::from_pairs(acc) }
    }

    /// Hochschild boundary `b` (chains) or coboundary `δ` (cochains).
    pub fn boundary(&self, c: &Cell) -> Cell {
        match c.kind {
            Kind::Homology => {
                if c.n == 0 {
                    return Cell { kind: Kind::Homology, n: 0, vec: SparseVec::new() };
                }
                self.apply_chain_op(c, c.n - 1, |i| self.boundary_cell(c.n, i))
            }
            Kind::Cohomology => self.coboundary(c),
        }
    }

    pub fn coboundary(&self, c: &Cell) -> Cell {
        assert_eq!(c.kind, Kind::Cohomology);
        assert!(c.n < self.max_degree, "coboundary leaves the truncation");
        let mut out = SparseVec::new();
        let src = &self.cochains[c.n];
        let dst = &self.cochains[c.n + 1];
        for (d, local) in self.split(Kind::Cohomology, c.n, &c.vec) {
            if let Some(m) = self.delta[c.n].blocks.get(&d) {
                let start = dst.block(d).start;
                out = out.add(&m.mul_vec(&local).reindex(|i| Some(i + start)));
            }
            let _ = src;
        }
        Cell { kind: Kind::Cohomology, n: c.n + 1, vec: out }
    }

    /// Connes' operator `B: C_n -> C_{n+1}`.
    pub fn connes_b(&self, c: &Cell) -> Cell {
        assert_eq!(c.kind, Kind::Homology);
        assert!(c.n < self.max_degree, "B leaves the truncation");
        self.apply_chain_op(c, c.n + 1, |i| self.connes_cell(c.n, i))
    }

    fn cochain_map(&self, f: &Cell) -> CochainMap {
        assert_eq!(f.kind, Kind::Cohomology);
        let mut map: CochainMap = HashMap::new();
        for (i, c) in f.vec.iter() {
            let (t, o) = self.cochains[f.n].cells[i];
            map.entry(t).or_default().axpy(c, &SparseVec::unit(o as usize));
        }
        map
    }

    /// Evaluates a cochain on `Ā`-slots starting at vertex `start`
    /// (the start vertex only matters for `n = 0`).
    fn eval(&self, n: usize, map: &CochainMap, start: usize, slots: &[Element]) -> Element {
        let mut out = SparseVec::new();
        let mut items = Vec::with_capacity(slots.len());
        self.eval_rec(n, map, start, slots, 0, &mut items, &Rational::one(), &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn eval_rec(
        &self,
        n: usize,
        map: &CochainMap,
        start: usize,
        slots: &[Element],
        k: usize,
        items: &mut Vec<u32>,
        coef: &Rational,
        out: &mut Element,
    ) {
        if k == slots.len() {
            let s = if items.is_empty() { start } else { self.alg.path(items[0] as usize).source };
            if let Some(t) = self.tensors[n].lookup(s, items) {
                if let Some(v) = map.get(&(t as u32)) {
                    out.axpy(coef, v);
                }
            }
            return;
        }
        for (x, c) in slots[k].iter() {
            if self.alg.degree(x) == 0 {
                continue;
            }
            items.push(x as u32);
            self.eval_rec(n, map, start, slots, k + 1, items, &(coef * c), out);
            items.pop();
        }
    }

    fn cochain_from_terms(&self, n: usize, terms: impl IntoIterator<Item = (usize, Element)>) -> Cell {
        let mut acc = Vec::new();
        for (t, v) in terms {
            for (o, c) in v.iter() {
                if let Some(&idx) = self.cochains[n].index.get(&(t as u32, o as u32)) {
                    acc.push((idx, c.clone()));
                } else {
                    debug_assert!(false, "output outside e_s A e_t");
                }
            }
        }
        Cell { kind: Kind::Cohomology, n, vec: SparseVec::from_pairs(acc) }
    }

    /// Cup product `f ∪ g`.
    pub fn cup(&self, f: &Cell, g: &Cell) -> Result<Cell> {
        let n = f.n + g.n;
        self.check_cochain_degree(n)?;
        let fm = self.cochain_map(f);
        let gm = self.cochain_map(g);
        let alg = &*self.alg;
        let mut terms: BTreeMap<usize, Element> = BTreeMap::new();
        for (&tf, vf) in &fm {
            let tf = tf as usize;
            for (&tg, vg) in &gm {
                let tg = tg as usize;
                if self.tensors[f.n].end[tf] != self.tensors[g.n].start[tg] {
                    continue;
                }
                let mut items = self.tensors[f.n].items[tf].clone();
                items.extend_from_slice(&self.tensors[g.n].items[tg]);
                let start = self.tensors[f.n].start[tf];
                let t = self.tensors[n].lookup(start, &items).expect("concatenation is composable");
                let p = alg.mul(vf, vg);
                terms.entry(t).or_default().axpy(&Rational::one(), &p);
            }
        }
        Ok(self.cochain_from_terms(n, terms))
    }

    fn check_cochain_degree(&self, n: usize) -> Result<()> {
        if n > self.max_degree {
            Err(Error::TruncationTooShallow { requested: n, max_degree: self.max_degree })
        } else {
            Ok(())
        }
    }

    /// Gerstenhaber composition `f ∘ g`.
    pub fn circle(&self, f: &Cell, g: &Cell) -> Result<Cell> {
        let (p, q) = (f.n, g.n);
        if p == 0 {
            return Ok(Cell { kind: Kind::Cohomology, n: q.saturating_sub(1), vec: SparseVec::new() });
        }
        let n = p + q - 1;
        self.check_cochain_degree(n)?;
        let fm = self.cochain_map(f);
        let gm = self.cochain_map(g);
        let mut terms: BTreeMap<usize, Element> = BTreeMap::new();
        let tn = &self.tensors[n];
        for t in 0..tn.len() {
            let items = &tn.items[t];
            let start = tn.start[t];
            let mut acc = SparseVec::new();
            for i in 0..p {
                // vertex where g's window starts
                let window_start = if i == 0 { start } else { self.alg.path(items[i - 1] as usize).target };
                let window: Vec<Element> = items[i..i + q].iter().map(|&x| SparseVec::unit(x as usize)).collect();
                let inner = self.eval(q, &gm, window_start, &window);
                if inner.is_zero() {
                    continue;
                }
                let mut slots: Vec<Element> = items[..i].iter().map(|&x| SparseVec::unit(x as usize)).collect();
                slots.push(inner);
                slots.extend(items[i + q..].iter().map(|&x| SparseVec::unit(x as usize)));
                let v = self.eval(p, &fm, start, &slots);
                acc.axpy(&parity_sign(i * (q + 1)), &v);
            }
            if !acc.is_zero() {
                terms.insert(t, acc);
            }
        }
        Ok(self.cochain_from_terms(n, terms))
    }

    /// Gerstenhaber bracket `[f, g] = f∘g - (-1)^{(p-1)(q-1)} g∘f`.
    pub fn bracket(&self, f: &Cell, g: &Cell) -> Result<Cell> {
        let n = (f.n + g.n).saturating_sub(1);
        if f.n + g.n == 0 {
            return Ok(Cell { kind: Kind::Cohomology, n: 0, vec: SparseVec::new() });
        }
        self.check_cochain_degree(n)?;
        let fg = self.circle(f, g)?;
        let gf = self.circle(g, f)?;
        let sign = parity_sign((f.n + 1) * (g.n + 1));
        let mut v = fg.vec;
        v.axpy(&-sign, &gf.vec);
        Ok(Cell { kind: Kind::Cohomology, n, vec: v })
    }

    /// Contraction `ι_f` of a cochain with a chain.
    pub fn contract(&self, f: &Cell, c: &Cell) -> Cell {
        assert_eq!(f.kind, Kind::Cohomology);
        assert_eq!(c.kind, Kind::Homology);
        let (p, n) = (f.n, c.n);
        if p > n {
            return Cell { kind: Kind::Homology, n: 0, vec: SparseVec::new() };
        }
        let fm = self.cochain_map(f);
        let sign = parity_sign(signs::contraction(p, n));
        let mut out = Vec::new();
        for (i, coef) in c.vec.iter() {
            let (a0, t) = self.chain_cell_parts(n, i);
            let args: Vec<Element> = t[..p].iter().map(|&x| SparseVec::unit(x as usize)).collect();
            let val = self.eval(p, &fm, self.alg.path(a0).target, &args);
            if val.is_zero() {
                continue;
            }
            let head = self.alg.mul(&SparseVec::unit(a0), &val);
            let rest: Vec<Element> = t[p..].iter().map(|&x| SparseVec::unit(x as usize)).collect();
            self.push_chain(&(coef * &sign), &head, &rest, &mut out);
        }
        Cell { kind: Kind::Homology, n: n - p, vec: SparseVec::from_pairs(out) }
    }

    /// Lie derivative `L_f` of a chain along a cochain.
    pub fn lie_derivative(&self, f: &Cell, c: &Cell) -> Result<Cell> {
        assert_eq!(f.kind, Kind::Cohomology);
        assert_eq!(c.kind, Kind::Homology);
        let (p, n) = (f.n, c.n);
        if p > n + 1 {
            return Ok(Cell { kind: Kind::Homology, n: 0, vec: SparseVec::new() });
        }
        let n_out = n + 1 - p;
        if n_out > self.max_degree {
            return Err(Error::TruncationTooShallow { requested: n_out, max_degree: self.max_degree });
        }
        let fm = self.cochain_map(f);
        let alg = &*self.alg;
        let mut out = Vec::new();
        for (ci, coef) in c.vec.iter() {
            let (a0, t) = self.chain_cell_parts(n, ci);
            let x: Vec<usize> = std::iter::once(a0).chain(t.iter().map(|&v| v as usize)).collect();
            let unit = |k: usize| SparseVec::unit(x[k]);
            // f applied to x_{i+1}..x_{i+p}, result in an Ā slot
            if p <= n {
                for i in 0..=(n - p) {
                    let window_start = alg.path(x[i]).target;
                    let args: Vec<Element> = (i + 1..=i + p).map(unit).collect();
                    let val = self.eval(p, &fm, window_start, &args);
                    if val.is_zero() {
                        continue;
                    }
                    let mut slots: Vec<Element> = (1..=i).map(unit).collect();
                    slots.push(val);
                    slots.extend((i + p + 1..=n).map(unit));
                    let s = coef * parity_sign(signs::lie_inner(p, i));
                    self.push_chain(&s, &unit(0), &slots, &mut out);
                }
            }
            // windows through x_0: f(x_{j+1}..x_n, x_0, .., x_{p-n+j-1}) becomes the new a0
            if alg.degree(a0) > 0 && p >= 1 {
                for j in (n + 1).saturating_sub(p)..=n {
                    let args: Vec<Element> = (j + 1..=n).chain(0..(p + j - n)).map(unit).collect();
                    let window_start = alg.path(x[(j + 1) % (n + 1)]).source;
                    let val = self.eval(p, &fm, window_start, &args);
                    if val.is_zero() {
                        continue;
                    }
                    let slots: Vec<Element> = ((p + j - n)..=j).map(unit).collect();
                    let s = coef * parity_sign(signs::lie_wrap(p, n, j));
                    self.push_chain(&s, &val, &slots, &mut out);
                }
            }
        }
        Ok(Cell { kind: Kind::Homology, n: n_out, vec: SparseVec::from_pairs(out) })
    }

    /// The identity 0-cocycle `e_i ↦ e_i`.
    pub fn unit_cocycle(&self) -> Cell {
        let terms = (0..self.alg.vertex_count()).map(|i| {
            let t = self.tensors[0].lookup(i, &[]).expect("vertex tensor");
            (t, SparseVec::unit(i))
        });
        self.cochain_from_terms(0, terms)
    }

    /// The 0-chain `(e_i)`.
    pub fn vertex_chain(&self, i: usize) -> Cell {
        let t = self.tensors[0].lookup(i, &[]).expect("vertex tensor");
        let idx = self.chains[0].index[&(i as u32, t as u32)];
        Cell { kind: Kind::Homology, n: 0, vec: SparseVec::unit(idx) }
    }

    /// The 1-cocycle `x ↦ w(x)·x` where `w` adds up per-arrow weights; a
    /// derivation whenever `w(a) + w(a*)` is the same for every edge.
    pub fn weight_derivation(&self, weight: impl Fn(usize) -> Rational) -> Cell {
        let alg = &*self.alg;
        let mut terms: Vec<(usize, Element)> = Vec::new();
        for b in alg.vertex_count()..alg.dim() {
            let p = alg.path(b);
            let w: Rational = p.arrows.iter().map(|&a| weight(a)).fold(Rational::zero(), |s, x| s + x);
            if w.is_zero() {
                continue;
            }
            let t = self.tensors[1].lookup(p.source, &[b as u32]).expect("degree-1 tensor");
            terms.push((t, SparseVec::unit(b).scaled(&w)));
        }
        self.cochain_from_terms(1, terms)
    }
}

fn build_tensors(alg: &PreprojectiveAlgebra, max_degree: usize) -> Vec<TensorSpace> {
    let r = alg.vertex_count();
    let abar: Vec<usize> = (r..alg.dim()).collect();
    let mut out = Vec::with_capacity(max_degree + 1);
    let mut t0 = TensorSpace::default();
    for i in 0..r {
        t0.push(i, i, 0, Vec::new());
    }
    out.push(t0);
    for n in 1..=max_degree {
        let prev = &out[n - 1];
        let mut next = TensorSpace::default();
        for k in 0..prev.len() {
            for &x in &abar {
                let px = alg.path(x);
                if n > 1 && px.source != prev.end[k] {
                    continue;
                }
                if n == 1 && k != px.source {
                    continue;
                }
                let mut items = prev.items[k].clone();
                items.push(x as u32);
                let start = if n == 1 { px.source } else { prev.start[k] };
                next.push(start, px.target, prev.degree[k] + px.len(), items);
            }
        }
        out.push(next);
    }
    out
}

fn chain_cells(alg: &PreprojectiveAlgebra, tensors: &TensorSpace) -> CellSpace {
    let mut cells = Vec::new();
    for t in 0..tensors.len() {
        for a0 in 0..alg.dim() {
            let p = alg.path(a0);
            if p.source == tensors.end[t] && p.target == tensors.start[t] {
                cells.push(((a0 as u32, t as u32), (p.len() + tensors.degree[t]) as i64));
            }
        }
    }
    CellSpace::from_cells(cells)
}

fn cochain_cells(alg: &PreprojectiveAlgebra, tensors: &TensorSpace) -> CellSpace {
    let mut cells = Vec::new();
    for t in 0..tensors.len() {
        for o in 0..alg.dim() {
            let p = alg.path(o);
            if p.source == tensors.start[t] && p.target == tensors.end[t] {
                cells.push(((t as u32, o as u32), p.len() as i64 - tensors.degree[t] as i64));
            }
        }
    }
    CellSpace::from_cells(cells)
}

/// A homogeneous class of `HH_n(d)` or `HH^n(d)`, in block coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassVec {
    pub kind: Kind,
    pub n: usize,
    pub d: i64,
    pub coords: SparseVec,
}

impl ClassVec {
    pub fn zero(kind: Kind, n: usize, d: i64) -> Self {
        Self { kind, n, d, coords: SparseVec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self { coords: self.coords.scaled(c), ..self.clone() }
    }

    /// Sum of two classes in the same block.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.kind, self.n, self.d), (other.kind, other.n, other.d));
        Self { coords: self.coords.add(&other.coords), ..self.clone() }
    }
}

/// Class-level operations. Each one lifts to representatives, applies the
/// chain-level operator and projects back to homology.
impl ChainComplexPair {
    /// Whether `HH_n` / `HH^n` is computed under the truncation.
    pub fn reachable(&self, n: usize) -> bool {
        n < self.max_degree
    }

    pub fn class_basis(&self, kind: Kind, n: usize, d: i64) -> Vec<ClassVec> {
        (0..self.hh_dim(kind, n, d))
            .map(|k| ClassVec { kind, n, d, coords: SparseVec::unit(k) })
            .collect()
    }

    /// Degrees `d` with `HH_n(d) ≠ 0` (or `HH^n(d) ≠ 0`).
    pub fn nonzero_degrees(&self, kind: Kind, n: usize) -> Vec<i64> {
        self.blocks_of(kind)
            .range((n, i64::MIN)..=(n, i64::MAX))
            .filter(|(_, b)| b.dim() > 0)
            .map(|((_, d), _)| *d)
            .collect()
    }

    pub fn lift(&self, x: &ClassVec) -> Cell {
        self.representative(x.kind, x.n, x.d, &x.coords)
    }

    /// The class of a (co)cycle known to be concentrated in degree `d`.
    pub fn classify(&self, c: &Cell, d: i64) -> Result<ClassVec> {
        let mut parts = self.class_coords(c)?;
        let coords = parts.remove(&d).unwrap_or_default();
        debug_assert!(parts.is_empty(), "class not concentrated in degree {d}");
        Ok(ClassVec { kind: c.kind, n: c.n, d, coords })
    }

    pub fn cup_class(&self, a: &ClassVec, b: &ClassVec) -> Result<ClassVec> {
        self.check_reachable(a.n + b.n)?;
        let c = self.cup(&self.lift(a), &self.lift(b))?;
        self.classify(&c, a.d + b.d)
    }

    pub fn bracket_class(&self, a: &ClassVec, b: &ClassVec) -> Result<ClassVec> {
        let n = (a.n + b.n).saturating_sub(1);
        if a.n + b.n == 0 {
            return Ok(ClassVec::zero(Kind::Cohomology, 0, a.d + b.d));
        }
        self.check_reachable(n)?;
        let c = self.bracket(&self.lift(a), &self.lift(b))?;
        self.classify(&c, a.d + b.d)
    }

    /// `ι_a(c)`; zero in `HH_0` when `|a| > |c|`.
    pub fn contract_class(&self, a: &ClassVec, c: &ClassVec) -> Result<ClassVec> {
        if a.n > c.n {
            return Ok(ClassVec::zero(Kind::Homology, 0, c.d + a.d));
        }
        let out = self.contract(&self.lift(a), &self.lift(c));
        self.classify(&out, c.d + a.d)
    }

    pub fn lie_class(&self, a: &ClassVec, c: &ClassVec) -> Result<ClassVec> {
        if a.n > c.n + 1 {
            return Ok(ClassVec::zero(Kind::Homology, 0, c.d + a.d));
        }
        self.check_reachable(c.n + 1 - a.n)?;
        let out = self.lie_derivative(&self.lift(a), &self.lift(c))?;
        self.classify(&out, c.d + a.d)
    }

    pub fn connes_class(&self, c: &ClassVec) -> Result<ClassVec> {
        self.check_reachable(c.n + 1)?;
        let out = self.connes_b(&self.lift(c));
        self.classify(&out, c.d)
    }

    /// Matrix of a class-level linear map on the block `(kind, n, d)`;
    /// column `j` holds the image of the `j`-th basis class.
    pub fn class_matrix(
        &self,
        kind: Kind,
        n: usize,
        d: i64,
        target_dim: usize,
        op: impl Fn(&ClassVec) -> Result<ClassVec>,
    ) -> Result<SparseMatrix> {
        let cols: Vec<SparseVec> =
            self.class_basis(kind, n, d).iter().map(|x| op(x).map(|y| y.coords)).collect::<Result<_>>()?;
        Ok(SparseMatrix::from_columns(target_dim, &cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frac, rat};
    use crate::quiver::{DoubleQuiver, QuiverType};

    fn pair(ty: QuiverType, n: usize) -> ChainComplexPair {
        let alg = Arc::new(PreprojectiveAlgebra::build(&DoubleQuiver::canonical(ty)).unwrap());
        ChainComplexPair::build(alg, n).unwrap()
    }

    fn theta0(p: &ChainComplexPair) -> Cell {
        let arrows = p.algebra().quiver.arrows.clone();
        p.weight_derivation(|a| if arrows[a].starred { rat(1) } else { rat(0) })
    }

    fn unit_class(p: &ChainComplexPair, kind: Kind, n: usize) -> Vec<ClassVec> {
        let mut out = Vec::new();
        for d in p.nonzero_degrees(kind, n) {
            out.extend(p.class_basis(kind, n, d));
        }
        out
    }

    #[test]
    fn degree_zero_spaces_are_the_cyclic_part() {
        let p = pair(QuiverType::a(2), 2);
        // ⊕ e_i A e_i: only the two idempotents are cyclic paths in A2
        assert_eq!(p.dim(Kind::Homology, 0), 2);
        assert_eq!(p.block_dims(Kind::Homology, 0), vec![(0, 2)]);
        assert_eq!(p.dim(Kind::Cohomology, 0), 2);
    }

    #[test]
    fn complex_identities_hold() {
        for (ty, n) in [(QuiverType::a(2), 7), (QuiverType::a(3), 5), (QuiverType::d(4), 3)] {
            let p = pair(ty, n);
            let checks = p.identity_checks();
            assert!(!checks.is_empty());
            assert!(checks.iter().all(|c| c.holds), "{ty:?}");
        }
    }

    #[test]
    fn low_degree_hh_of_a2() {
        let p = pair(QuiverType::a(2), 4);
        assert_eq!(p.hh_dims(Kind::Homology, 0).unwrap(), vec![(0, 2)]);
        let hh0: Vec<_> = p.hh_dims(Kind::Cohomology, 0).unwrap().into_iter().filter(|x| x.1 > 0).collect();
        assert_eq!(hh0, vec![(0, 1)]);
        let h = p.h() as i64;
        for (d, k) in p.hh_dims(Kind::Homology, 1).unwrap() {
            if k > 0 {
                assert!((2..=h - 1).contains(&d), "HH_1 in degree {d}");
            }
        }
        assert!(matches!(p.hh(Kind::Homology, 4), Err(Error::TruncationTooShallow { .. })));
    }

    #[test]
    fn unit_acts_trivially() {
        let p = pair(QuiverType::a(3), 4);
        let one = p.unit_cocycle();
        let t = theta0(&p);
        assert_eq!(p.cup(&one, &t).unwrap().vec, t.vec);
        assert_eq!(p.cup(&t, &one).unwrap().vec, t.vec);
        for c in p.hh(Kind::Homology, 2).unwrap() {
            let cell = Cell { kind: Kind::Homology, n: 2, vec: c.representative };
            assert_eq!(p.contract(&one, &cell).vec, cell.vec);
            let l = p.lie_derivative(&one, &cell).unwrap();
            assert!(p.is_boundary(&l).unwrap());
        }
    }

    #[test]
    fn contraction_vanishes_above_chain_degree() {
        let p = pair(QuiverType::a(2), 4);
        let t = theta0(&p);
        let e = p.vertex_chain(0);
        let c = p.contract(&t, &e);
        assert!(c.vec.is_zero());
    }

    #[test]
    fn theta0_is_a_cocycle_spanning_hh1() {
        let p = pair(QuiverType::a(2), 4);
        let t = theta0(&p);
        assert!(p.is_cycle(&t));
        assert!(!p.is_boundary(&t).unwrap());
        assert_eq!(p.hh_dims(Kind::Cohomology, 1).unwrap().into_iter().filter(|x| x.1 > 0).collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn cup_is_graded_commutative_on_cohomology() {
        let p = pair(QuiverType::a(3), 5);
        let ones = unit_class(&p, Kind::Cohomology, 1);
        let twos = unit_class(&p, Kind::Cohomology, 2);
        for u in &ones {
            for v in ones.iter().chain(&twos) {
                let uv = p.cup_class(u, v).unwrap();
                let vu = p.cup_class(v, u).unwrap();
                let s = if u.n * v.n % 2 == 0 { rat(1) } else { rat(-1) };
                assert_eq!(uv.coords, vu.coords.scaled(&s));
            }
        }
        // chain level: θ∪θ is a coboundary
        let t = theta0(&p);
        let tt = p.cup(&t, &t).unwrap();
        assert!(p.boundary_preimage(&tt).unwrap().is_some());
    }

    #[test]
    fn bracket_examples_on_a2() {
        let p = pair(QuiverType::a(2), 5);
        let t = p.classify(&theta0(&p), 0).unwrap();
        assert!(p.bracket_class(&t, &t).unwrap().is_zero());
        let one = p.classify(&p.unit_cocycle(), 0).unwrap();
        for n in 0..4 {
            for x in unit_class(&p, Kind::Cohomology, n) {
                assert!(p.bracket_class(&one, &x).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn connes_examples_on_a2() {
        let p = pair(QuiverType::a(2), 6);
        for i in 0..2 {
            let e = p.vertex_chain(i);
            assert!(p.is_boundary(&p.connes_b(&e)).unwrap());
        }
        let hh1 = unit_class(&p, Kind::Homology, 1);
        assert_eq!(hh1.len(), 1);
        let b = p.connes_class(&hh1[0]).unwrap();
        assert!(!b.is_zero());
        for x in unit_class(&p, Kind::Homology, 4) {
            assert!(p.connes_class(&x).unwrap().is_zero());
        }
    }

    #[test]
    fn theta0_contraction_maps_hh2_onto_hh1() {
        let p = pair(QuiverType::a(2), 4);
        let t = p.classify(&theta0(&p), 0).unwrap();
        for x in unit_class(&p, Kind::Homology, 1) {
            assert!(p.contract_class(&t, &x).unwrap().is_zero());
        }
        let images: Vec<ClassVec> =
            unit_class(&p, Kind::Homology, 2).iter().map(|x| p.contract_class(&t, x).unwrap()).collect();
        assert!(images.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn lie_theta0_scales_by_half_degree() {
        let p = pair(QuiverType::a(3), 5);
        let t = p.classify(&theta0(&p), 0).unwrap();
        for n in 0..4 {
            for x in unit_class(&p, Kind::Homology, n) {
                let l = p.lie_class(&t, &x).unwrap();
                assert_eq!(l.coords, x.coords.scaled(&frac(x.d, 2)));
            }
        }
    }

    #[test]
    fn boundary_preimage_is_exact() {
        let p = pair(QuiverType::a(3), 4);
        for n in 1..3 {
            for i in (0..p.dim(Kind::Homology, n)).step_by(7) {
                let c = Cell { kind: Kind::Homology, n, vec: SparseVec::unit(i) };
                let b = p.boundary(&c);
                if b.vec.is_zero() {
                    continue;
                }
                let pre = p.boundary_preimage(&b).unwrap().expect("boundary has a preimage");
                assert_eq!(p.boundary(&pre).vec, b.vec);
            }
        }
    }
}
