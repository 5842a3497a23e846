//! The duality `𝔻: HH_n ≅ HH^{6m+2-n}`, the BV operator `Δ = 𝔻 B 𝔻^{-1}`
//! and the identification of computed classes with the labeled bases.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hochschild::{ChainComplexPair, ClassVec, Kind};
use crate::linalg::{inverse, kernel_basis, rat, Rational, SparseMatrix, SparseVec};
use crate::tables::{LabelFamily, Symbol, SymbolicElement, TypeMetadata, Variant};

/// `𝔻` restricted to the homological degrees the truncation can see.
///
/// Blocks are solved from the intertwining law `𝔻(ι_η c) = η ∪ 𝔻(c)`; the
/// solution is unique up to one global scalar, fixed by making the first
/// nonzero unknown equal to 1.
#[derive(Clone, Debug)]
pub struct DualityMap {
    pub m: usize,
    h: i64,
    lo: usize,
    hi: usize,
    /// `(n, d)` of `HH_n(d)` to the matrix onto `HH^{6m+2-n}(d-2mh-2)`.
    blocks: BTreeMap<(usize, i64), SparseMatrix>,
    inverses: BTreeMap<(usize, i64), SparseMatrix>,
    /// Number of intertwining equations imposed.
    pub constraints: usize,
}

fn block_key(kind: Kind, n: usize, d: i64) -> String {
    match kind {
        Kind::Homology => format!("HH_{n}({d})"),
        Kind::Cohomology => format!("HH^{n}({d})"),
    }
}

impl DualityMap {
    pub fn period(&self) -> usize {
        6 * self.m + 2
    }

    /// Homological degrees on which `𝔻` is defined.
    pub fn domain(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }

    pub fn covers(&self, n: usize) -> bool {
        self.lo <= n && n <= self.hi
    }

    /// Cohomological bidegree matching `HH_n(d)`.
    pub fn target(&self, n: usize, d: i64) -> (usize, i64) {
        (self.period() - n, d - 2 * self.m as i64 * self.h - 2)
    }

    /// Homological bidegree matching `HH^p(e)`.
    pub fn source(&self, p: usize, e: i64) -> (usize, i64) {
        (self.period() - p, e + 2 * self.m as i64 * self.h + 2)
    }

    pub fn block(&self, n: usize, d: i64) -> Option<&SparseMatrix> {
        self.blocks.get(&(n, d))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, i64), &SparseMatrix)> {
        self.blocks.iter()
    }

    /// Solves the intertwining constraints on `pair`.
    pub fn build(pair: &ChainComplexPair, m: usize) -> Result<Self> {
        let period = 6 * m + 2;
        let top = pair.max_degree().saturating_sub(1);
        let h = pair.h() as i64;
        let shift = 2 * m as i64 * h + 2;
        let lo = period.saturating_sub(top).max(1);
        let mut hi = period.min(top);
        let dims_match = |n: usize| -> Result<()> {
            let hom: Vec<(i64, usize)> =
                pair.hh_dims(Kind::Homology, n)?.into_iter().filter(|x| x.1 > 0).map(|(d, k)| (d - shift, k)).collect();
            let coh: Vec<(i64, usize)> =
                pair.hh_dims(Kind::Cohomology, period - n)?.into_iter().filter(|x| x.1 > 0).collect();
            if hom != coh {
                return Err(Error::NoSolution(format!(
                    "HH_{n} and HH^{} have different bidegree dimensions: {hom:?} vs {coh:?}",
                    period - n
                )));
            }
            Ok(())
        };
        // HH^0 = U ⊕ L and HH_{6m+2} = U ⊕ Y may differ; drop that edge then
        if hi == period && dims_match(hi).is_err() {
            hi -= 1;
        }
        if lo > hi {
            return Err(Error::TruncationTooShallow { requested: period, max_degree: pair.max_degree() });
        }
        for n in lo..=hi {
            dims_match(n)?;
        }

        // unknown layout: block (n, d) holds D[r][j] at offset + r * src + j
        let mut offsets: BTreeMap<(usize, i64), (usize, usize, usize)> = BTreeMap::new();
        let mut unknowns = 0;
        for n in lo..=hi {
            for d in pair.nonzero_degrees(Kind::Homology, n) {
                let k = pair.hh_dim(Kind::Homology, n, d);
                offsets.insert((n, d), (unknowns, k, k));
                unknowns += k * k;
            }
        }
        let var = |n: usize, d: i64, r: usize, j: usize| -> usize {
            let (off, src, _) = offsets[&(n, d)];
            off + r * src + j
        };

        let mut rows: Vec<SparseVec> = Vec::new();
        for p in 0..=(hi - lo) {
            for e in pair.nonzero_degrees(Kind::Cohomology, p) {
                for eta in pair.class_basis(Kind::Cohomology, p, e) {
                    for n in (lo + p)..=hi {
                        let np = n - p;
                        for d in pair.nonzero_degrees(Kind::Homology, n) {
                            let (tn, td) = (period - n, d - shift);
                            let targets = pair.class_basis(Kind::Cohomology, tn, td);
                            let cups: Vec<ClassVec> =
                                targets.iter().map(|y| pair.cup_class(&eta, y)).collect::<Result<_>>()?;
                            let small = offsets.contains_key(&(np, d + e));
                            for (i, c) in pair.class_basis(Kind::Homology, n, d).iter().enumerate() {
                                let contracted = pair.contract_class(&eta, c)?;
                                let out_dim = pair.hh_dim(Kind::Cohomology, period - np, d + e - shift);
                                for r in 0..out_dim {
                                    let mut row = SparseVec::new();
                                    if small {
                                        for (j, x) in contracted.coords.iter() {
                                            row.axpy(x, &SparseVec::unit(var(np, d + e, r, j)));
                                        }
                                    }
                                    for (j, cup) in cups.iter().enumerate() {
                                        let v = cup.coords.get(r);
                                        if !v.is_zero() {
                                            row.axpy(&-v, &SparseVec::unit(var(n, d, j, i)));
                                        }
                                    }
                                    if !row.is_zero() {
                                        rows.push(row);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let constraints = rows.len();
        let system = SparseMatrix::from_rows(unknowns, rows);
        let kernel = kernel_basis(&system);
        let context = format!("duality with m={m} on HH_{lo}..HH_{hi}");
        let mut v = match kernel.len() {
            0 => return Err(Error::NoSolution(format!("{context}: intertwining forces 𝔻 = 0"))),
            1 => kernel.into_iter().next().expect("one vector"),
            k => return Err(Error::Underdetermined { freedom: k, context }),
        };
        if let Some(first) = v.leading() {
            let c = v.get(first);
            v.scale(&(Rational::one() / c));
        }

        let mut blocks = BTreeMap::new();
        let mut inverses = BTreeMap::new();
        for (&(n, d), &(off, src, tgt)) in &offsets {
            let mut triplets = Vec::new();
            for r in 0..tgt {
                for j in 0..src {
                    let x = v.get(off + r * src + j);
                    if !x.is_zero() {
                        triplets.push((r, j, x));
                    }
                }
            }
            let mat = SparseMatrix::from_triplets(tgt, src, triplets);
            let inv = inverse(&mat).ok_or_else(|| {
                Error::NoSolution(format!("{context}: block {} is not invertible", block_key(Kind::Homology, n, d)))
            })?;
            blocks.insert((n, d), mat);
            inverses.insert((n, d), inv);
        }
        Ok(Self { m, h, lo, hi, blocks, inverses, constraints })
    }

    fn uncovered(&self, what: String) -> Error {
        Error::IndexOutOfRange(format!("{what} lies outside the duality domain {}..={}", self.lo, self.hi))
    }

    /// `𝔻(c)` for a homology class.
    pub fn apply(&self, c: &ClassVec) -> Result<ClassVec> {
        debug_assert_eq!(c.kind, Kind::Homology);
        if !self.covers(c.n) {
            return Err(self.uncovered(block_key(c.kind, c.n, c.d)));
        }
        let (p, e) = self.target(c.n, c.d);
        Ok(match self.blocks.get(&(c.n, c.d)) {
            Some(b) => ClassVec { kind: Kind::Cohomology, n: p, d: e, coords: b.mul_vec(&c.coords) },
            None => ClassVec::zero(Kind::Cohomology, p, e),
        })
    }

    /// `𝔻^{-1}(x)` for a cohomology class.
    pub fn apply_inverse(&self, x: &ClassVec) -> Result<ClassVec> {
        debug_assert_eq!(x.kind, Kind::Cohomology);
        let (n, d) = self.source(x.n, x.d);
        if x.n > self.period() || !self.covers(n) {
            return Err(self.uncovered(block_key(x.kind, x.n, x.d)));
        }
        Ok(match self.inverses.get(&(n, d)) {
            Some(b) => ClassVec { kind: Kind::Homology, n, d, coords: b.mul_vec(&x.coords) },
            None => ClassVec::zero(Kind::Homology, n, d),
        })
    }

    /// Whether `𝔻^{-1}` is defined on `HH^p`.
    pub fn covers_cohomology(&self, p: usize) -> bool {
        p <= self.period() && self.covers(self.period() - p)
    }

    /// Re-checks `𝔻(ι_η c) = η ∪ 𝔻(c)` on every basis pair; returns the
    /// number of pairs checked and the failing ones.
    pub fn check_intertwining(&self, pair: &ChainComplexPair) -> Result<(usize, Vec<(ClassVec, ClassVec)>)> {
        let mut checked = 0;
        let mut failures = Vec::new();
        for p in 0..=(self.hi - self.lo) {
            for e in pair.nonzero_degrees(Kind::Cohomology, p) {
                for eta in pair.class_basis(Kind::Cohomology, p, e) {
                    for n in (self.lo + p)..=self.hi {
                        for d in pair.nonzero_degrees(Kind::Homology, n) {
                            for c in pair.class_basis(Kind::Homology, n, d) {
                                checked += 1;
                                let lhs = self.apply(&pair.contract_class(&eta, &c)?)?;
                                let rhs = pair.cup_class(&eta, &self.apply(&c)?)?;
                                if lhs.coords != rhs.coords {
                                    failures.push((eta.clone(), c));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok((checked, failures))
    }
}

/// `Δ = 𝔻 B 𝔻^{-1}: HH^p → HH^{p-1}` where both sides are covered.
#[derive(Clone, Debug)]
pub struct BVOperator {
    pub m: usize,
    /// `(p, e)` to the matrix `HH^p(e) → HH^{p-1}(e)`.
    blocks: BTreeMap<(usize, i64), SparseMatrix>,
    degrees: Vec<usize>,
}

impl BVOperator {
    pub fn build(pair: &ChainComplexPair, duality: &DualityMap) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        let mut degrees = vec![0];
        for p in 1..=duality.period() {
            if !duality.covers_cohomology(p) || !duality.covers_cohomology(p - 1) {
                continue;
            }
            degrees.push(p);
            for e in pair.nonzero_degrees(Kind::Cohomology, p) {
                let out = pair.hh_dim(Kind::Cohomology, p - 1, e);
                let mat = pair.class_matrix(Kind::Cohomology, p, e, out, |x| {
                    duality.apply(&pair.connes_class(&duality.apply_inverse(x)?)?)
                })?;
                blocks.insert((p, e), mat);
            }
        }
        Ok(Self { m: duality.m, blocks, degrees })
    }

    /// Cohomological degrees where `Δ` is available (always including 0).
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn defined_on(&self, p: usize) -> bool {
        self.degrees.contains(&p)
    }

    pub fn apply(&self, x: &ClassVec) -> Result<ClassVec> {
        if x.n == 0 {
            return Ok(ClassVec::zero(Kind::Cohomology, 0, x.d));
        }
        if !self.defined_on(x.n) {
            return Err(Error::IndexOutOfRange(format!("Δ on HH^{} needs 𝔻 beyond the truncation", x.n)));
        }
        Ok(match self.blocks.get(&(x.n, x.d)) {
            Some(b) => ClassVec { kind: Kind::Cohomology, n: x.n - 1, d: x.d, coords: b.mul_vec(&x.coords) },
            None => ClassVec::zero(Kind::Cohomology, x.n - 1, x.d),
        })
    }

    pub fn block(&self, p: usize, e: i64) -> Option<&SparseMatrix> {
        self.blocks.get(&(p, e))
    }

    /// Whether `Δ∘Δ = 0` wherever both factors are available.
    pub fn squares_to_zero(&self) -> bool {
        self.blocks.iter().all(|(&(p, e), a)| match self.blocks.get(&(p - 1, e)) {
            Some(b) => b.mul(a).is_zero(),
            None => true,
        })
    }

    /// `Δ(a∪b) - Δ(a)∪b - (-1)^{|a|} a∪Δ(b)`.
    pub fn bv_bracket(&self, pair: &ChainComplexPair, a: &ClassVec, b: &ClassVec) -> Result<ClassVec> {
        let mut out = self.apply(&pair.cup_class(a, b)?)?;
        let da = self.apply(a)?;
        let db = self.apply(b)?;
        let t1 = if a.n == 0 { ClassVec::zero(Kind::Cohomology, out.n, out.d) } else { pair.cup_class(&da, b)? };
        let t2 = if b.n == 0 { ClassVec::zero(Kind::Cohomology, out.n, out.d) } else { pair.cup_class(a, &db)? };
        let sign = if a.n.is_multiple_of(2) { rat(-1) } else { rat(1) };
        out.coords.axpy(&rat(-1), &t1.coords);
        out.coords.axpy(&sign, &t2.coords);
        Ok(out)
    }
}

/// The class of the derivation scaling every starred arrow by 1, which
/// spans `HH^1(0)`.
pub fn theta0_class(pair: &ChainComplexPair) -> Result<ClassVec> {
    let arrows = &pair.algebra().quiver.arrows;
    let cell = pair.weight_derivation(|a| if arrows[a].starred { rat(1) } else { rat(0) });
    pair.classify(&cell, 0)
}

/// One labeled class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelRecord {
    pub variant: Variant,
    pub family: LabelFamily,
    pub k: i64,
    pub s: i64,
    pub degree: usize,
    pub internal_degree: i64,
}

/// The labeled bases `c_k^{(s)}` and `c_{k,t}` realized as classes.
#[derive(Clone, Debug)]
pub struct LabelAssignment {
    pub h: i64,
    pub m: usize,
    cocycles: BTreeMap<Symbol, ClassVec>,
    cycles: BTreeMap<Symbol, ClassVec>,
    /// Per block, the labels spanning it and the inverse of their matrix.
    bases: BTreeMap<(Kind, usize, i64), (Vec<Symbol>, SparseMatrix)>,
    /// Nonzero reachable blocks that no label reaches.
    pub unlabeled: Vec<(Kind, usize, i64)>,
    pub m_alpha: Vec<Vec<Rational>>,
    pub m_beta: Vec<Vec<Rational>>,
    pub zz: BTreeMap<(i64, i64), SymbolicElement>,
    pub ztheta: BTreeMap<(i64, i64), SymbolicElement>,
    pub zzeta: BTreeMap<(i64, i64), SymbolicElement>,
    pub zpsi: BTreeMap<(i64, i64), SymbolicElement>,
}

struct Labeler<'a> {
    pair: &'a ChainComplexPair,
    cocycles: BTreeMap<Symbol, ClassVec>,
}

impl Labeler<'_> {
    fn single(&self, n: usize, d: i64, what: &str) -> Result<Option<ClassVec>> {
        let basis = self.pair.class_basis(Kind::Cohomology, n, d);
        match basis.len() {
            0 => Ok(None),
            1 => Ok(basis.into_iter().next()),
            k => Err(Error::AmbiguousBlock(format!("{what}: HH^{n}({d}) has dimension {k}"))),
        }
    }

    fn put(&mut self, fam: LabelFamily, k: i64, x: ClassVec) {
        if !x.is_zero() {
            self.cocycles.insert(Symbol::cocycle(fam, k, 0), x);
        }
    }

    fn get(&self, fam: LabelFamily, k: i64) -> Option<&ClassVec> {
        self.cocycles.get(&Symbol::cocycle(fam, k, 0))
    }

    fn family(&self, fam: LabelFamily) -> Vec<(i64, ClassVec)> {
        self.cocycles
            .iter()
            .filter(|(s, _)| s.family == fam && s.shift == 0)
            .map(|(s, x)| (s.k, x.clone()))
            .collect()
    }

    /// Coefficients of `x` along the single class `target`.
    fn ratio(x: &ClassVec, target: &ClassVec) -> Option<Rational> {
        let i = target.coords.leading()?;
        let c = x.coords.get(i) / target.coords.get(i);
        (x.coords == target.coords.scaled(&c)).then_some(c)
    }

    /// The basis `y'` of a block with `pairing(x_k, y'_l) = δ_kl · unit`.
    fn dual_basis(
        &self,
        xs: &[(i64, ClassVec)],
        n: usize,
        d: i64,
        unit: &ClassVec,
        what: &str,
    ) -> Result<Vec<ClassVec>> {
        let ys = self.pair.class_basis(Kind::Cohomology, n, d);
        if ys.len() != xs.len() {
            return Err(Error::NoSolution(format!(
                "{what}: {} classes against a block of dimension {}",
                xs.len(),
                ys.len()
            )));
        }
        // P[k][j] = coefficient of unit in x_k ∪ y_j
        let mut p = vec![vec![Rational::zero(); ys.len()]; xs.len()];
        for (k, (_, x)) in xs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                let c = self.pair.cup_class(x, y)?;
                p[k][j] = Self::ratio(&c, unit)
                    .ok_or_else(|| Error::NoSolution(format!("{what}: product leaves the line of {what}")))?;
            }
        }
        // y'_l = Σ_j Q[j][l] y_j with P Q = 1
        let q = inverse(&SparseMatrix::from_dense(&p))
            .ok_or_else(|| Error::NoSolution(format!("{what}: pairing is degenerate")))?;
        Ok((0..ys.len())
            .map(|l| {
                let mut coords = SparseVec::new();
                for (j, _) in ys.iter().enumerate() {
                    coords.axpy(&q.get(j, l), &SparseVec::unit(j));
                }
                ClassVec { kind: Kind::Cohomology, n, d, coords }
            })
            .collect())
    }
}

impl LabelAssignment {
    /// Labels every reachable class of `pair`, matching cycles through `duality`.
    pub fn assign(pair: &ChainComplexPair, duality: &DualityMap) -> Result<Self> {
        use LabelFamily::*;
        let h = pair.h() as i64;
        let top = pair.max_degree().saturating_sub(1);
        let mut lab = Labeler { pair, cocycles: BTreeMap::new() };

        let unit = pair.classify(&pair.unit_cocycle(), 0)?;
        lab.put(Z, 0, unit);
        for d in pair.nonzero_degrees(Kind::Cohomology, 0) {
            if d > 0 && d < h - 2 {
                if let Some(x) = lab.single(0, d, "z")? {
                    lab.put(Z, d, x);
                }
            }
        }
        for (k, x) in pair.class_basis(Kind::Cohomology, 0, h - 2).into_iter().enumerate() {
            lab.put(Omega, k as i64, x);
        }
        if top >= 1 {
            let theta0 = theta0_class(pair)?;
            for (k, z) in lab.family(Z) {
                let t = pair.cup_class(&z, &theta0)?;
                lab.put(Theta, k, t);
            }
        }
        if top >= 2 {
            for (k, x) in pair.class_basis(Kind::Cohomology, 2, -2).into_iter().enumerate() {
                lab.put(F, k as i64, x);
            }
        }
        if top >= 4 {
            for d in pair.nonzero_degrees(Kind::Cohomology, 4) {
                if let Some(x) = lab.single(4, d, "zeta")? {
                    lab.put(Zeta, -d - 4, x);
                }
            }
        }
        if top >= 5 {
            if let Some(theta0) = lab.get(Theta, 0).cloned() {
                for (k, z) in lab.family(Zeta) {
                    let p = pair.cup_class(&theta0, &z)?;
                    lab.put(Psi, k, p);
                }
            }
            let psi0 = lab.get(Psi, 0).cloned();
            let fs = lab.family(F);
            if let (Some(psi0), true, true) = (&psi0, top >= 3, !fs.is_empty()) {
                for (l, y) in lab.dual_basis(&fs, 3, -2, psi0, "h")?.into_iter().enumerate() {
                    lab.put(H, l as i64, y);
                }
            }
            let omegas = lab.family(Omega);
            if let (Some(psi0), false) = (&psi0, omegas.is_empty()) {
                if pair.hh_dim(Kind::Cohomology, 5, -h - 2) > 0 {
                    for (l, y) in lab.dual_basis(&omegas, 5, -h - 2, psi0, "epsilon")?.into_iter().enumerate() {
                        lab.put(Epsilon, l as i64, y);
                    }
                }
            }
        }

        // shifted cocycles
        let mut cocycles = lab.cocycles.clone();
        let zp = if top >= 6 { lab.single(6, -2 * h, "z_0^(1)")? } else { None };
        if let Some(zp) = &zp {
            let mut current: Vec<(Symbol, ClassVec)> = lab.cocycles.iter().map(|(s, x)| (*s, x.clone())).collect();
            // ω^{(s)}, s ≥ 1, spans Y = HH^6(-h-2) rather than z^{(1)} ∪ L
            let y_block = pair.class_basis(Kind::Cohomology, 6, -h - 2);
            let mut s = 1;
            while !current.is_empty() {
                let mut next = Vec::new();
                for (sym, x) in &current {
                    if x.n + 6 > top {
                        continue;
                    }
                    let shifted = if sym.family == Omega && s == 1 {
                        match y_block.get(sym.k as usize) {
                            Some(y) => y.clone(),
                            None => continue,
                        }
                    } else {
                        pair.cup_class(zp, x)?
                    };
                    if !shifted.is_zero() {
                        next.push((sym.with_shift(s), shifted));
                    }
                }
                for (sym, x) in &next {
                    cocycles.insert(*sym, x.clone());
                }
                current = next;
                s += 1;
            }
        }

        // cycles through 𝔻
        let m = duality.m as i64;
        let mut cycles = BTreeMap::new();
        for (sym, x) in &cocycles {
            if duality.covers_cohomology(x.n) {
                let c = duality.apply_inverse(x)?;
                let t = sym.to_cycle(m);
                if t.shift >= 0 && !c.is_zero() {
                    cycles.insert(t, c);
                }
            }
        }

        // spanning check per block
        let mut bases = BTreeMap::new();
        let mut unlabeled = Vec::new();
        for (kind, labels) in [(Kind::Cohomology, &cocycles), (Kind::Homology, &cycles)] {
            let mut per_block: BTreeMap<(usize, i64), Vec<(Symbol, &ClassVec)>> = BTreeMap::new();
            for (s, x) in labels.iter() {
                per_block.entry((x.n, x.d)).or_default().push((*s, x));
            }
            for n in 0..=top {
                for d in pair.nonzero_degrees(kind, n) {
                    let dim = pair.hh_dim(kind, n, d);
                    let Some(items) = per_block.get(&(n, d)) else {
                        unlabeled.push((kind, n, d));
                        continue;
                    };
                    let cols: Vec<SparseVec> = items.iter().map(|(_, x)| x.coords.clone()).collect();
                    let mat = SparseMatrix::from_columns(dim, &cols);
                    match inverse(&mat) {
                        Some(inv) => {
                            bases.insert((kind, n, d), (items.iter().map(|(s, _)| *s).collect(), inv));
                        }
                        None => unlabeled.push((kind, n, d)),
                    }
                }
            }
        }

        let mut out = Self {
            h,
            m: duality.m,
            cocycles,
            cycles,
            bases,
            unlabeled,
            m_alpha: Vec::new(),
            m_beta: Vec::new(),
            zz: BTreeMap::new(),
            ztheta: BTreeMap::new(),
            zzeta: BTreeMap::new(),
            zpsi: BTreeMap::new(),
        };
        out.extract_constants(pair)?;
        Ok(out)
    }

    fn extract_constants(&mut self, pair: &ChainComplexPair) -> Result<()> {
        use LabelFamily::*;
        let top = pair.max_degree().saturating_sub(1);
        let fam = |me: &Self, f: LabelFamily| -> Vec<(i64, ClassVec)> {
            me.cocycles.iter().filter(|(s, _)| s.family == f && s.shift == 0).map(|(s, x)| (s.k, x.clone())).collect()
        };
        let zs = fam(self, Z);
        let mut tables = [BTreeMap::new(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
        for (slot, g) in [Z, Theta, Zeta, Psi].into_iter().enumerate() {
            for (k, z) in &zs {
                for (l, y) in fam(self, g) {
                    if y.n > top {
                        continue;
                    }
                    let prod = pair.cup_class(z, &y)?;
                    if let Some(e) = self.express_opt(&prod)? {
                        tables[slot].insert((*k, l), e);
                    }
                }
            }
        }
        let [zz, ztheta, zzeta, zpsi] = tables;
        (self.zz, self.ztheta, self.zzeta, self.zpsi) = (zz, ztheta, zzeta, zpsi);

        let theta0 = self.cocycles.get(&Symbol::cocycle(Theta, 0, 0)).cloned();
        if let Some(theta0) = theta0 {
            let hs = fam(self, H).len();
            if top >= 3 && hs > 0 {
                self.m_alpha = self.pairing_matrix(pair, &theta0, F, H, 0)?;
            }
            let omegas = self.cocycles.keys().filter(|s| s.family == Omega && s.shift == 1).count();
            if top >= 6 && omegas > 0 {
                self.m_beta = self.pairing_matrix(pair, &theta0, Epsilon, Omega, 1)?;
            }
        }
        Ok(())
    }

    /// `θ_0 ∪ x_k = Σ_l M[k][l] y_l^{(shift)}`.
    fn pairing_matrix(
        &self,
        pair: &ChainComplexPair,
        theta0: &ClassVec,
        from: LabelFamily,
        to: LabelFamily,
        shift: i64,
    ) -> Result<Vec<Vec<Rational>>> {
        let xs: Vec<(i64, ClassVec)> = self
            .cocycles
            .iter()
            .filter(|(s, _)| s.family == from && s.shift == 0)
            .map(|(s, x)| (s.k, x.clone()))
            .collect();
        let ys: Vec<i64> =
            self.cocycles.keys().filter(|s| s.family == to && s.shift == shift).map(|s| s.k).collect();
        let mut m = vec![vec![Rational::zero(); ys.len()]; xs.len()];
        for (i, (_, x)) in xs.iter().enumerate() {
            let e = self.express(&pair.cup_class(theta0, x)?)?;
            for (j, l) in ys.iter().enumerate() {
                m[i][j] = e.coefficient(&Symbol::cocycle(to, *l, shift));
            }
        }
        Ok(m)
    }

    pub fn cocycle(&self, s: &Symbol) -> Option<&ClassVec> {
        self.cocycles.get(s)
    }

    pub fn cycle(&self, s: &Symbol) -> Option<&ClassVec> {
        self.cycles.get(s)
    }

    pub fn class_of(&self, s: &Symbol) -> Option<&ClassVec> {
        match s.variant {
            Variant::Cocycle => self.cocycles.get(s),
            Variant::Cycle => self.cycles.get(s),
        }
    }

    pub fn cocycles(&self) -> impl Iterator<Item = (&Symbol, &ClassVec)> {
        self.cocycles.iter()
    }

    pub fn cycles(&self) -> impl Iterator<Item = (&Symbol, &ClassVec)> {
        self.cycles.iter()
    }

    /// Whether the block is spanned by labels.
    pub fn is_labeled(&self, kind: Kind, n: usize, d: i64) -> bool {
        self.bases.contains_key(&(kind, n, d))
    }

    fn express_opt(&self, x: &ClassVec) -> Result<Option<SymbolicElement>> {
        if x.is_zero() {
            return Ok(Some(SymbolicElement::zero()));
        }
        let Some((syms, inv)) = self.bases.get(&(x.kind, x.n, x.d)) else {
            return Ok(None);
        };
        let coeffs = inv.mul_vec(&x.coords);
        let mut out = SymbolicElement::zero();
        for (i, c) in coeffs.iter() {
            out.add_term(c, syms[i]);
        }
        Ok(Some(out))
    }

    /// Coordinates of `x` in the labeled basis of its block.
    pub fn express(&self, x: &ClassVec) -> Result<SymbolicElement> {
        self.express_opt(x)?.ok_or_else(|| {
            let key = block_key(x.kind, x.n, x.d);
            Error::UnknownSymbol(format!("{key} is not spanned by labels"))
        })
    }

    /// The class of a symbolic combination; symbols without a class must
    /// sit in a zero block, otherwise the result is `None`.
    pub fn realize(&self, e: &SymbolicElement, pair: &ChainComplexPair, kind: Kind, n: usize, d: i64) -> Option<ClassVec> {
        let mut out = ClassVec::zero(kind, n, d);
        for (s, c) in e.terms() {
            match self.class_of(s) {
                Some(x) if (x.n, x.d) == (n, d) => out.coords.axpy(c, &x.coords),
                Some(_) => return None,
                None => {
                    let deg = s.degree();
                    let zero_block = deg < 0
                        || (deg as usize) >= pair.max_degree()
                        || pair.hh_dim(kind, deg as usize, s.internal_degree(self.h)) == 0;
                    if !zero_block {
                        return None;
                    }
                }
            }
        }
        Some(out)
    }

    /// Metadata for the symbolic tables, taken from the engine.
    pub fn metadata(&self) -> Result<TypeMetadata> {
        let mut indices: BTreeMap<LabelFamily, Vec<i64>> = BTreeMap::new();
        for s in self.cocycles.keys().chain(self.cycles.keys()) {
            let v = indices.entry(s.family).or_default();
            if !v.contains(&s.k) {
                v.push(s.k);
            }
        }
        for v in indices.values_mut() {
            v.sort_unstable();
        }
        TypeMetadata::new(
            self.h,
            indices,
            self.zz.clone(),
            self.ztheta.clone(),
            self.zzeta.clone(),
            self.zpsi.clone(),
            self.m_alpha.clone(),
            self.m_beta.clone(),
        )
    }

    pub fn records(&self) -> Vec<LabelRecord> {
        self.cocycles
            .iter()
            .chain(self.cycles.iter())
            .map(|(s, x)| LabelRecord {
                variant: s.variant,
                family: s.family,
                k: s.k,
                s: s.shift,
                degree: x.n,
                internal_degree: x.d,
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "h": self.h,
            "m": self.m,
            "labels": self.records(),
            "unlabeled": self.unlabeled.iter().map(|(k, n, d)| block_key(*k, *n, *d)).collect::<Vec<_>>(),
            "m_alpha": self.m_alpha.iter().map(|r| r.iter().map(crate::linalg::fmt_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "m_beta": self.m_beta.iter().map(|r| r.iter().map(crate::linalg::fmt_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PreprojectiveAlgebra;
    use crate::quiver::{DoubleQuiver, QuiverType};
    use std::sync::Arc;

    fn pair(ty: QuiverType, n: usize) -> ChainComplexPair {
        let alg = Arc::new(PreprojectiveAlgebra::build(&DoubleQuiver::canonical(ty)).unwrap());
        ChainComplexPair::build(alg, n).unwrap()
    }

    fn unit(p: &ChainComplexPair) -> ClassVec {
        p.classify(&p.unit_cocycle(), 0).unwrap()
    }

    #[test]
    fn a2_basic_labels() {
        let p = pair(QuiverType::a(2), 8);
        let dm = DualityMap::build(&p, 1).unwrap();
        let labels = LabelAssignment::assign(&p, &dm).unwrap();
        let z0 = labels.cocycle(&Symbol::cocycle(LabelFamily::Z, 0, 0)).unwrap();
        assert_eq!(z0.coords, unit(&p).coords);
        let t0 = labels.cocycle(&Symbol::cocycle(LabelFamily::Theta, 0, 0)).unwrap();
        assert_eq!(t0.coords, theta0_class(&p).unwrap().coords);
        assert_eq!(p.class_basis(Kind::Cohomology, 1, 0).len(), 1);
        assert!(labels.cocycles().all(|(s, _)| s.family != LabelFamily::Omega));
        assert!(labels.m_alpha.is_empty() || labels.m_alpha == vec![vec![rat(1)]]);
    }

    #[test]
    fn a3_alpha_matrix() {
        let p = pair(QuiverType::a(3), 8);
        let dm = DualityMap::build(&p, 1).unwrap();
        let labels = LabelAssignment::assign(&p, &dm).unwrap();
        assert_eq!(labels.m_alpha, vec![vec![rat(-2)]]);
        assert!(labels.m_beta.is_empty());
    }

    #[test]
    fn duality_domain_and_intertwining() {
        let p = pair(QuiverType::a(2), 8);
        let dm = DualityMap::build(&p, 1).unwrap();
        assert_eq!(dm.period(), 8);
        assert_eq!(dm.domain(), 1..=7);
        let (cases, bad) = dm.check_intertwining(&p).unwrap();
        assert!(cases > 0);
        assert!(bad.is_empty());
        for ((n, d), _) in dm.blocks() {
            for c in p.class_basis(Kind::Homology, *n, *d) {
                let x = dm.apply(&c).unwrap();
                assert_eq!(dm.apply_inverse(&x).unwrap().coords, c.coords);
            }
        }
    }

    #[test]
    fn duality_needs_deep_truncation() {
        let p = pair(QuiverType::a(2), 2);
        assert!(matches!(DualityMap::build(&p, 1), Err(Error::TruncationTooShallow { .. })));
    }

    #[test]
    fn bv_operator_on_a2() {
        let p = pair(QuiverType::a(2), 8);
        let dm = DualityMap::build(&p, 1).unwrap();
        let bv = BVOperator::build(&p, &dm).unwrap();
        assert!(bv.squares_to_zero());
        assert!(bv.apply(&unit(&p)).unwrap().is_zero());
        for d in p.nonzero_degrees(Kind::Cohomology, 4) {
            for x in p.class_basis(Kind::Cohomology, 4, d) {
                assert!(bv.apply(&x).unwrap().is_zero());
            }
        }
        assert!(!bv.defined_on(1));
        assert!(bv.apply(&theta0_class(&p).unwrap()).is_err());
    }

    #[test]
    fn bv_operator_period_zero() {
        let p = pair(QuiverType::a(2), 8);
        let dm = DualityMap::build(&p, 0).unwrap();
        assert_eq!(dm.domain(), 1..=2);
        let bv = BVOperator::build(&p, &dm).unwrap();
        let t = bv.apply(&theta0_class(&p).unwrap()).unwrap();
        assert_eq!(t.coords, unit(&p).coords);
    }

    #[test]
    fn express_and_realize_round_trip() {
        let p = pair(QuiverType::a(3), 8);
        let dm = DualityMap::build(&p, 1).unwrap();
        let labels = LabelAssignment::assign(&p, &dm).unwrap();
        for (_, c) in labels.cocycles().chain(labels.cycles()) {
            let e = labels.express(c).unwrap();
            assert_eq!(e.len(), 1);
            let back = labels.realize(&e, &p, c.kind, c.n, c.d).unwrap();
            assert_eq!(back.coords, c.coords);
        }
    }

    #[test]
    fn label_json_export() {
        let p = pair(QuiverType::a(2), 8);
        let dm = DualityMap::build(&p, 1).unwrap();
        let labels = LabelAssignment::assign(&p, &dm).unwrap();
        let j = labels.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, j);
        assert!(!labels.records().is_empty());
        assert!(labels.records().iter().any(|r| r.family == LabelFamily::Theta && r.k == 0 && r.s == 0));
    }
}
