//! Cross-validation of the chain-level engine against the calculus axioms,
//! the dimension theorems and the closed-form tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hochschild::{ChainComplexPair, ClassVec, Kind};
use crate::linalg::{fmt_rational, frac, rat, Rational};
use crate::structure::{theta0_class, BVOperator, DualityMap, LabelAssignment};
use crate::tables::{self, erratum_for, Symbol, SymbolicElement, Table, Tables, TypeMetadata};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }
}

/// A nonzero class witnessing a failed identity, with a representative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    pub kind: Option<Kind>,
    pub n: usize,
    pub d: i64,
    /// Coordinates of `lhs - rhs` in the homology basis of its block.
    pub coords: Vec<(usize, String)>,
    /// The same difference as a chain or cochain.
    pub representative: Vec<(usize, String)>,
}

impl Witness {
    fn note(description: String) -> Self {
        Self { description, kind: None, n: 0, d: 0, coords: Vec::new(), representative: Vec::new() }
    }

    fn class(description: String, pair: &ChainComplexPair, diff: &ClassVec) -> Self {
        let cell = pair.lift(diff);
        let show = |v: &crate::linalg::SparseVec| v.iter().map(|(i, c)| (i, fmt_rational(c))).collect();
        Self {
            description,
            kind: Some(diff.kind),
            n: diff.n,
            d: diff.d,
            coords: show(&diff.coords),
            representative: show(&cell.vec),
        }
    }

    /// Re-derives, by an exact solve, that the recorded representative is a
    /// (co)cycle that is not a (co)boundary.
    pub fn reverify(&self, pair: &ChainComplexPair) -> Option<bool> {
        let kind = self.kind?;
        let mut v = crate::linalg::SparseVec::new();
        for (i, c) in &self.representative {
            v.axpy(&crate::linalg::parse_rational(c)?, &crate::linalg::SparseVec::unit(*i));
        }
        let cell = crate::hochschild::Cell { kind, n: self.n, vec: v };
        if !pair.is_cycle(&cell) {
            return Some(false);
        }
        Some(pair.boundary_preimage(&cell).ok()?.is_none())
    }
}

const MAX_WITNESSES: usize = 8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    /// Cases evaluated.
    pub cases: usize,
    /// Cases needing degrees beyond the truncation.
    pub skipped: usize,
    pub failures: usize,
    pub detail: String,
    pub witnesses: Vec<Witness>,
}

impl CheckResult {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Skipped,
            cases: 0,
            skipped: 0,
            failures: 0,
            detail: String::new(),
            witnesses: Vec::new(),
        }
    }

    fn fail(&mut self, w: Witness) {
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    fn absorb(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Ok => self.cases += 1,
            Outcome::Skip => self.skipped += 1,
            Outcome::Bad(w) => {
                self.cases += 1;
                self.fail(w);
            }
        }
    }

    fn finish(mut self) -> Self {
        self.status = if self.failures > 0 {
            Status::Fail
        } else if self.cases == 0 {
            Status::Skipped
        } else {
            Status::Pass
        };
        self
    }

    fn errored(name: impl Into<String>, err: &Error) -> Self {
        let mut c = Self::new(name);
        match err {
            Error::TruncationTooShallow { .. } | Error::IndexOutOfRange(_) => {
                c.skipped = 1;
                c.detail = err.to_string();
            }
            _ => c.fail(Witness::note(err.to_string())),
        }
        c.finish()
    }
}

enum Outcome {
    Ok,
    Skip,
    Bad(Witness),
}

/// A table cell whose printed value disagrees with the engine while the
/// value derived in the accompanying text agrees.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExplainedCell {
    pub table: Table,
    pub a: String,
    pub b: String,
    pub printed: String,
    pub engine: String,
    pub note: String,
}

/// A sign convention separating the engine from a table, applied uniformly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Convention {
    pub table: Table,
    pub rule: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub quiver_type: String,
    pub max_degree: usize,
    pub m: usize,
    pub checks: Vec<CheckResult>,
    pub conventions: Vec<Convention>,
    pub explained: Vec<ExplainedCell>,
}

impl VerificationReport {
    pub fn new(quiver_type: impl Into<String>, max_degree: usize, m: usize) -> Self {
        Self {
            quiver_type: quiver_type.into(),
            max_degree,
            m,
            checks: Vec::new(),
            conventions: Vec::new(),
            explained: Vec::new(),
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        // one entry per table
        for c in other.conventions {
            match self.conventions.iter_mut().find(|x| x.table == c.table) {
                Some(x) => x.rule = format!("{}; {}", x.rule, c.rule),
                None => self.conventions.push(c),
            }
        }
        self.explained.extend(other.explained);
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verification of {} with N = {}, m = {}", self.quiver_type, self.max_degree, self.m);
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        for c in &self.checks {
            let pad = width - c.name.chars().count();
            let _ = write!(
                s,
                "  {}  {}{}  {} cases, {} skipped, {} failed",
                c.status.label(),
                c.name,
                " ".repeat(pad),
                c.cases,
                c.skipped,
                c.failures
            );
            if !c.detail.is_empty() {
                let _ = write!(s, "  ({})", c.detail);
            }
            s.push('\n');
            for w in &c.witnesses {
                let _ = writeln!(s, "        witness: {}", w.description);
            }
        }
        for c in &self.conventions {
            let _ = writeln!(s, "  convention [{}]: {}", c.table, c.rule);
        }
        for e in &self.explained {
            let _ = writeln!(
                s,
                "  erratum [{}] ({}, {}): printed {}, engine {}: {}",
                e.table, e.a, e.b, e.printed, e.engine, e.note
            );
        }
        let _ = writeln!(
            s,
            "summary: {} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        );
        s
    }
}

/// Deliberate corruption of one engine operation, used to exercise the
/// failure path of the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    BracketSign,
    ContractionSign,
    CupSign,
}

impl std::str::FromStr for Fault {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bracket-sign" => Ok(Fault::BracketSign),
            "contraction-sign" => Ok(Fault::ContractionSign),
            "cup-sign" => Ok(Fault::CupSign),
            _ => Err(Error::Parse(format!("unknown fault {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Period index of the duality used for labels and tables.
    pub m: usize,
    /// Period indices for the duality and BV checks.
    pub periods: Vec<usize>,
    pub threads: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { m: 1, periods: vec![0, 1], threads: 1, fault: None }
    }
}

/// Class-level operations, optionally corrupted.
struct Ops<'a> {
    pair: &'a ChainComplexPair,
    fault: Option<Fault>,
}

impl Ops<'_> {
    fn flip(&self, f: Fault, x: ClassVec) -> ClassVec {
        if self.fault == Some(f) && x.n % 2 == 1 {
            x.scaled(&rat(-1))
        } else {
            x
        }
    }

    fn reach(&self, n: i64) -> bool {
        n >= 0 && (n as usize) < self.pair.max_degree()
    }

    fn cup(&self, a: &ClassVec, b: &ClassVec) -> Result<ClassVec> {
        Ok(self.flip(Fault::CupSign, self.pair.cup_class(a, b)?))
    }

    /// `None` when the bracket would land in degree −1.
    fn bracket(&self, a: &ClassVec, b: &ClassVec) -> Result<Option<ClassVec>> {
        if a.n + b.n == 0 {
            return Ok(None);
        }
        let x = self.pair.bracket_class(a, b)?;
        Ok(Some(if self.fault == Some(Fault::BracketSign) { x.scaled(&rat(-1)) } else { x }))
    }

    /// `None` when `|a| > |c|`.
    fn contract(&self, a: &ClassVec, c: &ClassVec) -> Result<Option<ClassVec>> {
        if a.n > c.n {
            return Ok(None);
        }
        let x = self.pair.contract_class(a, c)?;
        Ok(Some(if self.fault == Some(Fault::ContractionSign) && a.n % 2 == 1 { x.scaled(&rat(-1)) } else { x }))
    }

    /// `None` when `|a| > |c| + 1`.
    fn lie(&self, a: &ClassVec, c: &ClassVec) -> Result<Option<ClassVec>> {
        if a.n > c.n + 1 {
            return Ok(None);
        }
        self.pair.lie_class(a, c).map(Some)
    }

    fn connes(&self, c: &ClassVec) -> Result<ClassVec> {
        self.pair.connes_class(c)
    }
}

/// Accumulates `Σ ±x` in one block, ignoring absent terms.
struct Sum {
    acc: ClassVec,
}

impl Sum {
    fn new(kind: Kind, n: usize, d: i64) -> Self {
        Self { acc: ClassVec::zero(kind, n, d) }
    }

    fn add(&mut self, c: i64, x: Option<&ClassVec>) {
        if let Some(x) = x {
            if x.is_zero() {
                return;
            }
            debug_assert_eq!((x.kind, x.n, x.d), (self.acc.kind, self.acc.n, self.acc.d), "terms in different blocks");
            self.acc.coords.axpy(&rat(c), &x.coords);
        }
    }
}

fn sign(parity: usize) -> i64 {
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn all_classes(pair: &ChainComplexPair, kind: Kind) -> Vec<ClassVec> {
    let mut out = Vec::new();
    for n in 0..pair.max_degree() {
        for d in pair.nonzero_degrees(kind, n) {
            out.extend(pair.class_basis(kind, n, d));
        }
    }
    out
}

fn name(x: &ClassVec) -> String {
    let idx = x.coords.leading().unwrap_or(0);
    match x.kind {
        Kind::Homology => format!("HH_{}({})#{}", x.n, x.d, idx),
        Kind::Cohomology => format!("HH^{}({})#{}", x.n, x.d, idx),
    }
}

fn judge(pair: &ChainComplexPair, what: impl FnOnce() -> String, diff: &ClassVec) -> Outcome {
    if diff.is_zero() {
        Outcome::Ok
    } else {
        Outcome::Bad(Witness::class(what(), pair, diff))
    }
}

fn run<T: Sync>(
    cases: &[T],
    f: impl Fn(&T) -> Result<Outcome> + Sync + Send,
) -> Vec<Outcome> {
    cases
        .par_iter()
        .map(|c| match f(c) {
            Ok(o) => o,
            Err(Error::TruncationTooShallow { .. }) => Outcome::Skip,
            Err(e) => Outcome::Bad(Witness::note(e.to_string())),
        })
        .collect()
}

fn gather(name: &str, outcomes: Vec<Outcome>) -> CheckResult {
    let mut c = CheckResult::new(name);
    for o in outcomes {
        c.absorb(o);
    }
    c.finish()
}

fn complex_identities(pair: &ChainComplexPair) -> CheckResult {
    let mut c = CheckResult::new("complex identities (b², δ², B², bB+Bb)");
    for id in pair.identity_checks() {
        c.absorb(if id.holds {
            Outcome::Ok
        } else {
            Outcome::Bad(Witness::note(format!("{} ≠ 0 on block n={}, d={}", id.identity, id.n, id.d)))
        });
    }
    c.finish()
}

fn leibniz(ops: &Ops, coh: &[ClassVec]) -> CheckResult {
    let triples: Vec<(usize, usize, usize)> = (0..coh.len())
        .flat_map(|i| (0..coh.len()).flat_map(move |j| (0..coh.len()).map(move |k| (i, j, k))))
        .collect();
    let out = run(&triples, |&(i, j, k)| {
        let (a, b, c) = (&coh[i], &coh[j], &coh[k]);
        let (p, q, r) = (a.n, b.n, c.n);
        if p + q + r == 0 {
            return Ok(Outcome::Ok);
        }
        if !ops.reach((q + r) as i64) || !ops.reach((p + q + r - 1) as i64) {
            return Ok(Outcome::Skip);
        }
        // [a, b∪c] = [a,b]∪c + (-1)^{q(p-1)} b∪[a,c]
        let mut s = Sum::new(Kind::Cohomology, p + q + r - 1, a.d + b.d + c.d);
        let bc = ops.cup(b, c)?;
        s.add(1, ops.bracket(a, &bc)?.as_ref());
        if let Some(ab) = ops.bracket(a, b)? {
            s.add(-1, Some(&ops.cup(&ab, c)?));
        }
        if let Some(ac) = ops.bracket(a, c)? {
            s.add(-sign(q * (p + 1)), Some(&ops.cup(b, &ac)?));
        }
        Ok(judge(ops.pair, || format!("[{0}, {1}∪{2}] ≠ [{0},{1}]∪{2} ± {1}∪[{0},{2}]", name(a), name(b), name(c)), &s.acc))
    });
    gather("Leibniz rule", out)
}

fn triples_with_chain(coh: &[ClassVec], hom: &[ClassVec]) -> Vec<(usize, usize, usize)> {
    (0..coh.len())
        .flat_map(|i| (0..coh.len()).flat_map(move |j| (0..hom.len()).map(move |k| (i, j, k))))
        .collect()
}

/// `ι_a L_b - (-1)^{p(q+1)} L_b ι_a = ι_{[a,b]}`.
fn precalculus_bracket(ops: &Ops, coh: &[ClassVec], hom: &[ClassVec]) -> CheckResult {
    let cases = triples_with_chain(coh, hom);
    let out = run(&cases, |&(i, j, k)| {
        let (a, b, c) = (&coh[i], &coh[j], &hom[k]);
        let (p, q, m) = (a.n as i64, b.n as i64, c.n as i64);
        let target = m + 1 - p - q;
        if target < 0 {
            return Ok(Outcome::Ok);
        }
        if !ops.reach(m + 1 - q) || !ops.reach(p + q - 1) {
            return Ok(Outcome::Skip);
        }
        let mut s = Sum::new(Kind::Homology, target as usize, a.d + b.d + c.d);
        if let Some(lb) = ops.lie(b, c)? {
            s.add(1, ops.contract(a, &lb)?.as_ref());
        }
        if let Some(ia) = ops.contract(a, c)? {
            s.add(-sign((p * (q + 1)) as usize), ops.lie(b, &ia)?.as_ref());
        }
        if let Some(ab) = ops.bracket(a, b)? {
            s.add(-1, ops.contract(&ab, c)?.as_ref());
        }
        Ok(judge(ops.pair, || format!("ι_a L_b ∓ L_b ι_a ≠ ι_[a,b] for a={}, b={}, c={}", name(a), name(b), name(c)), &s.acc))
    });
    gather("precalculus: ι_[a,b] = [ι_a, L_b]", out)
}

/// `L_{a∪b} = L_a ι_b + (-1)^p ι_a L_b`.
fn precalculus_cup(ops: &Ops, coh: &[ClassVec], hom: &[ClassVec]) -> CheckResult {
    let cases = triples_with_chain(coh, hom);
    let out = run(&cases, |&(i, j, k)| {
        let (a, b, c) = (&coh[i], &coh[j], &hom[k]);
        let (p, q, m) = (a.n as i64, b.n as i64, c.n as i64);
        let target = m + 1 - p - q;
        if target < 0 {
            return Ok(Outcome::Ok);
        }
        if !ops.reach(p + q) || !ops.reach(m + 1 - q) {
            return Ok(Outcome::Skip);
        }
        let mut s = Sum::new(Kind::Homology, target as usize, a.d + b.d + c.d);
        let ab = ops.cup(a, b)?;
        s.add(1, ops.lie(&ab, c)?.as_ref());
        if let Some(ib) = ops.contract(b, c)? {
            s.add(-1, ops.lie(a, &ib)?.as_ref());
        }
        if let Some(lb) = ops.lie(b, c)? {
            s.add(-sign(p as usize), ops.contract(a, &lb)?.as_ref());
        }
        Ok(judge(ops.pair, || format!("L_(a∪b) ≠ L_a ι_b ± ι_a L_b for a={}, b={}, c={}", name(a), name(b), name(c)), &s.acc))
    });
    gather("precalculus: L_(a∪b) = L_a ι_b + (-1)^|a| ι_a L_b", out)
}

/// `L_a = B ι_a - (-1)^{|a|} ι_a B`.
fn cartan(ops: &Ops, coh: &[ClassVec], hom: &[ClassVec]) -> CheckResult {
    let cases: Vec<(usize, usize)> = (0..coh.len()).flat_map(|i| (0..hom.len()).map(move |k| (i, k))).collect();
    let out = run(&cases, |&(i, k)| {
        let (a, c) = (&coh[i], &hom[k]);
        let (p, m) = (a.n as i64, c.n as i64);
        let target = m + 1 - p;
        if target < 0 {
            return Ok(Outcome::Ok);
        }
        if !ops.reach(m + 1) {
            return Ok(Outcome::Skip);
        }
        let mut s = Sum::new(Kind::Homology, target as usize, a.d + c.d);
        s.add(1, ops.lie(a, c)?.as_ref());
        if let Some(ia) = ops.contract(a, c)? {
            s.add(-1, Some(&ops.connes(&ia)?));
        }
        let bc = ops.connes(c)?;
        s.add(sign(p as usize), ops.contract(a, &bc)?.as_ref());
        Ok(judge(ops.pair, || format!("L_a ≠ Bι_a ∓ ι_aB for a={}, c={}", name(a), name(c)), &s.acc))
    });
    gather("Cartan: L_a = Bι_a - (-1)^|a| ι_aB", out)
}

/// `L_{θ_0}(x) = (deg x / 2) x`.
fn lemma_theta0(ops: &Ops, hom: &[ClassVec]) -> CheckResult {
    let theta0 = match theta0_class(ops.pair) {
        Ok(t) => t,
        Err(e) => return CheckResult::errored("L_θ0(x) = deg(x)/2 · x", &e),
    };
    let out = run(hom, |x| {
        let mut s = Sum::new(Kind::Homology, x.n, x.d);
        s.add(1, ops.lie(&theta0, x)?.as_ref());
        s.acc.coords.axpy(&-frac(x.d, 2), &x.coords);
        Ok(judge(ops.pair, || format!("L_θ0({}) ≠ {}/2 · x", name(x), x.d), &s.acc))
    });
    gather("L_θ0(x) = deg(x)/2 · x", out)
}

type Graded = BTreeMap<i64, usize>;

fn graded(pair: &ChainComplexPair, kind: Kind, n: usize) -> Graded {
    pair.nonzero_degrees(kind, n).into_iter().map(|d| (d, pair.hh_dim(kind, n, d))).collect()
}

fn shift(v: &Graded, k: i64) -> Graded {
    v.iter().map(|(d, n)| (d + k, *n)).collect()
}

fn dual(v: &Graded) -> Graded {
    v.iter().map(|(d, n)| (-d, *n)).collect()
}

fn sum(a: &Graded, b: &Graded) -> Graded {
    let mut out = a.clone();
    for (d, n) in b {
        *out.entry(*d).or_default() += n;
    }
    out
}

/// Dimension patterns of the (co)homology: the decompositions into
/// `U, L, K, Y` and the 6-periodicity up to a shift by `2h`.
fn dimension_checks(pair: &ChainComplexPair) -> Vec<CheckResult> {
    let h = pair.h() as i64;
    let top = pair.max_degree() - 1;
    let hh0 = graded(pair, Kind::Cohomology, 0);
    let u: Graded = hh0.iter().filter(|(d, _)| **d < h - 2).map(|(d, n)| (d + 2, *n)).collect();
    let l: Graded = hh0.get(&(h - 2)).map(|n| (0, *n)).into_iter().collect();
    let k = if top >= 2 { Some(shift(&graded(pair, Kind::Cohomology, 2), 2)) } else { None };
    let y: Option<Graded> =
        (top >= 6).then(|| [(0, pair.hh_dim(Kind::Cohomology, 6, -h - 2))].into_iter().filter(|x| x.1 > 0).collect());
    let r = pair.algebra().vertex_count();
    let rr: Graded = [(0, r)].into_iter().collect();

    let mut coh_pred: Vec<(usize, Option<Graded>)> = vec![
        (0, Some(sum(&shift(&u, -2), &shift(&l, h - 2)))),
        (1, Some(shift(&u, -2))),
        (3, k.as_ref().map(|k| shift(&dual(k), -2))),
        (4, Some(shift(&dual(&u), -2))),
        (5, y.as_ref().map(|y| sum(&shift(&dual(&u), -2), &shift(&dual(y), -h - 2)))),
        (6, y.as_ref().map(|y| sum(&shift(&u, -2 * h - 2), &shift(y, -h - 2)))),
    ];
    let mut hom_pred: Vec<(usize, Option<Graded>)> = vec![
        (0, Some(rr)),
        (1, Some(u.clone())),
        (2, y.as_ref().map(|y| sum(&u, &shift(y, h)))),
        (3, y.as_ref().map(|y| sum(&shift(&dual(&u), 2 * h), &shift(&dual(y), h)))),
        (4, Some(shift(&dual(&u), 2 * h))),
        (5, k.as_ref().map(|k| shift(k, 2 * h))),
        (6, k.as_ref().map(|k| shift(k, 2 * h))),
    ];
    coh_pred.retain(|(n, _)| *n <= top);
    hom_pred.retain(|(n, _)| *n <= top);

    let mut results = Vec::new();
    for (kind, preds, label) in [
        (Kind::Cohomology, coh_pred, "HH^n decomposition into U, L, K, Y"),
        (Kind::Homology, hom_pred, "HH_n decomposition into R, U, K, Y"),
    ] {
        let mut c = CheckResult::new(label);
        for (n, pred) in preds {
            let Some(pred) = pred else {
                c.skipped += 1;
                continue;
            };
            let actual = graded(pair, kind, n);
            c.absorb(if actual == pred {
                Outcome::Ok
            } else {
                Outcome::Bad(Witness::note(format!("degree {n}: computed {actual:?}, predicted {pred:?}")))
            });
        }
        results.push(c.finish());
    }

    let mut c = CheckResult::new("6-periodicity up to 2h (i ≥ 1)");
    for i in 1..=6usize {
        for n in 1.. {
            let big = 6 * n + i;
            if big > top {
                if big <= top + 6 && n == 1 {
                    c.skipped += 2;
                }
                break;
            }
            let s = 2 * n as i64 * h;
            for (kind, expect) in [
                (Kind::Cohomology, shift(&graded(pair, Kind::Cohomology, i), -s)),
                (Kind::Homology, shift(&graded(pair, Kind::Homology, i), s)),
            ] {
                let actual = graded(pair, kind, big);
                c.absorb(if actual == expect {
                    Outcome::Ok
                } else {
                    Outcome::Bad(Witness::note(format!("{kind:?} {big}: {actual:?} vs shifted degree {i}: {expect:?}")))
                });
            }
        }
    }
    results.push(c.finish());
    results
}

fn intertwining(ops: &Ops, duality: &DualityMap) -> CheckResult {
    let pair = ops.pair;
    let hom: Vec<ClassVec> = duality
        .domain()
        .flat_map(|n| pair.nonzero_degrees(Kind::Homology, n).into_iter().flat_map(move |d| pair.class_basis(Kind::Homology, n, d)))
        .collect();
    let coh = all_classes(pair, Kind::Cohomology);
    let cases: Vec<(usize, usize)> = (0..coh.len()).flat_map(|i| (0..hom.len()).map(move |k| (i, k))).collect();
    let out = run(&cases, |&(i, k)| {
        let (eta, c) = (&coh[i], &hom[k]);
        if eta.n > c.n || !duality.covers(c.n - eta.n) {
            return Ok(Outcome::Skip);
        }
        let dc = duality.apply(c)?;
        if !ops.reach((dc.n + eta.n) as i64) {
            return Ok(Outcome::Skip);
        }
        let lhs = match ops.contract(eta, c)? {
            Some(x) => duality.apply(&x)?,
            None => return Ok(Outcome::Skip),
        };
        let rhs = ops.cup(eta, &dc)?;
        let diff = ClassVec { coords: lhs.coords.sub(&rhs.coords), ..rhs };
        Ok(judge(pair, || format!("𝔻(ι_η c) ≠ η ∪ 𝔻(c) for η={}, c={}", name(eta), name(c)), &diff))
    });
    let mut r = gather(&format!("intertwining 𝔻(ι_η c) = η ∪ 𝔻(c) (m={})", duality.m), out);
    r.detail = format!("𝔻 on HH_{}..HH_{}", duality.domain().start(), duality.domain().end());
    r
}

/// Sign relating the engine's Gerstenhaber bracket to the bracket produced
/// by the BV formula `Δ(a∪b) - Δ(a)∪b - (-1)^{|a|} a∪Δ(b)`.
pub fn bv_convention_sign(p: usize) -> Rational {
    rat(sign(p + 1))
}

fn bv_cases(bv: &BVOperator, pair: &ChainComplexPair, coh: &[ClassVec]) -> Vec<(usize, usize, bool)> {
    let mut out = Vec::new();
    for i in 0..coh.len() {
        for j in 0..coh.len() {
            let p = coh[i].n + coh[j].n;
            let ok = bv.defined_on(coh[i].n) && bv.defined_on(coh[j].n) && bv.defined_on(p) && pair.reachable(p);
            out.push((i, j, ok));
        }
    }
    out
}

fn bv_identity(ops: &Ops, bv: &BVOperator, coh: &[ClassVec]) -> CheckResult {
    let cases = bv_cases(bv, ops.pair, coh);
    let out = run(&cases, |&(i, j, ok)| {
        if !ok {
            return Ok(Outcome::Skip);
        }
        let (a, b) = (&coh[i], &coh[j]);
        let formula = bv.bv_bracket(ops.pair, a, b)?;
        let Some(g) = ops.bracket(a, b)? else {
            return Ok(judge(ops.pair, || format!("BV formula nonzero in degree −1 for a={}, b={}", name(a), name(b)), &formula));
        };
        let mut diff = g.clone();
        diff.coords.axpy(&-bv_convention_sign(a.n), &formula.coords);
        Ok(judge(ops.pair, || format!("[a,b] ≠ ±(Δ(ab) - Δ(a)b ∓ aΔ(b)) for a={}, b={}", name(a), name(b)), &diff))
    });
    let mut r = gather(&format!("BV identity (m={})", bv.m), out);
    r.detail = format!("Δ on HH^{:?}", bv.degrees());
    r
}

fn delta_squared(bv: &BVOperator) -> CheckResult {
    let mut c = CheckResult::new(format!("Δ² = 0 (m={})", bv.m));
    c.absorb(if bv.squares_to_zero() { Outcome::Ok } else { Outcome::Bad(Witness::note("Δ∘Δ ≠ 0".into())) });
    c.finish()
}

/// The bracket from the BV formula does not depend on the period index.
fn bv_period(pair: &ChainComplexPair, ops: &[(BVOperator, usize)], coh: &[ClassVec]) -> CheckResult {
    let mut c = CheckResult::new("BV bracket independent of m");
    for w in ops.windows(2) {
        let (b0, b1) = (&w[0].0, &w[1].0);
        let c0 = bv_cases(b0, pair, coh);
        let c1 = bv_cases(b1, pair, coh);
        for (x, y) in c0.iter().zip(&c1) {
            if !(x.2 && y.2) {
                c.skipped += 1;
                continue;
            }
            let (a, b) = (&coh[x.0], &coh[x.1]);
            let r = b0.bv_bracket(pair, a, b).and_then(|u| {
                let v = b1.bv_bracket(pair, a, b)?;
                Ok(ClassVec { coords: u.coords.sub(&v.coords), ..u })
            });
            c.absorb(match r {
                Ok(diff) => judge(pair, || format!("BV bracket of {}, {} changes between m={} and m={}", name(a), name(b), b0.m, b1.m), &diff),
                Err(e) => Outcome::Bad(Witness::note(e.to_string())),
            });
        }
    }
    c.finish()
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("thread pool")
}

/// Runs every axiom check reachable under the truncation of `pair`.
pub fn verify_axioms(pair: &ChainComplexPair, type_name: &str, opts: &VerifyOptions) -> VerificationReport {
    pool(opts.threads).install(|| {
        let ops = Ops { pair, fault: opts.fault };
        let coh = all_classes(pair, Kind::Cohomology);
        let hom = all_classes(pair, Kind::Homology);
        let mut report = VerificationReport::new(type_name, pair.max_degree(), opts.m);
        report.checks.push(complex_identities(pair));
        report.checks.push(leibniz(&ops, &coh));
        report.checks.push(precalculus_bracket(&ops, &coh, &hom));
        report.checks.push(precalculus_cup(&ops, &coh, &hom));
        report.checks.push(cartan(&ops, &coh, &hom));
        report.checks.push(lemma_theta0(&ops, &hom));
        report.checks.extend(dimension_checks(pair));

        let mut bvs = Vec::new();
        for &m in &opts.periods {
            let label = format!("intertwining 𝔻(ι_η c) = η ∪ 𝔻(c) (m={m})");
            match DualityMap::build(pair, m) {
                Ok(d) => {
                    report.checks.push(intertwining(&ops, &d));
                    match BVOperator::build(pair, &d) {
                        Ok(bv) => {
                            report.checks.push(delta_squared(&bv));
                            report.checks.push(bv_identity(&ops, &bv, &coh));
                            bvs.push((bv, m));
                        }
                        Err(e) => report.checks.push(CheckResult::errored(format!("BV identity (m={m})"), &e)),
                    }
                }
                Err(e) => report.checks.push(CheckResult::errored(label, &e)),
            }
        }
        report.checks.push(bv_period(pair, &bvs, &coh));
        report.conventions.push(Convention {
            table: Table::Bracket,
            rule: "engine bracket [a,b] = f∘g - (-1)^{(|a|-1)(|b|-1)} g∘f equals (-1)^{|a|+1} times Δ(a∪b) - Δ(a)∪b - (-1)^{|a|} a∪Δ(b)".into(),
        });
        report
    })
}

/// Per-table comparison of engine results with the closed forms.
struct TableRun<'a> {
    pair: &'a ChainComplexPair,
    labels: &'a LabelAssignment,
    printed: Tables<'a>,
    corrected: Tables<'a>,
    ops: Ops<'a>,
}

enum CellOutcome {
    Match,
    Explained(ExplainedCell),
    Skip,
    Mismatch(Witness),
}

impl TableRun<'_> {
    /// Drops formal negative shifts and symbols whose block vanishes, or
    /// `None` when a symbol names a missing class in a nonzero block.
    fn realizable(&self, e: &SymbolicElement, kind: Kind, n: usize, d: i64) -> Option<ClassVec> {
        self.labels.realize(&e.nonnegative(), self.pair, kind, n, d)
    }

    fn compare(
        &self,
        table: Table,
        a: &Symbol,
        b: &Symbol,
        engine: &ClassVec,
        printed: Result<SymbolicElement>,
        corrected: Result<SymbolicElement>,
    ) -> CellOutcome {
        if !self.labels.is_labeled(engine.kind, engine.n, engine.d) && !engine.is_zero() {
            return CellOutcome::Skip;
        }
        let engine_text = || self.labels.express(engine).map(|e| e.to_string()).unwrap_or_else(|_| "?".into());
        let printed = match printed {
            Ok(p) => p,
            Err(e) => return CellOutcome::Mismatch(Witness::note(format!("{table} ({a}, {b}): {e}"))),
        };
        let hit = |e: &SymbolicElement| {
            self.realizable(e, engine.kind, engine.n, engine.d).map(|x| (x.coords == engine.coords, x))
        };
        if let Some((true, _)) = hit(&printed) { return CellOutcome::Match }
        if let (Some(err), Ok(fixed)) = (erratum_for(table, a.family, b.family), corrected) {
            if let Some((true, _)) = hit(&fixed) {
                return CellOutcome::Explained(ExplainedCell {
                    table,
                    a: a.to_string(),
                    b: b.to_string(),
                    printed: printed.to_string(),
                    engine: engine_text(),
                    note: err.note.to_string(),
                });
            }
        }
        let description = format!("{table} ({a}, {b}): table {printed}, engine {}", engine_text());
        CellOutcome::Mismatch(match hit(&printed) {
            Some((_, x)) => {
                let diff = ClassVec { coords: engine.coords.sub(&x.coords), ..engine.clone() };
                Witness::class(description, self.pair, &diff)
            }
            None => Witness::note(description),
        })
    }
}

fn collect_table(name: &str, outcomes: Vec<Result<CellOutcome>>, explained: &mut Vec<ExplainedCell>) -> CheckResult {
    let mut c = CheckResult::new(name);
    for o in outcomes {
        match o {
            Ok(CellOutcome::Match) => c.cases += 1,
            Ok(CellOutcome::Explained(e)) => {
                c.cases += 1;
                explained.push(e);
            }
            Ok(CellOutcome::Skip) | Err(Error::TruncationTooShallow { .. }) => c.skipped += 1,
            Ok(CellOutcome::Mismatch(w)) => {
                c.cases += 1;
                c.fail(w);
            }
            Err(e) => {
                c.cases += 1;
                c.fail(Witness::note(e.to_string()));
            }
        }
    }
    c.finish()
}

/// Compares every labeled cell reachable under the truncation with the
/// tables, evaluated on structure constants extracted from the engine.
pub fn verify_tables(pair: &ChainComplexPair, type_name: &str, opts: &VerifyOptions) -> VerificationReport {
    let mut report = VerificationReport::new(type_name, pair.max_degree(), opts.m);
    let setup = DualityMap::build(pair, opts.m).and_then(|d| {
        let labels = LabelAssignment::assign(pair, &d)?;
        let meta = labels.metadata()?;
        Ok((labels, meta))
    });
    let (labels, meta) = match setup {
        Ok(x) => x,
        Err(e) => {
            report.checks.push(CheckResult::errored("label assignment", &e));
            return report;
        }
    };
    pool(opts.threads).install(|| table_checks(pair, &labels, &meta, opts, &mut report));
    report
}

fn table_checks(
    pair: &ChainComplexPair,
    labels: &LabelAssignment,
    meta: &TypeMetadata,
    opts: &VerifyOptions,
    report: &mut VerificationReport,
) {
    let mut lab = CheckResult::new("label assignment");
    for &(kind, n, d) in &labels.unlabeled {
        lab.absorb(if kind == Kind::Homology && n == 0 {
            Outcome::Skip
        } else {
            Outcome::Bad(Witness::note(format!("{kind:?} block n={n}, d={d} not spanned by labels")))
        });
    }
    lab.cases += labels.cocycles().count() + labels.cycles().count();
    lab.detail = "HH_0 = R carries no labels".into();
    report.checks.push(lab.finish());

    let run = TableRun {
        pair,
        labels,
        printed: Tables::printed(meta),
        corrected: Tables::corrected(meta),
        ops: Ops { pair, fault: opts.fault },
    };
    let cocycles: Vec<(Symbol, ClassVec)> = labels.cocycles().map(|(s, x)| (*s, x.clone())).collect();
    let cycles: Vec<(Symbol, ClassVec)> = labels.cycles().map(|(s, x)| (*s, x.clone())).collect();
    let cross: Vec<(usize, usize)> =
        (0..cocycles.len()).flat_map(|i| (0..cycles.len()).map(move |j| (i, j))).collect();
    let square: Vec<(usize, usize)> =
        (0..cocycles.len()).flat_map(|i| (0..cocycles.len()).map(move |j| (i, j))).collect();

    let contraction: Vec<Result<CellOutcome>> = cross
        .par_iter()
        .map(|&(i, j)| {
            let ((a, x), (b, y)) = (&cocycles[i], &cycles[j]);
            let Some(engine) = run.ops.contract(x, y)? else {
                return Ok(CellOutcome::Skip);
            };
            Ok(run.compare(Table::Contraction, a, b, &engine, run.printed.iota(a, b), run.corrected.iota(a, b)))
        })
        .collect();
    let bracket: Vec<Result<CellOutcome>> = square
        .par_iter()
        .map(|&(i, j)| {
            let ((a, x), (b, y)) = (&cocycles[i], &cocycles[j]);
            if !pair.reachable((x.n + y.n).saturating_sub(1)) {
                return Ok(CellOutcome::Skip);
            }
            let Some(engine) = run.ops.bracket(x, y)? else {
                return Ok(CellOutcome::Skip);
            };
            let engine = engine.scaled(&bv_convention_sign(x.n));
            Ok(run.compare(Table::Bracket, a, b, &engine, run.printed.bracket(a, b), run.corrected.bracket(a, b)))
        })
        .collect();
    let lie: Vec<Result<CellOutcome>> = cross
        .par_iter()
        .map(|&(i, j)| {
            let ((a, x), (b, y)) = (&cocycles[i], &cycles[j]);
            if x.n > y.n + 1 || !pair.reachable(y.n + 1 - x.n) {
                return Ok(CellOutcome::Skip);
            }
            let Some(engine) = run.ops.lie(x, y)? else {
                return Ok(CellOutcome::Skip);
            };
            Ok(run.compare(Table::Lie, a, b, &engine, run.printed.lie(a, b), run.corrected.lie(a, b)))
        })
        .collect();
    let connes: Vec<Result<CellOutcome>> = cycles
        .par_iter()
        .map(|(b, y)| {
            if !pair.reachable(y.n + 1) {
                return Ok(CellOutcome::Skip);
            }
            let engine = run.ops.connes(y)?;
            let formula = tables::connes_symbol(b, meta);
            Ok(run.compare(Table::Connes, b, b, &engine, formula.clone(), formula))
        })
        .collect();

    let mut explained = Vec::new();
    report.checks.push(collect_table("Table 1: contraction ι_a(b)", contraction, &mut explained));
    report.checks.push(collect_table("Table 2: bracket [a,b]", bracket, &mut explained));
    report.checks.push(collect_table("Table 3: Lie derivative L_a(b)", lie, &mut explained));
    report.checks.push(collect_table("Connes differential B", connes, &mut explained));
    report.explained.extend(explained);
    report.conventions.push(Convention {
        table: Table::Bracket,
        rule: "table entries are the BV-formula bracket; compared against (-1)^{|a|+1} times the engine bracket".into(),
    });
}

/// Both suites.
pub fn verify_all(pair: &ChainComplexPair, type_name: &str, opts: &VerifyOptions) -> VerificationReport {
    let mut report = verify_axioms(pair, type_name, opts);
    report.merge(verify_tables(pair, type_name, opts));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PreprojectiveAlgebra;
    use crate::quiver::{DoubleQuiver, QuiverType};
    use std::sync::Arc;

    fn a2(n: usize) -> ChainComplexPair {
        let alg = Arc::new(PreprojectiveAlgebra::build(&DoubleQuiver::canonical(QuiverType::a(2))).unwrap());
        ChainComplexPair::build(alg, n).unwrap()
    }

    #[test]
    fn axioms_pass_on_a2() {
        let p = a2(8);
        let r = verify_axioms(&p, "A2", &VerifyOptions::default());
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.count(Status::Fail), 0);
        assert!(r.check("BV identity (m=1)").is_some_and(|c| c.status == Status::Pass));
    }

    #[test]
    fn tables_match_on_a2() {
        let p = a2(8);
        let r = verify_tables(&p, "A2", &VerifyOptions::default());
        assert!(r.passed(), "{}", r.to_text());
        let json = r.to_json();
        assert_eq!(json["quiver_type"], "A2");
    }

    #[test]
    fn injected_faults_are_caught_with_witnesses() {
        let p = a2(6);
        for fault in ["bracket-sign", "contraction-sign", "cup-sign"] {
            let opts = VerifyOptions { fault: Some(fault.parse().unwrap()), periods: vec![0], ..Default::default() };
            let r = verify_axioms(&p, "A2", &opts);
            assert!(!r.passed(), "{fault} went unnoticed");
            let failed: Vec<_> = r.checks.iter().filter(|c| c.status == Status::Fail).collect();
            assert!(failed.iter().all(|c| c.failures > 0));
            let w = failed.iter().flat_map(|c| &c.witnesses).find(|w| w.kind.is_some()).expect("a class witness");
            assert_eq!(w.reverify(&p), Some(true), "{fault}: {}", w.description);
        }
        assert!("sign".parse::<Fault>().is_err());
    }

    #[test]
    fn shallow_truncation_skips() {
        let p = a2(2);
        let r = verify_all(&p, "A2", &VerifyOptions::default());
        assert_eq!(r.count(Status::Fail), 0);
        assert!(r.count(Status::Skipped) > 0);
        assert!(r.checks.iter().map(|c| c.skipped).sum::<usize>() > 0);
        assert!(r.to_text().contains("SKIP"));
    }

    #[test]
    fn convention_sign_alternates() {
        assert_eq!(bv_convention_sign(0), rat(-1));
        assert_eq!(bv_convention_sign(1), rat(1));
        assert_eq!(bv_convention_sign(4), rat(-1));
    }
}
