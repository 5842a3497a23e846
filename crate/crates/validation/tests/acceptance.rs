//! Acceptance criteria, one test per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use common::{algebra, bareiss_rank, coxeter_oracle, hilbert_oracle, pair, theorem_patterns};
use preproj::algebra::FrobeniusStructure;
use preproj::linalg::{rat, SparseVec};
use preproj::quiver::{DoubleQuiver, QuiverType};
use preproj::tables::{consistency_suite, Reading, Table, TypeMetadata};
use preproj::verify::{verify_axioms, verify_tables, Status, VerifyOptions};

const TYPES: [&str; 4] = ["A2", "A3", "A4", "D4"];

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn with_failures<'a>(detail: String, bad: impl Iterator<Item = &'a String>) -> String {
    let shown: Vec<_> = bad.take(5).cloned().collect();
    if shown.is_empty() {
        detail
    } else {
        format!("{detail}; first failures: {}", shown.join(", "))
    }
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("Hilbert series", criterion_1_hilbert_series),
        ("top degree A(h-2) = ⊕ e_i A e_ν(i)", criterion_2_top_degree),
        ("Frobenius form and Nakayama automorphism", criterion_3_frobenius_nakayama),
        ("HH dimension patterns", criterion_4_dimension_patterns),
        ("calculus axioms on A2, N=8", criterion_5_calculus_axioms),
        ("Tables 1-3 and B against the engine on A2, N=8", criterion_6_tables_against_engine),
        ("Table 2/3 consistency with Table 1 and B", criterion_7_symbolic_consistency),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let (ok, detail) = std::panic::catch_unwind(run).unwrap_or_else(|_| (false, "panicked".into()));
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {} [{verdict}] {title}: {detail}", i + 1);
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn criterion_1_hilbert_series() -> Outcome {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for name in TYPES {
        let start = Instant::now();
        let ty: QuiverType = name.parse().unwrap();
        let (h, nu) = coxeter_oracle(ty);
        let alg = algebra(ty);
        let series = hilbert_oracle(&DoubleQuiver::canonical(ty).adjacency(), &nu, h, 2 * h + 2);
        for (d, coeff) in series.iter().enumerate() {
            for i in 0..ty.rank {
                for j in 0..ty.rank {
                    if rat(alg.piece(d, i, j).len() as i64) != coeff[i][j] {
                        bad.push(format!("{name} t^{d} ({i},{j})"));
                    }
                }
            }
        }
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        if elapsed >= Duration::from_secs(10) {
            bad.push(format!("{name} took {elapsed:?}"));
        }
    }
    (bad.is_empty(), with_failures(format!("{} mismatches, slowest {slowest:?}", bad.len()), bad.iter()))
}

fn criterion_2_top_degree() -> Outcome {
    let mut bad = Vec::new();
    for name in TYPES {
        let ty: QuiverType = name.parse().unwrap();
        let (h, nu) = coxeter_oracle(ty);
        let alg = algebra(ty);
        for i in 0..ty.rank {
            for j in 0..ty.rank {
                if alg.piece(h - 2, i, j).len() != usize::from(j == nu[i]) {
                    bad.push(format!("{name} e_{i}A(h-2)e_{j}"));
                }
            }
        }
        if !alg.degree_range(h - 1).is_empty() {
            bad.push(format!("{name} has degree h-1"));
        }
    }
    (bad.is_empty(), with_failures(format!("{} mismatches", bad.len()), bad.iter()))
}

fn criterion_3_frobenius_nakayama() -> Outcome {
    let mut bad = Vec::new();
    for name in TYPES {
        let ty: QuiverType = name.parse().unwrap();
        let (_, nu) = coxeter_oracle(ty);
        let alg = algebra(ty);
        let frob = FrobeniusStructure::new(&alg).unwrap();
        if bareiss_rank(&frob.gram.to_dense()) != alg.dim() {
            bad.push(format!("{name}: Gram matrix singular"));
        }
        for i in 0..ty.rank {
            if frob.eta(&SparseVec::unit(alg.idempotent(i))) != SparseVec::unit(alg.idempotent(nu[i])) {
                bad.push(format!("{name}: η(e_{i}) ≠ e_{}", nu[i]));
            }
        }
    }
    (bad.is_empty(), with_failures(format!("{} mismatches", bad.len()), bad.iter()))
}

fn criterion_4_dimension_patterns() -> Outcome {
    let start = Instant::now();
    let a2 = pair("A2".parse().unwrap(), 8);
    let (n2, bad2) = theorem_patterns(&a2, 7, 0);
    let t2 = start.elapsed();
    let start = Instant::now();
    let a3 = pair("A3".parse().unwrap(), 8);
    let (n3, bad3) = theorem_patterns(&a3, 7, 1);
    let t3 = start.elapsed();
    let ok = bad2.is_empty() && bad3.is_empty() && t2 < Duration::from_secs(300) && t3 < Duration::from_secs(1800);
    let detail = format!("A2 N=8: {}/{n2} identities in {t2:?}; A3 N=8: {}/{n3} in {t3:?}", n2 - bad2.len(), n3 - bad3.len());
    (ok, with_failures(detail, bad2.iter().chain(&bad3)))
}

fn criterion_5_calculus_axioms() -> Outcome {
    const REQUIRED: [&str; 9] = [
        "complex identities",
        "Leibniz",
        "precalculus: ι_[a,b]",
        "precalculus: L_(a∪b)",
        "Cartan",
        "BV identity",
        "intertwining",
        "L_θ0",
        "Δ² = 0",
    ];
    let p = pair("A2".parse().unwrap(), 8);
    let start = Instant::now();
    let r = verify_axioms(&p, "A2", &VerifyOptions::default());
    let missing: Vec<_> = REQUIRED
        .iter()
        .filter(|k| !r.checks.iter().any(|c| c.name.starts_with(*k) && c.status == Status::Pass && c.cases > 0))
        .collect();
    let ok = r.passed() && missing.is_empty();
    (ok, format!("{} checks passed, {} failed in {:?}", r.count(Status::Pass), r.count(Status::Fail), start.elapsed()))
}

fn criterion_6_tables_against_engine() -> Outcome {
    let p = pair("A2".parse().unwrap(), 8);
    let mut r = verify_axioms(&p, "A2", &VerifyOptions::default());
    r.merge(verify_tables(&p, "A2", &VerifyOptions::default()));
    let tables: Vec<_> = r.checks.iter().filter(|c| c.name.starts_with("Table") || c.name.starts_with("Connes")).collect();
    let unexplained: usize = tables.iter().map(|c| c.failures).sum();
    let cells: usize = tables.iter().map(|c| c.cases).sum();
    let mut per_table = std::collections::BTreeMap::<Table, usize>::new();
    for c in &r.conventions {
        *per_table.entry(c.table).or_default() += 1;
    }
    let ok = tables.len() == 4 && unexplained == 0 && cells > 0 && per_table.values().all(|&n| n == 1);
    (ok, format!("{cells} cells, {unexplained} unexplained, {} explained by errata, conventions {per_table:?}", r.explained.len()))
}

fn criterion_7_symbolic_consistency() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut clean = true;
    for h in 3..=6 {
        let meta = TypeMetadata::synthetic(h, 2);
        let rep = consistency_suite(&meta, Reading::Corrected, 2, 2).unwrap();
        let printed = consistency_suite(&meta, Reading::Printed, 2, 2).unwrap();
        clean &= rep.bracket_violations.is_empty() && rep.lie_violations.is_empty();
        lines.push(format!(
            "h={h}: {} cells, bracket {} / Lie {} violations (as printed: {} / {})",
            rep.cells_checked,
            rep.bracket_violations.len(),
            rep.lie_violations.len(),
            printed.bracket_violations.len(),
            printed.lie_violations.len()
        ));
    }
    let elapsed = start.elapsed();
    let ok = clean && elapsed < Duration::from_secs(60);
    (ok, format!("{} in {elapsed:?}", lines.join("; ")))
}
