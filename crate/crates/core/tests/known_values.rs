mod common;

use common::{algebra, coxeter_oracle, pair, theorem_patterns, Dims};
use preproj::algebra::FrobeniusStructure;
use preproj::hochschild::Kind;
use preproj::linalg::{frac, rat, SparseVec};
use preproj::quiver::QuiverType;
use preproj::structure::{DualityMap, LabelAssignment};
use preproj::tables::{LabelFamily, Symbol, SymbolicElement};

fn ty(s: &str) -> QuiverType {
    s.parse().unwrap()
}

#[test]
fn top_degree_is_one_dimensional_per_vertex() {
    for name in ["A2", "A3", "A4", "A5", "D4", "D5", "E6"] {
        let t = ty(name);
        let (h, nu) = coxeter_oracle(t);
        let alg = algebra(t);
        for i in 0..t.rank {
            for j in 0..t.rank {
                assert_eq!(alg.piece(h - 2, i, j).len(), usize::from(j == nu[i]), "{name} ({i},{j})");
            }
        }
        assert!(alg.degree_range(h - 1).is_empty());
    }
}

#[test]
fn nakayama_permutes_idempotents() {
    for name in ["A2", "A3", "A4", "D4", "D5", "E6"] {
        let t = ty(name);
        let (_, nu) = coxeter_oracle(t);
        let alg = algebra(t);
        let frob = FrobeniusStructure::new(&alg).unwrap();
        assert_eq!(frob.gram.rank(), alg.dim());
        for i in 0..t.rank {
            let e = SparseVec::unit(alg.idempotent(i));
            assert_eq!(frob.eta(&e), SparseVec::unit(alg.idempotent(nu[i])), "{name} e_{i}");
        }
    }
}

#[test]
fn a2_dimension_patterns() {
    let p = pair(ty("A2"), 8);
    let (total, bad) = theorem_patterns(&p, 7, 0);
    assert!(total >= 15);
    assert!(bad.is_empty(), "{bad:#?}");
    assert_eq!(Dims::hh(&p, Kind::Homology, 0), Dims::of([(0, 2)]));
}

#[test]
fn a3_dimension_patterns() {
    let p = pair(ty("A3"), 8);
    let (_, bad) = theorem_patterns(&p, 7, 1);
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn d4_low_degree_patterns() {
    let p = pair(ty("D4"), 5);
    let (total, bad) = theorem_patterns(&p, 4, 1);
    assert!(total >= 8);
    assert!(bad.is_empty(), "{bad:#?}");
}

fn labels(name: &str, m: usize) -> (preproj::hochschild::ChainComplexPair, LabelAssignment) {
    let p = pair(ty(name), 8);
    let dm = DualityMap::build(&p, m).unwrap();
    let l = LabelAssignment::assign(&p, &dm).unwrap();
    (p, l)
}

#[test]
fn connes_on_theta_and_psi_cycles() {
    for (name, m) in [("A2", 0), ("A2", 1), ("A3", 1)] {
        let (p, l) = labels(name, m);
        let h = p.h() as i64;
        let mut seen = 0;
        for (s, c) in l.cycles() {
            if c.n + 1 >= 8 {
                continue;
            }
            let (k, t) = (s.k, s.shift);
            let expect = match s.family {
                LabelFamily::Theta => SymbolicElement::term(rat(1) + frac(k, 2) + rat(t * h), Symbol::cycle(LabelFamily::Z, k, t)),
                LabelFamily::Psi => SymbolicElement::term(rat((t + 1) * h - 1) - frac(k, 2), Symbol::cycle(LabelFamily::Zeta, k, t)),
                LabelFamily::Z | LabelFamily::Zeta | LabelFamily::F | LabelFamily::Epsilon => SymbolicElement::zero(),
                _ => continue,
            };
            let b = p.connes_class(c).unwrap();
            if !l.is_labeled(b.kind, b.n, b.d) {
                assert!(b.is_zero() || expect.is_zero());
                continue;
            }
            assert_eq!(l.express(&b).unwrap(), expect, "{name} m={m}: B({s:?})");
            seen += 1;
        }
        assert!(seen > 0);
    }
}

#[test]
fn connes_sends_theta00_to_z00() {
    let (p, l) = labels("A2", 0);
    let theta = l.cycle(&Symbol::cycle(LabelFamily::Theta, 0, 0)).unwrap();
    let z = l.cycle(&Symbol::cycle(LabelFamily::Z, 0, 0)).unwrap();
    assert_eq!(p.connes_class(theta).unwrap().coords, z.coords);
}
