use preproj::linalg::{rat, Rational};
use preproj::tables::{Reading, Symbol, SymbolicElement, Tables, TypeMetadata, Variant};
use proptest::prelude::*;

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 { rat(1) } else { rat(-1) }
}

fn setup(h: i64) -> (TypeMetadata, Vec<Symbol>, Vec<Symbol>) {
    let meta = TypeMetadata::synthetic(h, 2);
    let cocycles = meta.symbols(Variant::Cocycle, 2, 2);
    let cycles = meta.symbols(Variant::Cycle, 2, 2);
    (meta, cocycles, cycles)
}

/// Every term sits in the given bidegree.
fn in_bidegree(x: &SymbolicElement, h: i64, degree: i64, internal: i64) -> bool {
    x.terms().all(|(s, _)| s.degree() == degree && s.internal_degree(h) == internal)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn connes_squares_to_zero(h in 3i64..=6, picks in proptest::collection::vec((any::<prop::sample::Index>(), -3i64..=3), 1..5)) {
        let (meta, _, cycles) = setup(h);
        let t = Tables { meta: &meta, reading: Reading::Printed };
        let mut x = SymbolicElement::zero();
        for (i, c) in picks {
            x.add_term(&rat(c), *i.get(&cycles));
        }
        let bx = t.connes(&x).unwrap();
        prop_assert!(t.connes(&bx).unwrap().is_zero());
    }

    #[test]
    fn bracket_is_graded_antisymmetric(h in 3i64..=6, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let (meta, cocycles, _) = setup(h);
        let (a, b) = (i.get(&cocycles), j.get(&cocycles));
        for reading in [Reading::Printed, Reading::Corrected] {
            let t = Tables { meta: &meta, reading };
            // (-1)^{|a|+1}[a,b] is the Gerstenhaber bracket
            let g = |x: &Symbol, y: &Symbol| t.bracket(x, y).unwrap().scaled(&sign(x.degree() + 1));
            let expect = g(a, b).scaled(&sign((a.degree() - 1) * (b.degree() - 1) + 1));
            prop_assert_eq!(g(b, a), expect, "{:?} {:?} {:?}", reading, a, b);
        }
    }

    #[test]
    fn corrected_cells_respect_bidegrees(h in 3i64..=6, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let (meta, cocycles, cycles) = setup(h);
        let t = Tables { meta: &meta, reading: Reading::Corrected };
        let (a, b, c) = (i.get(&cocycles), j.get(&cocycles), k.get(&cycles));
        let (da, db, dc) = (a.internal_degree(h), b.internal_degree(h), c.internal_degree(h));
        prop_assert!(in_bidegree(&t.bracket(a, b).unwrap(), h, a.degree() + b.degree() - 1, da + db));
        prop_assert!(in_bidegree(&t.iota(a, c).unwrap(), h, c.degree() - a.degree(), da + dc));
        prop_assert!(in_bidegree(&t.lie(a, c).unwrap(), h, c.degree() - a.degree() + 1, da + dc));
        prop_assert!(in_bidegree(&t.connes(&SymbolicElement::of(*c)).unwrap(), h, c.degree() + 1, dc));
    }

    #[test]
    fn unit_contraction_is_identity(h in 3i64..=6, j in any::<prop::sample::Index>()) {
        let (meta, _, cycles) = setup(h);
        let t = Tables { meta: &meta, reading: Reading::Printed };
        let c = j.get(&cycles);
        let one = Symbol::cocycle(preproj::tables::LabelFamily::Z, 0, 0);
        prop_assert_eq!(t.iota(&one, c).unwrap(), SymbolicElement::of(*c));
    }

    #[test]
    fn theta0_acts_by_half_internal_degree(h in 3i64..=6, j in any::<prop::sample::Index>()) {
        let (meta, _, cycles) = setup(h);
        let c = j.get(&cycles);
        let theta0 = Symbol::cocycle(preproj::tables::LabelFamily::Theta, 0, 0);
        for reading in [Reading::Printed, Reading::Corrected] {
            let t = Tables { meta: &meta, reading };
            let expect = SymbolicElement::of(*c).scaled(&(rat(c.internal_degree(h)) / rat(2)));
            prop_assert_eq!(t.lie(&theta0, c).unwrap(), expect);
        }
    }
}
