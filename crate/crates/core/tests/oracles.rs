mod common;

use common::{algebra, bareiss_rank, coxeter_oracle, hilbert_oracle};
use preproj::algebra::hilbert_matrix;
use preproj::linalg::{frac, inverse, kernel_basis, quotient_basis, rat, rref, solve, Rational, SparseMatrix, SparseVec};
use preproj::quiver::{DoubleQuiver, QuiverType};
use proptest::prelude::*;

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        // sparse-ish entries with small denominators
        let entry = prop_oneof![3 => Just((0i64, 1i64)), 2 => (-4i64..=4, 1i64..=3)];
        proptest::collection::vec(proptest::collection::vec(entry, c), r)
            .prop_map(|rows| rows.into_iter().map(|row| row.into_iter().map(|(n, d)| frac(n, d)).collect()).collect())
    })
}

fn low_rank(max: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (matrix(max, 3), matrix(3, max)).prop_map(|(a, b)| {
        let k = a[0].len().min(b.len());
        a.iter()
            .map(|row| (0..b[0].len()).map(|j| (0..k).map(|t| &row[t] * &b[t][j]).sum()).collect())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_agrees_with_bareiss(m in matrix(7, 7)) {
        prop_assert_eq!(SparseMatrix::from_dense(&m).rank(), bareiss_rank(&m));
    }

    #[test]
    fn rank_of_products_agrees_with_bareiss(m in low_rank(7)) {
        let r = bareiss_rank(&m);
        prop_assert!(r <= 3);
        prop_assert_eq!(SparseMatrix::from_dense(&m).rank(), r);
    }

    #[test]
    fn kernel_is_annihilated_and_complementary(m in matrix(6, 8)) {
        let a = SparseMatrix::from_dense(&m);
        let ker = kernel_basis(&a);
        prop_assert_eq!(ker.len() + bareiss_rank(&m), a.cols());
        for v in &ker {
            prop_assert!(a.mul_vec(v).is_zero());
        }
        let kd: Vec<Vec<Rational>> = ker.iter().map(|v| v.to_dense(a.cols())).collect();
        prop_assert_eq!(bareiss_rank(&kd), ker.len());
    }

    #[test]
    fn solve_recovers_consistent_systems(m in matrix(6, 6), x in proptest::collection::vec(-5i64..=5, 6)) {
        let a = SparseMatrix::from_dense(&m);
        let x = SparseVec::from_dense(&x[..a.cols()].iter().map(|&v| rat(v)).collect::<Vec<_>>());
        let y = a.mul_vec(&x);
        let z = solve(&a, &y).expect("consistent system");
        prop_assert_eq!(a.mul_vec(&z), y);
    }

    #[test]
    fn inverse_exists_exactly_at_full_rank(m in matrix(5, 5)) {
        let n = m.len();
        let sq: Vec<Vec<Rational>> = m.iter().map(|r| (0..n).map(|j| r.get(j).cloned().unwrap_or_else(|| rat(0))).collect()).collect();
        let a = SparseMatrix::from_dense(&sq);
        match inverse(&a) {
            Some(inv) => {
                prop_assert_eq!(bareiss_rank(&sq), n);
                prop_assert_eq!(a.mul(&inv), SparseMatrix::identity(n));
            }
            None => prop_assert!(bareiss_rank(&sq) < n),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_is_idempotent_and_deterministic(m in matrix(6, 6)) {
        let a = SparseMatrix::from_dense(&m);
        let (r, piv) = rref(&a);
        let (r2, piv2) = rref(&r);
        prop_assert_eq!(&r, &r2);
        prop_assert_eq!(&piv, &piv2);
        prop_assert_eq!(rref(&SparseMatrix::from_dense(&m)), (r, piv));
    }

    #[test]
    fn quotient_dimensions_add_up(m in matrix(5, 6)) {
        let cols = m[0].len();
        let sub: Vec<SparseVec> = m.iter().map(|r| SparseVec::from_dense(r)).collect();
        let q = quotient_basis(cols, &sub);
        prop_assert_eq!(q.representatives.len() + bareiss_rank(&m), cols);
        prop_assert_eq!(q.dim(), q.representatives.len());
        for v in &sub {
            prop_assert!(q.project(v).is_zero());
            prop_assert!(q.contains(v));
        }
        for (i, r) in q.representatives.iter().enumerate() {
            prop_assert_eq!(q.project(r), SparseVec::unit(i));
        }
    }
}

#[test]
fn bareiss_oracle_sanity() {
    let m = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect::<Vec<Vec<_>>>();
    assert_eq!(bareiss_rank(&m(&[&[1, 2], &[2, 4]])), 1);
    assert_eq!(bareiss_rank(&m(&[&[0, 1], &[1, 0]])), 2);
    assert_eq!(bareiss_rank(&m(&[&[0, 0, 0]])), 0);
    assert_eq!(bareiss_rank(&[vec![frac(1, 2), frac(1, 3)], vec![rat(3), rat(2)]]), 1);
}

const TYPES: [&str; 8] = ["A2", "A3", "A4", "A5", "D4", "D5", "D6", "E6"];

#[test]
fn graded_pieces_follow_the_hilbert_series() {
    for name in TYPES {
        let ty: QuiverType = name.parse().unwrap();
        let (h, nu) = coxeter_oracle(ty);
        let alg = algebra(ty);
        let adj = DoubleQuiver::canonical(ty).adjacency();
        let series = hilbert_oracle(&adj, &nu, h, 2 * h + 2);
        let r = ty.rank;
        for (d, coeff) in series.iter().enumerate() {
            for i in 0..r {
                for j in 0..r {
                    assert_eq!(rat(alg.piece(d, i, j).len() as i64), coeff[i][j], "{name} degree {d} ({i},{j})");
                }
            }
        }
        assert_eq!(alg.h(), h);
        assert_eq!(alg.top_degree(), h - 2);
    }
}

#[test]
fn library_hilbert_matrix_matches_oracle() {
    for name in TYPES {
        let ty: QuiverType = name.parse().unwrap();
        let (h, nu) = coxeter_oracle(ty);
        let q = DoubleQuiver::canonical(ty);
        let lib = hilbert_matrix(&q);
        let series = hilbert_oracle(&q.adjacency(), &nu, h, 2 * h + 2);
        for (d, coeff) in series.iter().enumerate() {
            for i in 0..ty.rank {
                for j in 0..ty.rank {
                    assert_eq!(rat(lib.coefficient(d, i, j)), coeff[i][j], "{name} degree {d}");
                }
            }
        }
    }
}

#[test]
fn total_dimension_is_h_h1_r_over_6() {
    for name in TYPES {
        let ty: QuiverType = name.parse().unwrap();
        let (h, _) = coxeter_oracle(ty);
        assert_eq!(algebra(ty).dim(), h * (h + 1) * ty.rank / 6, "{name}");
    }
}
