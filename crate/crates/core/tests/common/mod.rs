#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use preproj::algebra::PreprojectiveAlgebra;
use preproj::hochschild::{ChainComplexPair, Kind};
use preproj::linalg::Rational;
use preproj::quiver::{DoubleQuiver, Family, QuiverType};

pub fn algebra(ty: QuiverType) -> Arc<PreprojectiveAlgebra> {
    Arc::new(PreprojectiveAlgebra::build(&DoubleQuiver::canonical(ty)).unwrap())
}

pub fn pair(ty: QuiverType, n: usize) -> ChainComplexPair {
    ChainComplexPair::build(algebra(ty), n).unwrap()
}

/// Fraction-free Gaussian elimination over the integers.
pub fn bareiss_rank(m: &[Vec<Rational>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    // clear denominators row by row
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::from(1), |acc, q| num_integer::lcm(acc, q.denom().clone()));
            row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect();
    let rows = a.len();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = &a[rank][c] * &a[r][j] - &a[r][c] * &a[rank][j];
                a[r][j] = v / &prev;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].abs();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Coxeter number and Nakayama involution, tabulated independently.
pub fn coxeter_oracle(ty: QuiverType) -> (usize, Vec<usize>) {
    let n = ty.rank;
    match ty.family {
        Family::A => (n + 1, (0..n).rev().collect()),
        Family::D => {
            let mut nu: Vec<usize> = (0..n).collect();
            if n % 2 == 1 {
                nu.swap(n - 2, n - 1);
            }
            (2 * n - 2, nu)
        }
        Family::E => match n {
            6 => (12, vec![4, 3, 2, 1, 0, 5]),
            7 => (18, (0..7).collect()),
            _ => (30, (0..8).collect()),
        },
    }
}

/// Coefficients of `(1 + P t^h)(1 - C t + t^2)^{-1}` up to `t^max`, by
/// direct power-series inversion over ℚ.
pub fn hilbert_oracle(adj: &[Vec<i64>], nu: &[usize], h: usize, max: usize) -> Vec<Vec<Vec<Rational>>> {
    let r = adj.len();
    let zero = || vec![vec![Rational::zero(); r]; r];
    let id = |i: usize, j: usize| Rational::from_integer(BigInt::from((i == j) as i64));
    // (1 - Ct + t^2) S = 1  ⇒  S_n = C S_{n-1} - S_{n-2} + [n = 0]
    let mut s: Vec<Vec<Vec<Rational>>> = Vec::new();
    for n in 0..=max {
        let mut x = zero();
        for i in 0..r {
            for j in 0..r {
                let mut v = if n == 0 { id(i, j) } else { Rational::zero() };
                if n >= 1 {
                    for k in 0..r {
                        v += Rational::from_integer(BigInt::from(adj[i][k])) * &s[n - 1][k][j];
                    }
                }
                if n >= 2 {
                    v -= &s[n - 2][i][j];
                }
                x[i][j] = v;
            }
        }
        s.push(x);
    }
    (0..=max)
        .map(|n| {
            let mut x = s[n].clone();
            if n >= h {
                for i in 0..r {
                    for j in 0..r {
                        x[i][j] += &s[n - h][nu[i]][j];
                    }
                }
            }
            x
        })
        .collect()
}

/// A graded dimension vector, degree → dimension, zeros dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dims(pub BTreeMap<i64, usize>);

impl Dims {
    pub fn of(v: impl IntoIterator<Item = (i64, usize)>) -> Self {
        let mut m = BTreeMap::new();
        for (d, k) in v {
            if k > 0 {
                *m.entry(d).or_insert(0) += k;
            }
        }
        Dims(m)
    }

    pub fn hh(p: &ChainComplexPair, kind: Kind, n: usize) -> Self {
        Self::of(p.hh_dims(kind, n).unwrap())
    }

    /// `V[k]`: every degree moves up by `k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::of(self.0.iter().map(|(d, n)| (d + k, *n)))
    }

    pub fn dual(&self) -> Self {
        Self::of(self.0.iter().map(|(d, n)| (-d, *n)))
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self::of(self.0.iter().chain(&other.0).map(|(d, n)| (*d, *n)))
    }

    pub fn below(&self, bound: i64) -> Self {
        Self::of(self.0.iter().filter(|(d, _)| **d < bound).map(|(d, n)| (*d, *n)))
    }

    pub fn at(&self, degree: i64) -> usize {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    /// The piece in `degree`, placed in degree 0.
    pub fn piece(&self, degree: i64) -> Self {
        Self::of([(0, self.at(degree))])
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

/// The Hochschild dimension patterns, checked degree by degree up to
/// `max_n`; periodicity is compared for `i >= periodic_from`. Returns the
/// identities that fail.
pub fn theorem_patterns(p: &ChainComplexPair, max_n: usize, periodic_from: usize) -> (usize, Vec<String>) {
    let h = p.h() as i64;
    let r = p.algebra().vertex_count();
    let co = |n: usize| Dims::hh(p, Kind::Cohomology, n);
    let ho = |n: usize| Dims::hh(p, Kind::Homology, n);
    let hh0 = co(0);
    let u = hh0.below(h - 2).shift(2);
    let l = hh0.piece(h - 2);
    let mut checks: Vec<(String, usize, Dims, Dims)> = Vec::new();
    let mut push = |name: &str, n: usize, lhs: &dyn Fn() -> Dims, rhs: &dyn Fn() -> Dims| {
        if n <= max_n {
            checks.push((name.to_string(), n, lhs(), rhs()));
        }
    };
    push("HH^0 = U[-2] + L[h-2]", 0, &|| co(0), &|| u.shift(-2).sum(&l.shift(h - 2)));
    push("HH^1 = U[-2]", 1, &|| co(1), &|| u.shift(-2));
    let k = || co(2).shift(2);
    push("HH^3 = K*[-2]", 3, &|| co(3), &|| k().dual().shift(-2));
    push("dim HH^2 = dim HH^3", 3, &|| Dims::of([(0, co(2).total())]), &|| Dims::of([(0, co(3).total())]));
    push("HH^4 = U*[-2]", 4, &|| co(4), &|| u.dual().shift(-2));
    if max_n >= 6 {
        let y = co(6).piece(-h - 2);
        push("HH^5 = U*[-2] + Y*[-h-2]", 5, &|| co(5), &|| u.dual().shift(-2).sum(&y.dual().shift(-h - 2)));
        push("HH^6 = U[-2h-2] + Y[-h-2]", 6, &|| co(6), &|| u.shift(-2 * h - 2).sum(&y.shift(-h - 2)));
        push("HH_2 = U + Y[h]", 2, &|| ho(2), &|| u.sum(&y.shift(h)));
        push("HH_3 = U*[2h] + Y*[h]", 3, &|| ho(3), &|| u.dual().shift(2 * h).sum(&y.dual().shift(h)));
    }
    push("HH_0 = R", 0, &|| ho(0), &|| Dims::of([(0, r)]));
    push("HH_1 = U", 1, &|| ho(1), &|| u.clone());
    push("HH_4 = U*[2h]", 4, &|| ho(4), &|| u.dual().shift(2 * h));
    push("HH_5 = K[2h]", 5, &|| ho(5), &|| k().shift(2 * h));
    push("HH_6 = K[2h]", 6, &|| ho(6), &|| k().shift(2 * h));
    for i in periodic_from..6 {
        let name = format!("HH^{} = HH^{i}[-2h]", i + 6);
        push(&name, i + 6, &|| co(i + 6), &|| co(i).shift(-2 * h));
        if i >= 1 {
            let name = format!("HH_{} = HH_{i}[2h]", i + 6);
            push(&name, i + 6, &|| ho(i + 6), &|| ho(i).shift(2 * h));
        }
    }
    let total = checks.len();
    let failures = checks
        .into_iter()
        .filter(|(_, _, a, b)| a != b)
        .map(|(name, _, a, b)| format!("{name}: {:?} vs {:?}", a.0, b.0))
        .collect();
    (total, failures)
}
