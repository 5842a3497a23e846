//! Simply-laced Dynkin quivers, their doubles, and the root-system constants
//! attached to them.
//!
//! Vertices are numbered from 0 internally and printed from 1. The canonical
//! orientation sends `i -> i+1` along type A, and points every edge toward the
//! branch vertex in types D and E.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rat, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::D => 'D',
            Family::E => 'E',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuiverType {
    pub family: Family,
    pub rank: usize,
}

impl QuiverType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(Error::InvalidType(format!("{}{}", family.letter(), rank)))
        }
    }

    pub fn a(rank: usize) -> Self {
        Self::new(Family::A, rank).expect("valid A rank")
    }

    pub fn d(rank: usize) -> Self {
        Self::new(Family::D, rank).expect("valid D rank")
    }

    pub fn e(rank: usize) -> Self {
        Self::new(Family::E, rank).expect("valid E rank")
    }

    /// Types whose preprojective algebra has top degree at least 1.
    ///
    /// `A1` has no arrows, so its algebra is concentrated in degree 0 and the
    /// top-degree machinery (Frobenius form in degree `h-2`, the duality
    /// shifts) degenerates.
    pub fn ensure_supported(&self) -> Result<()> {
        if self.family == Family::A && self.rank < 2 {
            return Err(Error::UnsupportedRank {
                family: 'A',
                rank: self.rank,
                reason: "A1 has no arrows; the top degree h-2 is 0",
            });
        }
        Ok(())
    }

    /// Undirected Dynkin edges, each written in its canonical orientation.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        match self.family {
            Family::A => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            Family::D => {
                let branch = n - 3;
                let mut e: Vec<_> = (0..branch).map(|i| (i, i + 1)).collect();
                e.push((n - 2, branch));
                e.push((n - 1, branch));
                e
            }
            Family::E => {
                // chain 0..=n-2 with vertex n-1 attached to vertex 2
                let mut e = vec![(0, 1), (1, 2)];
                for i in (3..=n - 2).rev() {
                    e.push((i, i - 1));
                }
                e.push((n - 1, 2));
                e
            }
        }
    }
}

impl fmt::Display for QuiverType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for QuiverType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('D') => Family::D,
            Some('E') => Family::E,
            _ => return Err(Error::InvalidType(s.to_string())),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| Error::InvalidType(s.to_string()))?;
        QuiverType::new(family, rank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub starred: bool,
    /// Index of the reversed partner.
    pub partner: usize,
    /// Index of the underlying edge of `Q`.
    pub edge: usize,
}

impl Arrow {
    pub fn epsilon(&self) -> i64 {
        if self.starred {
            -1
        } else {
            1
        }
    }
}

/// The double `Q ∪ Q*` of a Dynkin quiver.
///
/// Arrow `2k` is the `k`-th arrow of `Q`, arrow `2k+1` its reverse in `Q*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleQuiver {
    pub ty: QuiverType,
    pub arrows: Vec<Arrow>,
}

impl DoubleQuiver {
    /// Builds the double quiver; `orientation[k] = true` reverses the `k`-th
    /// canonical edge before doubling.
    pub fn build(ty: QuiverType, orientation: Option<&[bool]>) -> Result<Self> {
        let edges = ty.edges();
        if let Some(o) = orientation {
            if o.len() != edges.len() {
                return Err(Error::InvalidType(format!(
                    "{ty}: orientation has {} entries, expected {}",
                    o.len(),
                    edges.len()
                )));
            }
        }
        let mut arrows = Vec::with_capacity(2 * edges.len());
        for (k, &(u, v)) in edges.iter().enumerate() {
            let flip = orientation.is_some_and(|o| o[k]);
            let (s, t) = if flip { (v, u) } else { (u, v) };
            arrows.push(Arrow { source: s, target: t, starred: false, partner: 2 * k + 1, edge: k });
            arrows.push(Arrow { source: t, target: s, starred: true, partner: 2 * k, edge: k });
        }
        Ok(Self { ty, arrows })
    }

    pub fn canonical(ty: QuiverType) -> Self {
        Self::build(ty, None).expect("canonical orientation always fits")
    }

    pub fn vertex_count(&self) -> usize {
        self.ty.rank
    }

    pub fn arrow_name(&self, a: usize) -> String {
        let arrow = &self.arrows[a];
        if arrow.starred {
            format!("a{}*", arrow.edge + 1)
        } else {
            format!("a{}", arrow.edge + 1)
        }
    }

    /// Adjacency matrix of the double quiver.
    pub fn adjacency(&self) -> Vec<Vec<i64>> {
        let r = self.vertex_count();
        let mut c = vec![vec![0; r]; r];
        for a in &self.arrows {
            c[a.source][a.target] += 1;
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterData {
    pub h: usize,
    pub exponents: Vec<usize>,
    /// The involution `ν` with `w0(α_i) = -α_ν(i)`.
    pub nu: Vec<usize>,
    /// Permutation matrix of `ν`, `P[i][ν(i)] = 1`.
    pub p: Vec<Vec<i64>>,
    pub r_plus: usize,
    pub r_minus: usize,
    pub adjacency: Vec<Vec<i64>>,
}

impl CoxeterData {
    pub fn positive_roots(&self) -> usize {
        self.exponents.iter().sum()
    }
}

/// Tabulated Coxeter data; `ν` comes from the classification of `-w0`.
pub fn coxeter(ty: QuiverType) -> CoxeterData {
    let n = ty.rank;
    let (h, exponents, nu): (usize, Vec<usize>, Vec<usize>) = match ty.family {
        Family::A => (n + 1, (1..=n).collect(), (0..n).map(|i| n - 1 - i).collect()),
        Family::D => {
            let mut ex: Vec<usize> = (1..n).map(|k| 2 * k - 1).collect();
            ex.push(n - 1);
            ex.sort_unstable();
            let mut nu: Vec<usize> = (0..n).collect();
            if n % 2 == 1 {
                nu.swap(n - 2, n - 1);
            }
            (2 * n - 2, ex, nu)
        }
        Family::E => match n {
            6 => (12, vec![1, 4, 5, 7, 8, 11], vec![4, 3, 2, 1, 0, 5]),
            7 => (18, vec![1, 5, 7, 9, 11, 13, 17], (0..7).collect()),
            _ => (30, vec![1, 7, 11, 13, 17, 19, 23, 29], (0..8).collect()),
        },
    };
    let mut p = vec![vec![0; n]; n];
    for (i, &j) in nu.iter().enumerate() {
        p[i][j] = 1;
    }
    let kernel_dim = |sign: i64| {
        let m: Vec<Vec<_>> = (0..n)
            .map(|i| (0..n).map(|j| rat(p[i][j] - if i == j { sign } else { 0 })).collect())
            .collect();
        n - SparseMatrix::from_dense(&m).rank()
    };
    let r_plus = kernel_dim(1);
    let r_minus = kernel_dim(-1);
    CoxeterData {
        h,
        exponents,
        nu,
        p,
        r_plus,
        r_minus,
        adjacency: DoubleQuiver::canonical(ty).adjacency(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_double() {
        let q = DoubleQuiver::canonical(QuiverType::a(2));
        assert_eq!(q.arrows.len(), 2);
        assert_eq!((q.arrows[0].source, q.arrows[0].target, q.arrows[0].epsilon()), (0, 1, 1));
        assert_eq!((q.arrows[1].source, q.arrows[1].target, q.arrows[1].epsilon()), (1, 0, -1));
    }

    #[test]
    fn d4_has_six_arrows() {
        let q = DoubleQuiver::canonical(QuiverType::d(4));
        assert_eq!(q.vertex_count(), 4);
        assert_eq!(q.arrows.len(), 6);
    }

    #[test]
    fn a3_adjacency_is_tridiagonal() {
        let c = DoubleQuiver::canonical(QuiverType::a(3)).adjacency();
        assert_eq!(c, vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]]);
    }

    #[test]
    fn coxeter_small_cases() {
        let a2 = coxeter(QuiverType::a(2));
        assert_eq!((a2.h, a2.exponents.clone(), a2.nu.clone(), a2.r_minus), (3, vec![1, 2], vec![1, 0], 1));
        let a3 = coxeter(QuiverType::a(3));
        assert_eq!((a3.h, a3.nu.clone(), a3.r_plus), (4, vec![2, 1, 0], 2));
        let d4 = coxeter(QuiverType::d(4));
        assert_eq!((d4.h, d4.r_minus), (6, 0));
        assert_eq!(d4.nu, vec![0, 1, 2, 3]);
        assert_eq!(d4.p, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    }

    #[test]
    fn parse_names() {
        assert_eq!("a2".parse::<QuiverType>().unwrap(), QuiverType::a(2));
        assert_eq!(" E6 ".parse::<QuiverType>().unwrap(), QuiverType::e(6));
        assert!("D3".parse::<QuiverType>().is_err());
        assert!("E9".parse::<QuiverType>().is_err());
        assert!("X2".parse::<QuiverType>().is_err());
        assert!(QuiverType::a(1).ensure_supported().is_err());
    }

    #[test]
    fn orientation_override() {
        let q = DoubleQuiver::build(QuiverType::a(2), Some(&[true])).unwrap();
        assert_eq!((q.arrows[0].source, q.arrows[0].target), (1, 0));
        assert!(DoubleQuiver::build(QuiverType::a(2), Some(&[])).is_err());
    }
}
