//! Finite metric spaces with exact rational distances in `[0,1]`.
//!
//! Points are identified by position. A [`FiniteMetricSpace`] built through
//! [`FiniteMetricSpace::from_rows`] is only guaranteed to be square with
//! entries in `[0,1]`; [`FiniteMetricSpace::validate`] reports every metric
//! violation and [`FiniteMetricSpace::new`] rejects anything non-empty.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<Rat>,
}

/// One failed metric axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonZeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    NonPositive { i: usize, j: usize },
    /// `d(i,k) > d(i,j) + d(j,k)`, reported once per unordered `{i,k}` with `i < k`.
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonZeroDiagonal { i } => write!(f, "diagonal({i})"),
            Violation::Asymmetric { i, j } => write!(f, "asymmetric({i},{j})"),
            Violation::NonPositive { i, j } => write!(f, "nonpositive({i},{j})"),
            Violation::Triangle { i, j, k } => write!(f, "triangle({i},{j},{k})"),
        }
    }
}

impl FiniteMetricSpace {
    /// Builds a space from a square matrix whose entries all lie in `[0,1]`.
    /// Metric axioms are not checked here; see [`validate`](Self::validate).
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { row: i, len: row.len(), n });
            }
            for (j, v) in row.into_iter().enumerate() {
                if v < Rat::ZERO || v > Rat::ONE {
                    return Err(Error::OutOfRange { i, j, value: v });
                }
                d.push(v);
            }
        }
        Ok(FiniteMetricSpace { n, d })
    }

    /// Builds a space and rejects it unless every metric axiom holds.
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let space = Self::from_rows(rows)?;
        let violations = space.validate();
        if let Some(v) = violations.first() {
            return Err(Error::NotMetric(format!(
                "{v} (and {} more)",
                violations.len() - 1
            )));
        }
        Ok(space)
    }

    /// Builds a space from a symmetric distance function; `f(i, i)` is never called.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Result<Self> {
        let mut rows = vec![vec![Rat::ZERO; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        Self::new(rows)
    }

    pub fn empty() -> Self {
        FiniteMetricSpace { n: 0, d: Vec::new() }
    }

    pub fn single_point() -> Self {
        FiniteMetricSpace { n: 1, d: vec![Rat::ZERO] }
    }

    /// Two points at distance `d`.
    pub fn pair(d: Rat) -> Result<Self> {
        Self::new(vec![vec![Rat::ZERO, d], vec![d, Rat::ZERO]])
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> Rat {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            if !self.d(i, i).is_zero() {
                out.push(Violation::NonZeroDiagonal { i });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.d(i, j) != self.d(j, i) {
                    out.push(Violation::Asymmetric { i, j });
                }
                if !self.d(i, j).is_positive() || !self.d(j, i).is_positive() {
                    out.push(Violation::NonPositive { i, j });
                }
            }
        }
        for i in 0..n {
            for k in (i + 1)..n {
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    if self.d(i, k) > self.d(i, j) + self.d(j, k) {
                        out.push(Violation::Triangle { i, j, k });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Induced subspace on `idx`, in the given order.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        for &i in idx {
            if i >= self.n {
                return Err(Error::IndexOutOfRange { index: i, len: self.n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        let k = idx.len();
        let mut d = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                d.push(self.d(i, j));
            }
        }
        Ok(FiniteMetricSpace { n: k, d })
    }

    /// Appends one point whose distance to point `i` is `row[i]`. The caller
    /// is responsible for the result being metric.
    pub(crate) fn push_point(&mut self, row: &[Rat]) {
        debug_assert_eq!(row.len(), self.n);
        let n = self.n;
        let mut d = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..n {
            d.extend_from_slice(self.row(i));
            d.push(row[i]);
        }
        d.extend_from_slice(row);
        d.push(Rat::ZERO);
        self.n = n + 1;
        self.d = d;
    }

    /// Sorted, deduplicated off-diagonal distances.
    pub fn distance_values(&self) -> Vec<Rat> {
        let mut v: Vec<Rat> = (0..self.n)
            .flat_map(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn diameter(&self) -> Rat {
        self.d.iter().copied().max().unwrap_or(Rat::ZERO)
    }

    /// Smallest positive distance, if the space has two points.
    pub fn min_distance(&self) -> Option<Rat> {
        self.distance_values().first().copied()
    }

    /// True when every distance lies on the grid `[0,1]_m`.
    pub fn on_grid(&self, m: u32) -> bool {
        self.d.iter().all(|v| v.on_grid(m))
    }
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FiniteMetricSpace(n={})", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|r| r.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// An injective, distance-preserving index map from a source into a target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Isometry {
    pub map: Vec<usize>,
}

impl Isometry {
    pub fn is_isometry(&self, source: &FiniteMetricSpace, target: &FiniteMetricSpace) -> bool {
        if self.map.len() != source.len() || self.map.iter().any(|&j| j >= target.len()) {
            return false;
        }
        let k = self.map.len();
        for a in 0..k {
            for b in 0..k {
                if target.d(self.map[a], self.map[b]) != source.d(a, b) {
                    return false;
                }
            }
        }
        // distance preservation on a valid source already forces injectivity,
        // but the source may be degenerate
        let mut seen = self.map.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

fn sorted_row(space: &FiniteMetricSpace, i: usize) -> Vec<Rat> {
    let mut r: Vec<Rat> = (0..space.len())
        .filter(|&j| j != i)
        .map(|j| space.d(i, j))
        .collect();
    r.sort();
    r
}

/// Whether the sorted multiset `small` is contained in the sorted multiset `big`.
fn sub_multiset(small: &[Rat], big: &[Rat]) -> bool {
    let mut it = big.iter();
    'outer: for x in small {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Up to `limit` isometric embeddings of `a` into `b`, in lexicographic order
/// of the mapping vector.
pub fn find_embeddings(a: &FiniteMetricSpace, b: &FiniteMetricSpace, limit: usize) -> Vec<Isometry> {
    let mut out = Vec::new();
    if limit == 0 || a.len() > b.len() {
        return out;
    }
    let rows_a: Vec<Vec<Rat>> = (0..a.len()).map(|i| sorted_row(a, i)).collect();
    let rows_b: Vec<Vec<Rat>> = (0..b.len()).map(|j| sorted_row(b, j)).collect();
    let candidates: Vec<Vec<usize>> = rows_a
        .iter()
        .map(|ra| {
            (0..b.len())
                .filter(|&j| sub_multiset(ra, &rows_b[j]))
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return out;
    }
    let mut map = Vec::with_capacity(a.len());
    let mut used = vec![false; b.len()];
    search(a, b, &candidates, &mut map, &mut used, limit, &mut out);
    out
}

fn search(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    candidates: &[Vec<usize>],
    map: &mut Vec<usize>,
    used: &mut [bool],
    limit: usize,
    out: &mut Vec<Isometry>,
) {
    let i = map.len();
    if i == a.len() {
        out.push(Isometry { map: map.clone() });
        return;
    }
    for &j in &candidates[i] {
        if used[j] {
            continue;
        }
        if (0..i).all(|p| b.d(map[p], j) == a.d(p, i)) {
            used[j] = true;
            map.push(j);
            search(a, b, candidates, map, used, limit, out);
            map.pop();
            used[j] = false;
            if out.len() >= limit {
                return;
            }
        }
    }
}
