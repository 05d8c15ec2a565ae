//! Finite distance sets, their triangle patterns and the 4-values condition.

mod classify;
mod fourier_motzkin;
mod pattern;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

pub use classify::{classify, ClassEntry, ClassificationReport};
pub use fourier_motzkin::{realize_pattern, Infeasible, Realization};
pub use pattern::TrianglePattern;

/// A strictly increasing list of positive values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rat>", into = "Vec<Rat>")]
pub struct DistanceSet {
    values: Vec<Rat>,
}

impl DistanceSet {
    /// Sorts and deduplicates; rejects non-positive entries.
    pub fn new(mut values: Vec<Rat>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_positive()) {
            return Err(Error::InvalidDistanceSet(format!("value {v} is not positive")));
        }
        values.sort();
        values.dedup();
        Ok(DistanceSet { values })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Rat::from_int(v)).collect())
    }

    /// The grid `[0,1]_m` without zero: `{1/m, ..., 1}`.
    pub fn grid(m: u32) -> Self {
        let values = (1..=m as i64).map(|k| Rat::new(k, m as i64)).collect();
        DistanceSet { values }
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: Rat) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    pub fn scale(&self, c: Rat) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument(format!("scale factor {c} is not positive")));
        }
        Ok(DistanceSet { values: self.values.iter().map(|&v| v * c).collect() })
    }

    pub fn pattern(&self) -> TrianglePattern {
        TrianglePattern::of(&self.values)
    }
}

impl TryFrom<Vec<Rat>> for DistanceSet {
    type Error = Error;

    fn try_from(values: Vec<Rat>) -> Result<Self> {
        DistanceSet::new(values)
    }
}

impl From<DistanceSet> for Vec<Rat> {
    fn from(s: DistanceSet) -> Self {
        s.values
    }
}

impl fmt::Display for DistanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.values.iter().map(Rat::to_string).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

pub fn pattern_of(s: &DistanceSet) -> TrianglePattern {
    s.pattern()
}

/// `S ~ T`: same size and the same truth table for `s_i <= s_j + s_k`.
pub fn similar(s: &DistanceSet, t: &DistanceSet) -> bool {
    s.len() == t.len() && s.pattern() == t.pattern()
}

/// A quadruple `(s0, s1, s0', s1')` together with the value `t` that links
/// the two triangles but admits no closing value `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourValuesCounterexample {
    pub s0: Rat,
    pub s1: Rat,
    pub s0p: Rat,
    pub s1p: Rat,
    pub t: Rat,
}

impl fmt::Display for FourValuesCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s0={}, s1={}, s0'={}, s1'={}, t={}",
            self.s0, self.s1, self.s0p, self.s1p, self.t
        )
    }
}

#[inline]
fn triangle(a: Rat, b: Rat, c: Rat) -> bool {
    a.abs_diff(b) <= c && c <= a + b
}

/// Exhaustive check of the 4-values condition. Quadruples are scanned in
/// lexicographic order over the sorted values; the first failure is returned.
pub fn four_values_counterexample(s: &DistanceSet) -> Option<FourValuesCounterexample> {
    let v = s.values();
    for &s0 in v {
        for &s1 in v {
            for &s0p in v {
                for &s1p in v {
                    let linked = v.iter().find(|&&t| triangle(s0, s1, t) && triangle(s0p, s1p, t));
                    let Some(&t) = linked else { continue };
                    if !v.iter().any(|&u| triangle(s0, s0p, u) && triangle(s1, s1p, u)) {
                        return Some(FourValuesCounterexample { s0, s1, s0p, s1p, t });
                    }
                }
            }
        }
    }
    None
}

pub fn check_four_values(s: &DistanceSet) -> bool {
    four_values_counterexample(s).is_none()
}
