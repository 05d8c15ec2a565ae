//! Enumeration of all `~`-classes of `m`-element distance sets.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fourier_motzkin::realize_pattern;
use super::pattern::TrianglePattern;
use super::{four_values_counterexample, DistanceSet, FourValuesCounterexample};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub m: usize,
    pub pattern_id: String,
    /// Integer point returned by the feasibility solver.
    pub representative: Vec<i64>,
    /// Smallest maximum, then lexicographically least, integer realization.
    pub canonical: Vec<i64>,
    pub four_values: bool,
    pub counterexample: Option<FourValuesCounterexample>,
    pub cube: Vec<Vec<Vec<bool>>>,
}

impl ClassEntry {
    pub fn pattern(&self) -> TrianglePattern {
        TrianglePattern::from_cube(&self.cube).expect("cube is square")
    }

    pub fn canonical_set(&self) -> DistanceSet {
        DistanceSet::from_ints(&self.canonical).expect("canonical values are positive")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub m: usize,
    pub candidates: usize,
    pub total_classes: usize,
    pub four_values_classes: usize,
    pub classes: Vec<ClassEntry>,
}

impl ClassificationReport {
    pub fn satisfying(&self) -> impl Iterator<Item = &ClassEntry> {
        self.classes.iter().filter(|c| c.four_values)
    }

    /// The class whose pattern equals that of `s`, if `|s| = m`.
    pub fn class_of(&self, s: &DistanceSet) -> Option<&ClassEntry> {
        if s.len() != self.m {
            return None;
        }
        let cube = s.pattern().cube();
        self.classes.iter().find(|c| c.cube == cube)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["m", "pattern_id", "representative", "four_values", "canonical"])?;
        for c in &self.classes {
            out.write_record([
                c.m.to_string(),
                c.pattern_id.clone(),
                join(&c.representative),
                c.four_values.to_string(),
                join(&c.canonical),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

/// All patterns of size `m` that satisfy the symmetry and monotonicity
/// constraints, in lexicographic order of their free bits (false < true).
pub fn consistent_patterns(m: usize) -> Vec<TrianglePattern> {
    let triples = TrianglePattern::free_triples(m);
    let pos = |i: usize, j: usize, k: usize| -> Option<usize> {
        let (j, k) = (j.min(k), j.max(k));
        if i <= k {
            None
        } else {
            triples.iter().position(|&t| t == (i, j, k))
        }
    };
    // for each free triple: bits that must be true if it is true / false if it is false
    let mut needs_true_before = vec![Vec::new(); triples.len()];
    let mut needs_false_before = vec![Vec::new(); triples.len()];
    for (t, &(i, j, k)) in triples.iter().enumerate() {
        if i > 0 {
            if let Some(p) = pos(i - 1, j, k) {
                needs_true_before[t].push(p);
            }
        }
        if j > 0 {
            if let Some(p) = pos(i, j - 1, k) {
                needs_false_before[t].push(p);
            }
        }
        if k > j {
            if let Some(p) = pos(i, j, k - 1) {
                needs_false_before[t].push(p);
            }
        }
    }
    let mut out = Vec::new();
    let mut bits = Vec::with_capacity(triples.len());
    fn rec(
        m: usize,
        n: usize,
        bits: &mut Vec<bool>,
        nt: &[Vec<usize>],
        nf: &[Vec<usize>],
        out: &mut Vec<TrianglePattern>,
    ) {
        let t = bits.len();
        if t == n {
            let p = TrianglePattern::from_free_bits(m, bits);
            debug_assert!(p.is_consistent());
            out.push(p);
            return;
        }
        for b in [false, true] {
            let ok = if b {
                nt[t].iter().all(|&p| bits[p])
            } else {
                nf[t].iter().all(|&p| !bits[p])
            };
            if ok {
                bits.push(b);
                rec(m, n, bits, nt, nf, out);
                bits.pop();
            }
        }
    }
    rec(m, triples.len(), &mut bits, &needs_true_before, &needs_false_before, &mut out);
    out
}

/// Smallest-maximum, then lexicographically least, increasing positive
/// integer tuple with pattern `p`, searching maxima up to `bound`.
pub fn canonical_representative(p: &TrianglePattern, bound: i64) -> Option<Vec<i64>> {
    let m = p.size();
    if m == 0 {
        return Some(Vec::new());
    }
    for top in m as i64..=bound {
        let mut s = vec![0i64; m];
        s[m - 1] = top;
        if m == 1 {
            return Some(s);
        }
        if fill(p, &mut s, 0, 1) {
            return Some(s);
        }
    }
    None
}

fn fill(p: &TrianglePattern, s: &mut [i64], pos: usize, from: i64) -> bool {
    let m = s.len();
    if pos == m - 1 {
        return true;
    }
    // leave room for the remaining positions below the top value
    let hi = s[m - 1] - (m - 1 - pos) as i64;
    for v in from..=hi {
        s[pos] = v;
        if prefix_ok(p, s, pos) && fill(p, s, pos + 1, v + 1) {
            return true;
        }
    }
    false
}

/// Checks every bit whose indices lie in `{0..=pos} ∪ {m-1}` and involve `pos`.
fn prefix_ok(p: &TrianglePattern, s: &[i64], pos: usize) -> bool {
    let m = s.len();
    let set: Vec<usize> = (0..=pos).chain(std::iter::once(m - 1)).collect();
    for &i in &set {
        for &j in &set {
            for &k in &set {
                if i != pos && j != pos && k != pos {
                    continue;
                }
                if (s[i] <= s[j] + s[k]) != p.get(i, j, k) {
                    return false;
                }
            }
        }
    }
    true
}

/// Every realizable pattern of size `m`, with a solver witness, a canonical
/// representative and the 4-values verdict. Entries are sorted by canonical
/// representative (maximum first, then lexicographically).
pub fn classify(m: usize) -> ClassificationReport {
    let candidates = consistent_patterns(m);
    let mut classes: Vec<ClassEntry> = candidates
        .par_iter()
        .filter_map(|p| {
            let witness = realize_pattern(p).ok()?;
            let bound = *witness.values.last().unwrap_or(&0);
            let canonical = canonical_representative(p, bound)
                .expect("the solver witness bounds the search");
            let set = DistanceSet::from_ints(&canonical).expect("positive");
            let counterexample = four_values_counterexample(&set);
            Some(ClassEntry {
                m,
                pattern_id: p.id(),
                representative: witness.values,
                canonical,
                four_values: counterexample.is_none(),
                counterexample,
                cube: p.cube(),
            })
        })
        .collect();
    classes.sort_by(|a, b| {
        a.canonical
            .last()
            .cmp(&b.canonical.last())
            .then_with(|| a.canonical.cmp(&b.canonical))
    });
    let four_values_classes = classes.iter().filter(|c| c.four_values).count();
    ClassificationReport {
        m,
        candidates: candidates.len(),
        total_classes: classes.len(),
        four_values_classes,
        classes,
    }
}
