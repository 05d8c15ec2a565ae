use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::katetov::enumerate_katetov;
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;

/// A Katětov profile over `base` with values in the alphabet that no point
/// outside `base` realizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Unrealized {
    pub base: Vec<usize>,
    pub profile: Vec<Rat>,
}

/// All subsets of `0..n` of size at most `k`, by size and then
/// lexicographically. Includes the empty subset.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k.min(n) {
        let mut next = Vec::new();
        for s in &layer {
            let start = s.last().map_or(0, |&l| l + 1);
            for x in start..n {
                let mut t = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every Katětov map with values in `alphabet` over every subspace of at most
/// `k` points that is not realized by any point of `space` outside the
/// subspace. The list is sorted by subset size, subset, then profile.
///
/// For `k = 0` the only profile is the empty map over the empty subspace,
/// which any point realizes.
pub fn check_extension(space: &FiniteMetricSpace, alphabet: &[Rat], k: usize) -> Vec<Unrealized> {
    let n = space.len();
    let subsets = subsets_up_to(n, k);
    subsets
        .par_iter()
        .flat_map_iter(|base| unrealized_over(space, alphabet, base))
        .collect()
}

pub(crate) fn unrealized_over(space: &FiniteMetricSpace, alphabet: &[Rat], base: &[usize]) -> Vec<Unrealized> {
    let realized: HashSet<Vec<Rat>> = (0..space.len())
        .filter(|y| !base.contains(y))
        .map(|y| base.iter().map(|&x| space.d(x, y)).collect())
        .collect();
    let sub = space.restrict(base).expect("subset indices are in range");
    enumerate_katetov(&sub, alphabet)
        .into_iter()
        .map(|f| f.into_values())
        .filter(|f| !realized.contains(f))
        .map(|profile| Unrealized { base: base.to_vec(), profile })
        .collect()
}
