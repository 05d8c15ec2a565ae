//! Katětov maps: one-point extension profiles over a finite metric space.
//!
//! A value vector `f` is Katětov over `X` when every entry is positive and
//! `|f(x) - f(y)| <= d(x,y) <= f(x) + f(y)` for all pairs. Such an `f`
//! is exactly the distance profile of a new point that can be adjoined to `X`.

use serde::{Deserialize, Serialize};

use crate::discretize::ceil_m;
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;

/// A verified Katětov value vector, one entry per base point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KatetovMap {
    values: Vec<Rat>,
}

impl KatetovMap {
    pub fn new(base: &FiniteMetricSpace, values: Vec<Rat>) -> Result<Self> {
        if !is_katetov(base, &values)? {
            return Err(Error::NotKatetov(format_values(&values)));
        }
        Ok(KatetovMap { values })
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rat> {
        self.values
    }
}

fn format_values(values: &[Rat]) -> String {
    let v: Vec<String> = values.iter().map(Rat::to_string).collect();
    format!("({})", v.join(", "))
}

#[inline]
fn pair_ok(d: Rat, a: Rat, b: Rat) -> bool {
    a.abs_diff(b) <= d && d <= a + b
}

pub fn is_katetov(space: &FiniteMetricSpace, f: &[Rat]) -> Result<bool> {
    if f.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: f.len() });
    }
    if f.iter().any(|v| !v.is_positive()) {
        return Ok(false);
    }
    for i in 0..f.len() {
        for j in (i + 1)..f.len() {
            if !pair_ok(space.d(i, j), f[i], f[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `X ∪ {f}`: the new point is appended last.
pub fn extend(space: &FiniteMetricSpace, f: &KatetovMap) -> Result<FiniteMetricSpace> {
    if !is_katetov(space, f.values())? {
        return Err(Error::NotKatetov(format_values(f.values())));
    }
    if let Some(v) = f.values().iter().find(|v| **v > Rat::ONE) {
        return Err(Error::ValueOutOfRange(*v));
    }
    let mut out = space.clone();
    out.push_point(f.values());
    Ok(out)
}

/// Every Katětov map over `space` with values in `alphabet`, in lexicographic
/// order of the value vectors (alphabet sorted ascending).
pub fn enumerate_katetov(space: &FiniteMetricSpace, alphabet: &[Rat]) -> Vec<KatetovMap> {
    let mut values: Vec<Rat> = alphabet.iter().copied().filter(Rat::is_positive).collect();
    values.sort();
    values.dedup();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(space.len());
    enumerate_rec(space, &values, &mut current, &mut out);
    out
}

fn enumerate_rec(
    space: &FiniteMetricSpace,
    alphabet: &[Rat],
    current: &mut Vec<Rat>,
    out: &mut Vec<KatetovMap>,
) {
    let i = current.len();
    if i == space.len() {
        out.push(KatetovMap { values: current.clone() });
        return;
    }
    for &v in alphabet {
        if (0..i).all(|j| pair_ok(space.d(i, j), v, current[j])) {
            current.push(v);
            enumerate_rec(space, alphabet, current, out);
            current.pop();
        }
    }
}

/// Result of the grid-rounding claim map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClaimOutcome {
    /// `map` is Katětov over `base`, the subspace on `X` followed by `y`.
    Map { base: FiniteMetricSpace, map: KatetovMap },
    /// Every distance from `y` to `X` is already on the grid, so the value at
    /// `y` would be zero. `profile` is `y`'s own (Katětov) profile over `X`.
    GridAligned { profile: KatetovMap },
}

/// The map `f_{X,y,m}`: `f(x) = ceil_m(d(x,y))` on `X` and
/// `f(y) = max_x (ceil_m(d(x,y)) - d(x,y))`.
///
/// `x` indexes `X` inside `ambient`; the distances among `X` must lie on the
/// grid `[0,1]_m`. The Katětov property of the result is checked before it is
/// returned.
pub fn claim_map(ambient: &FiniteMetricSpace, x: &[usize], y: usize, m: u32) -> Result<ClaimOutcome> {
    if m == 0 {
        return Err(Error::InvalidArgument("grid order m must be positive".into()));
    }
    if x.is_empty() {
        return Err(Error::Precondition("X must be nonempty".into()));
    }
    if x.contains(&y) {
        return Err(Error::Precondition(format!("y = {y} lies in X")));
    }
    let sub = ambient.restrict(x)?;
    if y >= ambient.len() {
        return Err(Error::IndexOutOfRange { index: y, len: ambient.len() });
    }
    if let Some(v) = sub.distance_values().into_iter().find(|v| !v.on_grid(m)) {
        return Err(Error::Precondition(format!("X has distance {v} off the grid [0,1]_{m}")));
    }
    let mut on_x = Vec::with_capacity(x.len());
    let mut at_y = Rat::ZERO;
    for &xi in x {
        let d = ambient.d(xi, y);
        let c = ceil_m(d, m)?.value();
        at_y = at_y.max(c - d);
        on_x.push(c);
    }
    if at_y.is_zero() {
        let profile = KatetovMap::new(&sub, on_x)?;
        return Ok(ClaimOutcome::GridAligned { profile });
    }
    let mut idx = x.to_vec();
    idx.push(y);
    let base = ambient.restrict(&idx)?;
    on_x.push(at_y);
    let map = KatetovMap::new(&base, on_x)?;
    Ok(ClaimOutcome::Map { base, map })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn is_katetov_examples() {
        let one = FiniteMetricSpace::single_point();
        assert!(is_katetov(&one, &[r(1, 3)]).unwrap());
        let far = FiniteMetricSpace::pair(Rat::ONE).unwrap();
        assert!(!is_katetov(&far, &[r(1, 3), r(1, 3)]).unwrap());
        let half = FiniteMetricSpace::pair(r(1, 2)).unwrap();
        assert!(is_katetov(&half, &[r(1, 2), Rat::ONE]).unwrap());
        assert!(!is_katetov(&half, &[Rat::ZERO, r(1, 2)]).unwrap());
        assert!(matches!(is_katetov(&half, &[Rat::ONE]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn extend_examples() {
        let one = FiniteMetricSpace::single_point();
        let f = KatetovMap::new(&one, vec![r(1, 3)]).unwrap();
        let two = extend(&one, &f).unwrap();
        assert_eq!(two, FiniteMetricSpace::pair(r(1, 3)).unwrap());
        assert_eq!(two.restrict(&[0]).unwrap(), one);

        let half = FiniteMetricSpace::pair(r(1, 2)).unwrap();
        let f = KatetovMap::new(&half, vec![r(1, 2), r(1, 2)]).unwrap();
        let t = extend(&half, &f).unwrap();
        assert!(t.validate().is_empty());
        assert_eq!(t.restrict(&[0, 1]).unwrap(), half);
    }

    #[test]
    fn new_rejects_non_katetov() {
        let far = FiniteMetricSpace::pair(Rat::ONE).unwrap();
        assert!(matches!(
            KatetovMap::new(&far, vec![r(1, 3), r(1, 3)]),
            Err(Error::NotKatetov(_))
        ));
    }

    #[test]
    fn enumerate_examples() {
        let one = FiniteMetricSpace::single_point();
        let maps = enumerate_katetov(&one, &[Rat::ONE, r(1, 2)]);
        let vals: Vec<_> = maps.iter().map(|m| m.values().to_vec()).collect();
        assert_eq!(vals, vec![vec![r(1, 2)], vec![Rat::ONE]]);

        let half = FiniteMetricSpace::pair(r(1, 2)).unwrap();
        let maps = enumerate_katetov(&half, &[r(1, 2)]);
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].values(), &[r(1, 2), r(1, 2)]);
    }

    #[test]
    fn enumerate_two_far_points_over_thirds() {
        // product filter over the 9 pairs drops only (1/3, 1/3)
        let far = FiniteMetricSpace::pair(Rat::ONE).unwrap();
        let maps = enumerate_katetov(&far, &[r(1, 3), r(2, 3), Rat::ONE]);
        assert_eq!(maps.len(), 8);
        assert!(maps.iter().all(|m| m.values() != [r(1, 3), r(1, 3)]));
    }

    #[test]
    fn claim_map_single_point() {
        let amb = FiniteMetricSpace::pair(r(3, 10)).unwrap();
        match claim_map(&amb, &[0], 1, 2).unwrap() {
            ClaimOutcome::Map { base, map } => {
                assert_eq!(map.values(), &[r(1, 2), r(1, 5)]);
                assert!(is_katetov(&base, map.values()).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn claim_map_pair() {
        // X = {0,1} at 1/2, y = 2 at 1/4 from both
        let amb = FiniteMetricSpace::new(vec![
            vec![Rat::ZERO, r(1, 2), r(1, 4)],
            vec![r(1, 2), Rat::ZERO, r(1, 4)],
            vec![r(1, 4), r(1, 4), Rat::ZERO],
        ])
        .unwrap();
        match claim_map(&amb, &[0, 1], 2, 2).unwrap() {
            ClaimOutcome::Map { map, .. } => {
                assert_eq!(map.values(), &[r(1, 2), r(1, 2), r(1, 4)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn claim_map_grid_aligned() {
        let amb = FiniteMetricSpace::pair(r(1, 2)).unwrap();
        match claim_map(&amb, &[0], 1, 2).unwrap() {
            ClaimOutcome::GridAligned { profile } => assert_eq!(profile.values(), &[r(1, 2)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn claim_map_preconditions() {
        let amb = FiniteMetricSpace::new(vec![
            vec![Rat::ZERO, r(1, 3), r(1, 3)],
            vec![r(1, 3), Rat::ZERO, r(1, 3)],
            vec![r(1, 3), r(1, 3), Rat::ZERO],
        ])
        .unwrap();
        assert!(matches!(claim_map(&amb, &[0, 1], 2, 2), Err(Error::Precondition(_))));
        assert!(matches!(claim_map(&amb, &[0, 1], 1, 3), Err(Error::Precondition(_))));
        assert!(matches!(claim_map(&amb, &[], 1, 3), Err(Error::Precondition(_))));
    }
}
