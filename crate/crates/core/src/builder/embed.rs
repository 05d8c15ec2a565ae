use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Forth,
    Back,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BackAndForthOutcome {
    /// The requested number of pairs was reached.
    Reached,
    /// Both spaces ran out of points.
    Exhausted,
    /// `point` (in `A` for forth steps, in `B` for back steps) has no image.
    Diverged { step: usize, side: Side, point: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackAndForth {
    /// Pairs `(a, b)` in the order they were added.
    pub pairs: Vec<(usize, usize)>,
    pub outcome: BackAndForthOutcome,
}

impl BackAndForth {
    pub fn succeeded(&self) -> bool {
        !matches!(self.outcome, BackAndForthOutcome::Diverged { .. })
    }
}

/// Alternately extends a partial isometry `A -> B`, starting from `0 -> 0`.
/// Forth steps take the least unmatched point of `A`, back steps the least
/// unmatched point of `B`; the partner is always the least valid index.
pub fn back_and_forth(a: &FiniteMetricSpace, b: &FiniteMetricSpace, depth: usize) -> BackAndForth {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    if a.is_empty() || b.is_empty() || depth == 0 {
        return BackAndForth { pairs, outcome: BackAndForthOutcome::Exhausted };
    }
    pairs.push((0, 0));
    let mut step = 0;
    while pairs.len() < depth {
        step += 1;
        let side = if step % 2 == 1 { Side::Forth } else { Side::Back };
        let (src, dst) = match side {
            Side::Forth => (a, b),
            Side::Back => (b, a),
        };
        let matched_src: Vec<usize> = pairs.iter().map(|p| pick(side, p).0).collect();
        let matched_dst: Vec<usize> = pairs.iter().map(|p| pick(side, p).1).collect();
        let Some(x) = (0..src.len()).find(|x| !matched_src.contains(x)) else {
            let other_left = dst.len() > matched_dst.len();
            if other_left {
                continue;
            }
            return BackAndForth { pairs, outcome: BackAndForthOutcome::Exhausted };
        };
        let image = (0..dst.len()).find(|y| {
            !matched_dst.contains(y)
                && matched_src.iter().zip(&matched_dst).all(|(&s, &t)| src.d(s, x) == dst.d(t, *y))
        });
        match image {
            Some(y) => pairs.push(match side {
                Side::Forth => (x, y),
                Side::Back => (y, x),
            }),
            None => {
                return BackAndForth { pairs, outcome: BackAndForthOutcome::Diverged { step, side, point: x } };
            }
        }
    }
    BackAndForth { pairs, outcome: BackAndForthOutcome::Reached }
}

fn pick(side: Side, p: &(usize, usize)) -> (usize, usize) {
    match side {
        Side::Forth => (p.0, p.1),
        Side::Back => (p.1, p.0),
    }
}

/// Step functions on a dyadic partition of `2^depth` cells with values in
/// `[0,1]_m`, under the sup distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFunctionSpace {
    pub depth: u32,
    pub m: u32,
    pub functions: Vec<Vec<Rat>>,
}

impl StepFunctionSpace {
    pub fn cells(&self) -> usize {
        1 << self.depth
    }

    pub fn sup_distance(&self, i: usize, j: usize) -> Rat {
        self.functions[i]
            .iter()
            .zip(&self.functions[j])
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(Rat::ZERO)
    }

    pub fn is_isometric_to(&self, x: &FiniteMetricSpace) -> bool {
        let n = x.len();
        n == self.functions.len()
            && (0..n).all(|i| (0..n).all(|j| self.sup_distance(i, j) == x.d(i, j)))
    }
}

/// Kuratowski map into step functions: cell `c` carries the distance to point
/// `min(c, n-1)`, so `x` goes to `c -> d(x, x_{min(c, n-1)})`.
pub fn kuratowski_embed(x: &FiniteMetricSpace, m: u32) -> Result<StepFunctionSpace> {
    if m == 0 {
        return Err(Error::InvalidArgument("grid order m must be positive".into()));
    }
    if let Some(v) = x.distance_values().into_iter().find(|v| !v.on_grid(m)) {
        return Err(Error::OffGrid { value: v, m });
    }
    let n = x.len();
    let depth = if n <= 1 { 0 } else { usize::BITS - (n - 1).leading_zeros() };
    let cells = 1usize << depth;
    let functions = (0..n)
        .map(|i| (0..cells).map(|c| x.d(i, c.min(n - 1))).collect())
        .collect();
    Ok(StepFunctionSpace { depth, m, functions })
}
