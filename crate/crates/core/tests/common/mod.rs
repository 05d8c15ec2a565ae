#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urysohn::{FiniteMetricSpace, Rat};

pub fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn grid(m: u32) -> Vec<Rat> {
    (1..=m as i64).map(|k| r(k, m as i64)).collect()
}

/// Upper-triangle entries in row-major order, turned into a symmetric matrix.
pub fn from_upper(n: usize, upper: &[Rat]) -> Vec<Vec<Rat>> {
    let mut d = vec![vec![Rat::ZERO; n]; n];
    let mut it = upper.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = *it.next().expect("enough entries");
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Shortest-path closure; keeps grid values on the grid.
pub fn metric_closure(mut d: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// A valid `[0,1]_m`-valued space on `n` points.
pub fn grid_space(n: usize, m: u32, upper: &[u32]) -> FiniteMetricSpace {
    let vals: Vec<Rat> = upper.iter().map(|&k| r(k as i64, m as i64)).collect();
    FiniteMetricSpace::new(metric_closure(from_upper(n, &vals))).expect("closure is a metric")
}

pub fn grid_space_strategy(max_n: usize, m: u32) -> impl Strategy<Value = FiniteMetricSpace> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(1..=m, n * n.saturating_sub(1) / 2).prop_map(move |u| grid_space(n, m, &u))
    })
}

/// A valid space with distances `k/den`, `1 <= k <= den`.
pub fn rational_space_strategy(max_n: usize, den: u32) -> impl Strategy<Value = FiniteMetricSpace> {
    grid_space_strategy(max_n, den)
}

pub fn random_grid_space(rng: &mut ChaCha8Rng, n: usize, m: u32) -> FiniteMetricSpace {
    let upper: Vec<u32> = (0..n * n.saturating_sub(1) / 2).map(|_| rng.gen_range(1..=m)).collect();
    grid_space(n, m, &upper)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every ordered tuple of `len` values from `alphabet`.
pub fn product(alphabet: &[Rat], len: usize) -> Vec<Vec<Rat>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                alphabet.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// All valid `[0,1]_m`-valued spaces on `n` points given by labelled matrices.
pub fn all_grid_spaces(n: usize, m: u32) -> Vec<FiniteMetricSpace> {
    let pairs = n * n.saturating_sub(1) / 2;
    product(&grid(m), pairs)
        .into_iter()
        .filter_map(|u| FiniteMetricSpace::new(from_upper(n, &u)).ok())
        .collect()
}
