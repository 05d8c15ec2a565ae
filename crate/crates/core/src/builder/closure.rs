//! Working state of the closure loop. Distances are stored as indices into
//! the sorted alphabet so that profiles are small byte strings.

use std::collections::{HashMap, HashSet};

use super::extension::{self, subsets_up_to, Unrealized};
use super::Completion;
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;

const MAX_SWEEPS: usize = 8;
/// How much an unrealized profile over the new point's own pairs counts
/// against one it realizes elsewhere.
const CREATED_WEIGHT: i64 = 4;

/// A missing profile in index form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(super) struct Gap {
    pub base: Vec<usize>,
    pub profile: Vec<u8>,
}

pub(super) struct Closure {
    values: Vec<Rat>,
    budget: usize,
    pub space: FiniteMetricSpace,
    /// `grid[i][j]` is the alphabet index of `d(i, j)`; unused on the diagonal.
    grid: Vec<Vec<u8>>,
    missing: HashMap<Vec<usize>, HashSet<Vec<u8>>>,
    /// Bases through each point that still have missing profiles.
    by_point: Vec<Vec<Vec<usize>>>,
    /// Number of Katětov profiles over a pair, by the pair's distance index.
    pair_profiles: Vec<usize>,
}

impl Closure {
    pub fn new(values: &[Rat], budget: usize) -> Self {
        let s = values.len();
        let pair_profiles = (0..s)
            .map(|d| {
                let d = values[d];
                values
                    .iter()
                    .flat_map(|&a| values.iter().map(move |&b| (a, b)))
                    .filter(|&(a, b)| a.abs_diff(b) <= d && d <= a + b)
                    .count()
            })
            .collect();
        let space = FiniteMetricSpace::single_point();
        let mut c = Closure {
            values: values.to_vec(),
            budget,
            grid: vec![vec![0]],
            missing: HashMap::new(),
            by_point: vec![Vec::new()],
            pair_profiles,
            space,
        };
        for u in extension::check_extension(&c.space, values, budget) {
            c.insert(u);
        }
        c
    }

    fn index(&self, v: Rat) -> u8 {
        self.values.binary_search(&v).expect("distance in alphabet") as u8
    }

    fn insert(&mut self, u: Unrealized) {
        let profile: Vec<u8> = u.profile.iter().map(|&v| self.index(v)).collect();
        let entry = self.missing.entry(u.base.clone()).or_default();
        if entry.is_empty() {
            for &x in &u.base {
                self.by_point[x].push(u.base.clone());
            }
        }
        entry.insert(profile);
    }

    pub fn gaps(&self) -> Vec<Gap> {
        let mut out: Vec<Gap> = self
            .missing
            .iter()
            .flat_map(|(b, set)| set.iter().map(move |p| Gap { base: b.clone(), profile: p.clone() }))
            .collect();
        out.sort_by(|a, b| a.base.len().cmp(&b.base.len()).then_with(|| a.cmp(b)));
        out
    }

    pub fn is_missing(&self, gap: &Gap) -> bool {
        self.missing.get(&gap.base).is_some_and(|s| s.contains(&gap.profile))
    }

    fn is_missing_under(&self, base: &[usize], row: &[u8], buf: &mut Vec<u8>) -> bool {
        buf.clear();
        buf.extend(base.iter().map(|&x| row[x]));
        self.missing.get(base).is_some_and(|s| s.contains(buf.as_slice()))
    }

    /// Appends a point with the given distance indices.
    pub fn push(&mut self, row: &[u8]) {
        let p = self.space.len();
        let rats: Vec<Rat> = row.iter().map(|&i| self.values[i as usize]).collect();
        self.space.push_point(&rats);
        for (i, g) in self.grid.iter_mut().enumerate() {
            g.push(row[i]);
        }
        let mut own = row.to_vec();
        own.push(0);
        self.grid.push(own);

        let mut buf = Vec::new();
        self.missing.retain(|base, set| {
            buf.clear();
            buf.extend(base.iter().map(|&x| row[x]));
            set.remove(buf.as_slice());
            !set.is_empty()
        });
        self.by_point.push(Vec::new());
        let missing = &self.missing;
        for bases in &mut self.by_point {
            bases.retain(|b| missing.contains_key(b));
        }
        if self.budget == 0 {
            return;
        }
        for mut base in subsets_up_to(p, self.budget - 1) {
            base.push(p);
            for u in extension::unrealized_over(&self.space, &self.values, &base) {
                self.insert(u);
            }
        }
    }

    fn admissible(&self, row: &[u8], fixed: &[usize], z: usize, v: u8) -> bool {
        let val = self.values[v as usize];
        fixed.iter().all(|&w| {
            if w == z {
                return true;
            }
            let a = self.values[row[w] as usize];
            let b = self.values[self.grid[z][w] as usize];
            a.abs_diff(b) <= val && val <= a + b
        })
    }

    /// Distances from a new point realizing `gap` to every existing point, or
    /// `None` if the point-by-point completion runs into a dead end.
    pub fn complete(&self, gap: &Gap, rule: Completion) -> Option<Vec<u8>> {
        let n = self.space.len();
        let s = self.values.len() as u8;
        let mut row = vec![u8::MAX; n];
        let mut pinned = vec![false; n];
        for (&x, &v) in gap.base.iter().zip(&gap.profile) {
            row[x] = v;
            pinned[x] = true;
        }
        let mut fixed: Vec<usize> = gap.base.clone();
        let mut buf = Vec::new();
        for z in 0..n {
            if pinned[z] {
                continue;
            }
            let choice = match rule {
                Completion::Minimal => (0..s).find(|&v| self.admissible(&row, &fixed, z, v)),
                Completion::Covering => {
                    let mut best: Option<(usize, u8)> = None;
                    let options: Vec<u8> = (0..s).filter(|&v| self.admissible(&row, &fixed, z, v)).collect();
                    for v in options {
                        row[z] = v;
                        let score = self.by_point[z]
                            .iter()
                            .filter(|b| b.iter().all(|&x| row[x] != u8::MAX))
                            .filter(|b| self.is_missing_under(b, &row, &mut buf))
                            .count();
                        if best.is_none_or(|(bs, _)| score > bs) {
                            best = Some((score, v));
                        }
                    }
                    best.map(|(_, v)| v)
                }
            };
            row[z] = choice?;
            fixed.push(z);
        }
        if rule == Completion::Covering {
            self.refine(&mut row, &pinned);
        }
        Some(row)
    }

    /// Coordinate ascent on the new point's distances, trading profiles it
    /// realizes against profiles over its own pairs that nobody realizes.
    fn refine(&self, row: &mut [u8], pinned: &[bool]) {
        let n = row.len();
        let s = self.values.len();
        let all: Vec<usize> = (0..n).collect();
        // seen[w][a * s + b]: points y != w with row[y] = a and d(y, w) = b.
        let mut seen = vec![vec![0u32; s * s]; n];
        for w in 0..n {
            for y in 0..n {
                if y != w {
                    seen[w][row[y] as usize * s + self.grid[y][w] as usize] += 1;
                }
            }
        }
        let mut hist = vec![0u32; s];
        for &v in row.iter() {
            hist[v as usize] += 1;
        }
        let mut buf = Vec::new();
        for _ in 0..MAX_SWEEPS {
            let mut changed = false;
            for z in 0..n {
                if pinned[z] {
                    continue;
                }
                let old = row[z];
                let covered_old = self.covered_through(z, row, &mut buf) as i64;
                let mut best = (0i64, old);
                for v in 0..s as u8 {
                    if v == old || !self.admissible(row, &all, z, v) {
                        continue;
                    }
                    let mut gain = self.pair_profiles[old as usize] as i64 - self.pair_profiles[v as usize] as i64;
                    for w in (0..n).filter(|&w| w != z) {
                        let b = self.grid[z][w] as usize;
                        if seen[w][old as usize * s + b] == 1 {
                            gain -= 1;
                        }
                        if seen[w][v as usize * s + b] == 0 {
                            gain += 1;
                        }
                    }
                    if hist[old as usize] == 1 {
                        gain -= 1;
                    }
                    if hist[v as usize] == 0 {
                        gain += 1;
                    }
                    gain *= CREATED_WEIGHT;
                    row[z] = v;
                    gain += self.covered_through(z, row, &mut buf) as i64 - covered_old;
                    row[z] = old;
                    if gain > best.0 {
                        best = (gain, v);
                    }
                }
                let v = best.1;
                if v != old {
                    for w in (0..n).filter(|&w| w != z) {
                        let b = self.grid[z][w] as usize;
                        seen[w][old as usize * s + b] -= 1;
                        seen[w][v as usize * s + b] += 1;
                    }
                    hist[old as usize] -= 1;
                    hist[v as usize] += 1;
                    row[z] = v;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn covered_through(&self, z: usize, row: &[u8], buf: &mut Vec<u8>) -> usize {
        self.by_point[z].iter().filter(|b| self.is_missing_under(b, row, buf)).count()
    }
}
