//! Colorings of finite spaces, chain-span quantities and the search for
//! monochromatic (or fattened-monochromatic) isometric copies.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{find_embeddings, FiniteMetricSpace, Isometry};
use crate::rat::Rat;

fn check_eps(eps: Rat) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be positive")));
    }
    Ok(())
}

/// Components of the graph joining points at distance at most `eps`, each
/// sorted, listed by least element.
pub fn epsilon_components(x: &FiniteMetricSpace, eps: Rat) -> Result<Vec<Vec<usize>>> {
    check_eps(eps)?;
    let n = x.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let u = members[i];
            for v in 0..n {
                if comp[v] == usize::MAX && x.d(u, v) <= eps {
                    comp[v] = id;
                    members.push(v);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        out.push(members);
    }
    Ok(out)
}

/// Largest distance (capped at 1) between two points of the `eps`-component
/// of `p`.
pub fn lambda_eps(x: &FiniteMetricSpace, p: usize, eps: Rat) -> Result<Rat> {
    if p >= x.len() {
        return Err(Error::IndexOutOfRange { index: p, len: x.len() });
    }
    let comps = epsilon_components(x, eps)?;
    let c = comps.iter().find(|c| c.contains(&p)).expect("every point has a component");
    let span = c
        .iter()
        .flat_map(|&a| c.iter().map(move |&b| (a, b)))
        .map(|(a, b)| x.d(a, b))
        .max()
        .unwrap_or(Rat::ZERO);
    Ok(span.min(Rat::ONE))
}

/// `(eps, lambda_eps)` for every grid value, in grid order.
pub fn lambda_curve(x: &FiniteMetricSpace, p: usize, grid: &[Rat]) -> Result<Vec<(Rat, Rat)>> {
    grid.iter().map(|&e| Ok((e, lambda_eps(x, p, e)?))).collect()
}

/// Minimum of `lambda_eps` over a finite grid.
pub fn lambda(x: &FiniteMetricSpace, p: usize, grid: &[Rat]) -> Result<Rat> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty eps grid".into()));
    }
    let curve = lambda_curve(x, p, grid)?;
    Ok(curve.into_iter().map(|(_, l)| l).min().expect("nonempty"))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    k: u32,
    colors: Vec<u32>,
}

impl Coloring {
    pub fn new(k: u32, colors: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("a coloring needs at least one color".into()));
        }
        if let Some(c) = colors.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidArgument(format!("color {c} out of range for k = {k}")));
        }
        Ok(Coloring { k, colors })
    }

    pub fn constant(n: usize) -> Self {
        Coloring { k: 1, colors: vec![0; n] }
    }

    pub fn random(n: usize, k: u32, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(k, (0..n).map(|_| rng.gen_range(0..k.max(1))).collect())
    }

    pub fn parity(n: usize, k: u32) -> Result<Self> {
        Self::new(k, (0..n).map(|i| (i % k.max(1) as usize) as u32).collect())
    }

    /// Colors points in order, each with the color that completes the fewest
    /// monochromatic copies of `target` through the new point; ties go to
    /// the least color.
    pub fn adversarial(x: &FiniteMetricSpace, k: u32, target: &FiniteMetricSpace) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("a coloring needs at least one color".into()));
        }
        let mut colors: Vec<u32> = Vec::with_capacity(x.len());
        for p in 0..x.len() {
            let mut best = (usize::MAX, 0);
            for c in 0..k {
                let mut class: Vec<usize> = (0..p).filter(|&q| colors[q] == c).collect();
                class.push(p);
                let sub = x.restrict(&class)?;
                let last = class.len() - 1;
                let through = find_embeddings(target, &sub, usize::MAX)
                    .into_iter()
                    .filter(|e| e.map.contains(&last))
                    .count();
                if through < best.0 {
                    best = (through, c);
                }
            }
            colors.push(best.1);
        }
        Self::new(k, colors)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn color(&self, p: usize) -> u32 {
        self.colors[p]
    }

    pub fn class(&self, c: u32) -> Vec<usize> {
        (0..self.colors.len()).filter(|&p| self.colors[p] == c).collect()
    }
}

/// Points of `x` within `eps` of some point of color `c`.
pub fn fattening(x: &FiniteMetricSpace, chi: &Coloring, c: u32, eps: Rat) -> Vec<usize> {
    let class = chi.class(c);
    (0..x.len()).filter(|&p| class.iter().any(|&q| x.d(p, q) <= eps)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingWitness {
    pub color: u32,
    pub eps: Rat,
    /// Image in `x` of each target point.
    pub map: Vec<usize>,
}

impl EmbeddingWitness {
    /// Re-checks the isometry and the fattened class membership from scratch.
    pub fn verify(&self, x: &FiniteMetricSpace, chi: &Coloring, target: &FiniteMetricSpace) -> bool {
        if self.map.len() != target.len() || self.map.iter().any(|&p| p >= x.len()) {
            return false;
        }
        let iso = Isometry { map: self.map.clone() };
        iso.is_isometry(target, x)
            && self
                .map
                .iter()
                .all(|&p| (0..x.len()).any(|q| chi.color(q) == self.color && x.d(p, q) <= self.eps))
    }

    /// `1 + ` the largest point index used.
    pub fn size(&self) -> usize {
        self.map.iter().max().map_or(0, |&m| m + 1)
    }
}

/// The first witness by color, then lexicographically by image.
pub fn find_mono_copy(x: &FiniteMetricSpace, chi: &Coloring, target: &FiniteMetricSpace, eps: Rat) -> Result<Option<EmbeddingWitness>> {
    if eps < Rat::ZERO {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be nonnegative")));
    }
    if chi.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: chi.len() });
    }
    for c in 0..chi.k() {
        let members = fattening(x, chi, c, eps);
        let sub = x.restrict(&members)?;
        if let Some(e) = find_embeddings(target, &sub, 1).into_iter().next() {
            let map = e.map.iter().map(|&i| members[i]).collect();
            return Ok(Some(EmbeddingWitness { color: c, eps, map }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColoringKind {
    Random,
    Parity,
    Adversarial,
}

impl ColoringKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ColoringKind::Random => "random",
            ColoringKind::Parity => "parity",
            ColoringKind::Adversarial => "adversarial",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: u32,
    pub eps: Rat,
    /// Seeds for random colorings. The deterministic kinds run once with seed 0.
    pub seeds: Vec<u64>,
    pub kinds: Vec<ColoringKind>,
    /// Record wall-clock time per run; off by default so reports replay exactly.
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub seed: u64,
    pub coloring_kind: ColoringKind,
    pub k: u32,
    pub eps: Rat,
    pub target_id: usize,
    pub found: bool,
    pub color: Option<u32>,
    pub witness_size: Option<usize>,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub coloring_kind: ColoringKind,
    pub target_id: usize,
    pub runs: usize,
    pub successes: usize,
    pub min_witness_size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut keys: Vec<(ColoringKind, usize)> = self.rows.iter().map(|r| (r.coloring_kind, r.target_id)).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|(kind, t)| {
                let rows: Vec<&ExperimentRow> =
                    self.rows.iter().filter(|r| r.coloring_kind == kind && r.target_id == t).collect();
                SummaryRow {
                    coloring_kind: kind,
                    target_id: t,
                    runs: rows.len(),
                    successes: rows.iter().filter(|r| r.found).count(),
                    min_witness_size: rows.iter().filter_map(|r| r.witness_size).min(),
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["seed", "coloring_kind", "k", "eps", "target_id", "found", "color", "witness_size", "millis"])?;
        for r in &self.rows {
            out.write_record([
                r.seed.to_string(),
                r.coloring_kind.as_str().to_string(),
                r.k.to_string(),
                r.eps.to_string(),
                r.target_id.to_string(),
                r.found.to_string(),
                r.color.map_or(String::new(), |c| c.to_string()),
                r.witness_size.map_or(String::new(), |s| s.to_string()),
                r.millis.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs `find_mono_copy` for every coloring and target. Rows are ordered by
/// coloring kind, seed and target.
pub fn experiment(x: &FiniteMetricSpace, targets: &[FiniteMetricSpace], config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut jobs: Vec<(ColoringKind, u64, usize)> = Vec::new();
    for &kind in &config.kinds {
        let seeds: Vec<u64> = match kind {
            ColoringKind::Random => config.seeds.clone(),
            _ => vec![0],
        };
        for seed in seeds {
            for t in 0..targets.len() {
                jobs.push((kind, seed, t));
            }
        }
    }
    let rows: Result<Vec<ExperimentRow>> = jobs
        .par_iter()
        .map(|&(kind, seed, t)| {
            let start = Instant::now();
            let chi = match kind {
                ColoringKind::Random => Coloring::random(x.len(), config.k, seed)?,
                ColoringKind::Parity => Coloring::parity(x.len(), config.k)?,
                ColoringKind::Adversarial => Coloring::adversarial(x, config.k, &targets[t])?,
            };
            let w = find_mono_copy(x, &chi, &targets[t], config.eps)?;
            if let Some(w) = &w {
                debug_assert!(w.verify(x, &chi, &targets[t]));
            }
            let millis = if config.timing { start.elapsed().as_millis() as u64 } else { 0 };
            Ok(ExperimentRow {
                seed,
                coloring_kind: kind,
                k: config.k,
                eps: config.eps,
                target_id: t,
                found: w.is_some(),
                color: w.as_ref().map(|w| w.color),
                witness_size: w.as_ref().map(EmbeddingWitness::size),
                millis,
            })
        })
        .collect();
    Ok(ExperimentReport { rows: rows? })
}
