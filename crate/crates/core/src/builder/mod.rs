//! Finite approximations of ultrahomogeneous spaces with a prescribed finite
//! distance set, built by repeatedly realizing missing one-point extensions.

mod closure;
mod embed;
mod extension;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distance_sets::{four_values_counterexample, DistanceSet};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;

use closure::Closure;

pub use embed::{back_and_forth, kuratowski_embed, BackAndForth, BackAndForthOutcome, Side, StepFunctionSpace};
pub use extension::{check_extension, subsets_up_to, Unrealized};

pub const DEFAULT_SIZE_CAP: usize = 200;

/// How the distances from a new point to points outside the profile's base
/// are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completion {
    /// Least admissible value, point by point.
    Minimal,
    /// Point by point, the admissible value that realizes the most missing
    /// profiles (ties go to the least value), followed by coordinate ascent
    /// that also penalizes profiles left unrealized over the new point's pairs.
    #[default]
    Covering,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub rounds: usize,
    pub budget: usize,
    /// `0` keeps the natural profile order; anything else shuffles it.
    pub seed: u64,
    pub size_cap: usize,
    pub completion: Completion,
}

impl BuildConfig {
    pub fn new(rounds: usize, budget: usize) -> Self {
        BuildConfig { rounds, budget, seed: 0, size_cap: DEFAULT_SIZE_CAP, completion: Completion::default() }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    pub fn completion(mut self, completion: Completion) -> Self {
        self.completion = completion;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub round: usize,
    pub size_before: usize,
    pub missing: usize,
    pub added: usize,
    pub deferred: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxSpace {
    pub space: FiniteMetricSpace,
    pub alphabet: DistanceSet,
    pub config: BuildConfig,
    pub log: Vec<RoundSummary>,
    /// Number of rounds after which nothing was missing at depth `budget`.
    pub closed_after: Option<usize>,
}

impl ApproxSpace {
    pub fn rounds_run(&self) -> usize {
        self.log.len()
    }

    pub fn check_extension(&self, k: usize) -> Vec<Unrealized> {
        check_extension(&self.space, self.alphabet.values(), k)
    }
}

pub fn build_approx(alphabet: &DistanceSet, rounds: usize, budget: usize, seed: u64) -> Result<ApproxSpace> {
    build_with(alphabet, &BuildConfig::new(rounds, budget).seed(seed))
}

/// Starting from one point, each round lists every missing profile over every
/// subspace of at most `budget` points and adjoins a realizing point for each
/// one that is still missing when its turn comes. The missing set is kept up
/// to date as points are added, so later points of a round also see the new
/// subspaces created earlier in it. Stops early once nothing is missing.
pub fn build_with(alphabet: &DistanceSet, config: &BuildConfig) -> Result<ApproxSpace> {
    if alphabet.is_empty() {
        return Err(Error::InvalidDistanceSet("empty alphabet".into()));
    }
    if let Some(v) = alphabet.values().iter().find(|v| **v > Rat::ONE) {
        return Err(Error::InvalidDistanceSet(format!("value {v} exceeds 1")));
    }
    if let Some(cx) = four_values_counterexample(alphabet) {
        return Err(Error::FourValuesFailure(cx.to_string()));
    }
    let mut rng = (config.seed != 0).then(|| ChaCha8Rng::seed_from_u64(config.seed));
    let mut state = Closure::new(alphabet.values(), config.budget);
    let mut log = Vec::new();
    let mut closed_after = None;
    for round in 0..=config.rounds {
        let mut todo = state.gaps();
        if todo.is_empty() {
            closed_after = Some(round);
            break;
        }
        if round == config.rounds {
            break;
        }
        if let Some(rng) = rng.as_mut() {
            todo.shuffle(rng);
        }
        let size_before = state.space.len();
        let (mut added, mut deferred) = (0, 0);
        for gap in &todo {
            if !state.is_missing(gap) {
                continue;
            }
            let Some(row) = state.complete(gap, config.completion) else {
                deferred += 1;
                continue;
            };
            if state.space.len() >= config.size_cap {
                return Err(Error::SizeCapExceeded { cap: config.size_cap, round });
            }
            state.push(&row);
            added += 1;
        }
        log.push(RoundSummary { round, size_before, missing: todo.len(), added, deferred });
    }
    let space = state.space;
    debug_assert!(space.is_valid());
    Ok(ApproxSpace { space, alphabet: alphabet.clone(), config: config.clone(), log, closed_after })
}
