//! Exact feasibility of a triangle pattern.
//!
//! Unknowns are `s_0, ..., s_{m-1}` and a shared slack `eps`. Every
//! constraint is homogeneous, `a · (s, eps) <= 0`:
//!
//! * a true bit `(i,j,k)`: `s_i - s_j - s_k <= 0`
//! * a false bit: `s_j + s_k - s_i + eps <= 0`
//! * ordering: `s_i - s_{i+1} + eps <= 0`
//! * positivity: `-s_0 + eps <= 0`
//!
//! The pattern is realizable iff the system has a solution with `eps > 0`.
//! The `s` variables are eliminated from the top down; the system is
//! infeasible exactly when some surviving row reads `a · eps <= 0` with
//! `a > 0`, and the multipliers tracked on that row form a certificate.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::pattern::TrianglePattern;
use super::DistanceSet;
use crate::rat::Rat;

/// One input constraint, as labelled in certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// `s_i <= s_j + s_k`
    AtMost { i: usize, j: usize, k: usize },
    /// `s_i >= s_j + s_k + eps`
    Exceeds { i: usize, j: usize, k: usize },
    /// `s_{i+1} >= s_i + eps`
    Increasing { i: usize },
    /// `s_0 >= eps`
    Positive,
}

/// Nonnegative multipliers whose combination of the listed constraints
/// yields `c · eps <= 0` with `c > 0`, contradicting `eps > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Infeasible {
    pub terms: Vec<(Constraint, u64)>,
    pub m: usize,
}

impl Infeasible {
    /// Recombines the certificate and checks it.
    pub fn verify(&self) -> bool {
        let mut acc = vec![0i128; self.m + 1];
        for (c, lambda) in &self.terms {
            let row = constraint_row(self.m, c);
            for (a, r) in acc.iter_mut().zip(row) {
                *a += *lambda as i128 * r as i128;
            }
        }
        acc[..self.m].iter().all(|&a| a == 0) && acc[self.m] > 0
    }
}

/// An integer point realizing the pattern, and the slack it was built with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub set: DistanceSet,
    pub values: Vec<i64>,
}

fn constraint_row(m: usize, c: &Constraint) -> Vec<i64> {
    let mut row = vec![0i64; m + 1];
    match *c {
        Constraint::AtMost { i, j, k } => {
            row[i] += 1;
            row[j] -= 1;
            row[k] -= 1;
        }
        Constraint::Exceeds { i, j, k } => {
            row[j] += 1;
            row[k] += 1;
            row[i] -= 1;
            row[m] += 1;
        }
        Constraint::Increasing { i } => {
            row[i] += 1;
            row[i + 1] -= 1;
            row[m] += 1;
        }
        Constraint::Positive => {
            row[0] -= 1;
            row[m] += 1;
        }
    }
    row
}

fn constraints(p: &TrianglePattern) -> Vec<Constraint> {
    let m = p.size();
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in j..m {
                out.push(if p.get(i, j, k) {
                    Constraint::AtMost { i, j, k }
                } else {
                    Constraint::Exceeds { i, j, k }
                });
            }
        }
    }
    for i in 0..m.saturating_sub(1) {
        out.push(Constraint::Increasing { i });
    }
    if m > 0 {
        out.push(Constraint::Positive);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    coef: Vec<i128>,
    mult: Vec<i128>,
}

impl Row {
    fn normalize(&mut self) {
        let g = self
            .coef
            .iter()
            .chain(self.mult.iter())
            .fold(0i128, |g, &x| g.gcd(&x));
        if g > 1 {
            self.coef.iter_mut().for_each(|x| *x /= g);
            self.mult.iter_mut().for_each(|x| *x /= g);
        }
    }

    fn support(&self) -> usize {
        self.mult.iter().filter(|&&x| x != 0).count()
    }

    fn is_trivial(&self) -> bool {
        self.coef.iter().all(|&x| x == 0)
    }
}

/// Decides realizability of a pattern by exact elimination and returns either
/// an increasing positive integer realization or an infeasibility certificate.
pub fn realize_pattern(p: &TrianglePattern) -> Result<Realization, Infeasible> {
    let m = p.size();
    if m == 0 {
        return Ok(Realization { set: DistanceSet { values: Vec::new() }, values: Vec::new() });
    }
    let cons = constraints(p);
    let n = cons.len();
    let mut rows: Vec<Row> = cons
        .iter()
        .enumerate()
        .map(|(r, c)| {
            let mut mult = vec![0i128; n];
            mult[r] = 1;
            Row { coef: constraint_row(m, c).into_iter().map(i128::from).collect(), mult }
        })
        .filter(|r| !r.is_trivial())
        .collect();

    let mut stages: Vec<Vec<Row>> = Vec::with_capacity(m);
    for (step, v) in (0..m).rev().enumerate() {
        stages.push(rows.clone());
        rows = eliminate(&rows, v, step + 1);
        if let Some(bad) = rows.iter().find(|r| r.coef[m] > 0 && r.coef[..m].iter().all(|&x| x == 0)) {
            return Err(certificate(m, &cons, bad));
        }
    }
    // stages[t] holds the system before eliminating s_{m-1-t}
    let eps = Rat::ONE;
    let mut s = vec![Rat::ZERO; m];
    for v in 0..m {
        let system = &stages[m - 1 - v];
        let mut lower: Option<Rat> = None;
        let mut upper: Option<Rat> = None;
        for r in system {
            let a = r.coef[v];
            if a == 0 {
                continue;
            }
            let mut rest = Rat::from_int(r.coef[m] as i64) * eps;
            for (u, &su) in s.iter().enumerate().take(v) {
                rest = rest + Rat::from_int(r.coef[u] as i64) * su;
            }
            let bound = -rest / Rat::from_int(a as i64);
            if a < 0 {
                lower = Some(lower.map_or(bound, |l| l.max(bound)));
            } else {
                upper = Some(upper.map_or(bound, |u| u.min(bound)));
            }
        }
        let value = lower.expect("ordering and positivity give every variable a lower bound");
        debug_assert!(upper.is_none_or(|u| value <= u));
        s[v] = value;
    }
    let lcm = s.iter().fold(1i64, |l, x| l.lcm(&x.denom()));
    let mut ints: Vec<i64> = s.iter().map(|x| (*x * Rat::from_int(lcm)).numer()).collect();
    let g = ints.iter().fold(0i64, |g, x| g.gcd(x));
    ints.iter_mut().for_each(|x| *x /= g);
    let set = DistanceSet { values: ints.iter().map(|&x| Rat::from_int(x)).collect() };
    Ok(Realization { set, values: ints })
}

fn eliminate(rows: &[Row], v: usize, eliminated: usize) -> Vec<Row> {
    let (mut keep, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        match r.coef[v].signum() {
            0 => keep.push(r.clone()),
            1 => pos.push(r),
            _ => neg.push(r),
        }
    }
    for p in &pos {
        for q in &neg {
            let a = p.coef[v];
            let b = -q.coef[v];
            let mut r = Row {
                coef: p.coef.iter().zip(&q.coef).map(|(x, y)| b * x + a * y).collect(),
                mult: p.mult.iter().zip(&q.mult).map(|(x, y)| b * x + a * y).collect(),
            };
            r.normalize();
            // a combination of more than eliminated+1 inputs is implied by others
            if r.support() > eliminated + 1 || r.is_trivial() {
                continue;
            }
            keep.push(r);
        }
    }
    keep.sort_by(|x, y| x.coef.cmp(&y.coef).then(x.support().cmp(&y.support())));
    keep.dedup_by(|later, earlier| later.coef == earlier.coef);
    keep
}

fn certificate(m: usize, cons: &[Constraint], row: &Row) -> Infeasible {
    let terms = cons
        .iter()
        .zip(&row.mult)
        .filter(|(_, &l)| l != 0)
        .map(|(c, &l)| (c.clone(), l as u64))
        .collect();
    Infeasible { terms, m }
}
