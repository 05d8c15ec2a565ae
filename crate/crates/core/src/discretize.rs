//! Grid discretization: the ceiling map onto `[0,1]_m`, the collapse map from
//! the fine grid `[0,1]_{2(m²+m)}` onto `[0,1]_m`, and the back-and-forth
//! construction of a `[0,1]_m`-valued copy that is `1/m`-dense in an ambient
//! rational space.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::katetov::{claim_map, ClaimOutcome};
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;

/// The grid point `k/m`, `0 <= k <= m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridValue {
    k: u32,
    m: u32,
}

impl GridValue {
    pub fn new(k: u32, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("grid order m must be positive".into()));
        }
        if k > m {
            return Err(Error::ValueOutOfRange(Rat::new(k as i64, m as i64)));
        }
        Ok(GridValue { k, m })
    }

    pub fn from_rat(v: Rat, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("grid order m must be positive".into()));
        }
        if !v.on_grid(m) {
            return Err(Error::OffGrid { value: v, m });
        }
        let k = v * Rat::from_int(m as i64);
        if k < Rat::ZERO || k > Rat::from_int(m as i64) {
            return Err(Error::ValueOutOfRange(v));
        }
        Ok(GridValue { k: k.numer() as u32, m })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn value(&self) -> Rat {
        Rat::new(self.k as i64, self.m as i64)
    }
}

impl fmt::Display for GridValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

fn check_unit(a: Rat) -> Result<()> {
    if a < Rat::ZERO || a > Rat::ONE {
        return Err(Error::ValueOutOfRange(a));
    }
    Ok(())
}

/// Least grid value `>= a`, i.e. `ceil(m a) / m`.
pub fn ceil_m(a: Rat, m: u32) -> Result<GridValue> {
    check_unit(a)?;
    if m == 0 {
        return Err(Error::InvalidArgument("grid order m must be positive".into()));
    }
    let k = (a * Rat::from_int(m as i64)).ceil();
    Ok(GridValue { k: k as u32, m })
}

fn map_entries(x: &FiniteMetricSpace, mut f: impl FnMut(Rat) -> Result<Rat>) -> Result<FiniteMetricSpace> {
    let n = x.len();
    let mut rows = vec![vec![Rat::ZERO; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows[i][j] = f(x.d(i, j))?;
            }
        }
    }
    FiniteMetricSpace::from_rows(rows)
}

fn ensure_metric(out: FiniteMetricSpace, what: &str) -> Result<FiniteMetricSpace> {
    if let Some(v) = out.validate().first() {
        return Err(Error::NotMetric(format!("{what} produced {v}")));
    }
    Ok(out)
}

/// Entrywise `ceil_m` of the off-diagonal distances. The output is checked to
/// be a metric before it is returned.
pub fn ceil_metric(x: &FiniteMetricSpace, m: u32) -> Result<FiniteMetricSpace> {
    let out = map_entries(x, |d| Ok(ceil_m(d, m)?.value()))?;
    ensure_metric(out, "ceil_metric")
}

/// Order of the fine grid collapsed onto `[0,1]_m`: `2(m² + m)`.
pub fn fine_order(m: u32) -> u32 {
    2 * (m * m + m)
}

/// The collapse map: `x` on the fine grid goes to `l/m` for the least integer
/// `l` with `x <= l (1/m + 1/(m²+m))`.
pub fn collapse_value(x: Rat, m: u32) -> Result<GridValue> {
    if m == 0 {
        return Err(Error::InvalidArgument("grid order m must be positive".into()));
    }
    let fine = fine_order(m);
    check_unit(x)?;
    if !x.on_grid(fine) {
        return Err(Error::OffGrid { value: x, m: fine });
    }
    let mi = m as i64;
    let step = Rat::new(1, mi) + Rat::new(1, mi * mi + mi);
    let l = (x / step).ceil().max(0);
    GridValue::new(l as u32, m)
}

/// Writes a fine-grid value `x` with `collapse_value(x) = l/m` as
/// `(l-1)/m + (l-1)/(m²+m) + n/(2(m²+m))` and returns `(l, n)`.
/// The decomposition used in the subadditivity argument expects
/// `1 <= n <= 2m+4`.
pub fn collapse_decomposition(x: Rat, m: u32) -> Result<(u32, i64)> {
    let l = collapse_value(x, m)?.k() as i64;
    let mi = m as i64;
    let k = (x * Rat::from_int(fine_order(m) as i64)).numer();
    // (l-1)/m + (l-1)/(m²+m) = (l-1)(m+2)/(m²+m) = 2(l-1)(m+2) / fine
    let n = k - 2 * (l - 1) * (mi + 2);
    Ok((l as u32, n))
}

/// Entrywise collapse of a space whose distances lie on `[0,1]_{2(m²+m)}`.
/// The output is checked to be a metric before it is returned.
pub fn collapse_metric(x: &FiniteMetricSpace, m: u32) -> Result<FiniteMetricSpace> {
    let out = map_entries(x, |d| Ok(collapse_value(d, m)?.value()))?;
    ensure_metric(out, "collapse_metric")
}

/// One row of the cover report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverEntry {
    pub ambient_index: usize,
    pub distance_to_copy: Rat,
    pub covered: bool,
}

/// Why the construction stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CopyOutcome {
    /// All requested steps ran.
    Completed,
    /// Both the target and the ambient enumerations ran out first.
    Exhausted,
    /// A required realizer does not exist in the finite spaces.
    Diverged { step: usize, reason: String },
}

/// What one step of the construction did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTrace {
    pub step: usize,
    /// `None` when the step only recorded that an ambient point was covered.
    pub target_index: Option<usize>,
    pub ambient_index: Option<usize>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseCopy {
    pub m: u32,
    /// Target indices in the order they were claimed.
    pub sigma: Vec<usize>,
    /// Ambient points standing in for `sigma`, position by position.
    pub copy: Vec<usize>,
    pub cover: Vec<CoverEntry>,
    pub trace: Vec<StepTrace>,
    pub outcome: CopyOutcome,
}

impl DenseCopy {
    pub fn succeeded(&self) -> bool {
        !matches!(self.outcome, CopyOutcome::Diverged { .. }) && self.cover.iter().all(|c| c.covered)
    }
}

/// Alternating construction of a copy of `target` (a `[0,1]_m`-valued space)
/// inside `ambient` such that every processed ambient point ends up within
/// `1/m` of the copy.
///
/// Odd steps claim the least unclaimed target point and realize it in the
/// ambient space. Even steps look at the next ambient point `y`; if it is not
/// yet `1/m`-covered, the rounded profile of `y` is realized by a new target
/// point (least index) and a new ambient point (least index, or `y` itself
/// when `y` is grid-aligned with the copy).
pub fn dense_discrete_copy(
    ambient: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    m: u32,
    steps: usize,
) -> Result<DenseCopy> {
    if m == 0 {
        return Err(Error::InvalidArgument("grid order m must be positive".into()));
    }
    if !target.on_grid(m) {
        return Err(Error::Precondition(format!("target is not [0,1]_{m}-valued")));
    }
    let mut state = DenseCopy {
        m,
        sigma: Vec::new(),
        copy: Vec::new(),
        cover: Vec::new(),
        trace: Vec::new(),
        outcome: CopyOutcome::Completed,
    };
    if ambient.is_empty() || target.is_empty() {
        state.outcome = CopyOutcome::Exhausted;
        return Ok(state);
    }
    let radius = Rat::new(1, m as i64);
    state.sigma.push(0);
    state.copy.push(0);
    state.trace.push(StepTrace {
        step: 0,
        target_index: Some(0),
        ambient_index: Some(0),
        note: "start".into(),
    });
    let mut processed = Vec::new();
    let mut step = 0;
    for n in 0..steps {
        step += 1;
        let target_left = state.sigma.len() < target.len();
        if target_left {
            if let Err(reason) = forth(ambient, target, &mut state, step) {
                state.outcome = CopyOutcome::Diverged { step, reason };
                break;
            }
        }
        step += 1;
        if n >= ambient.len() {
            if !target_left {
                state.outcome = CopyOutcome::Exhausted;
                break;
            }
            continue;
        }
        processed.push(n);
        let dist = distance_to(ambient, &state.copy, n);
        if dist <= radius {
            if state.sigma.len() < target.len() {
                if let Err(reason) = forth(ambient, target, &mut state, step) {
                    state.outcome = CopyOutcome::Diverged { step, reason };
                    break;
                }
            } else {
                state.trace.push(StepTrace {
                    step,
                    target_index: None,
                    ambient_index: None,
                    note: format!("ambient {n} already covered"),
                });
            }
            continue;
        }
        if let Err(reason) = cover(ambient, target, &mut state, n, step) {
            state.outcome = CopyOutcome::Diverged { step, reason };
            break;
        }
    }
    state.cover = processed
        .into_iter()
        .map(|y| {
            let d = distance_to(ambient, &state.copy, y);
            CoverEntry { ambient_index: y, distance_to_copy: d, covered: d <= radius }
        })
        .collect();
    Ok(state)
}

fn distance_to(space: &FiniteMetricSpace, set: &[usize], y: usize) -> Rat {
    set.iter().map(|&x| space.d(x, y)).min().unwrap_or(Rat::ONE)
}

/// Least target index `k` with `d_target(sigma[i], k) = profile[i]` for all `i`.
fn target_realizer(target: &FiniteMetricSpace, sigma: &[usize], profile: &[Rat]) -> Option<usize> {
    (0..target.len()).find(|&k| {
        !sigma.contains(&k) && sigma.iter().zip(profile).all(|(&s, &v)| target.d(s, k) == v)
    })
}

/// Least ambient index outside `copy` whose distances to `copy` are `profile`,
/// with optional extra constraints `(point, distance)`.
fn ambient_realizer(
    ambient: &FiniteMetricSpace,
    copy: &[usize],
    profile: &[Rat],
    extra: &[(usize, Rat)],
) -> Option<usize> {
    (0..ambient.len()).find(|&z| {
        !copy.contains(&z)
            && copy.iter().zip(profile).all(|(&c, &v)| ambient.d(c, z) == v)
            && extra.iter().all(|&(p, v)| ambient.d(p, z) == v)
    })
}

fn forth(ambient: &FiniteMetricSpace, target: &FiniteMetricSpace, state: &mut DenseCopy, step: usize) -> Result<(), String> {
    let k = (0..target.len())
        .find(|k| !state.sigma.contains(k))
        .expect("caller checked that the target has unclaimed points");
    let profile: Vec<Rat> = state.sigma.iter().map(|&s| target.d(s, k)).collect();
    let z = ambient_realizer(ambient, &state.copy, &profile, &[])
        .ok_or_else(|| format!("no ambient point realizes target point {k} over the copy"))?;
    state.sigma.push(k);
    state.copy.push(z);
    state.trace.push(StepTrace {
        step,
        target_index: Some(k),
        ambient_index: Some(z),
        note: "extend".into(),
    });
    Ok(())
}

fn cover(
    ambient: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    state: &mut DenseCopy,
    y: usize,
    step: usize,
) -> Result<(), String> {
    let outcome = claim_map(ambient, &state.copy, y, state.m).map_err(|e| e.to_string())?;
    let (profile, z) = match outcome {
        ClaimOutcome::Map { map, .. } => {
            let values = map.values();
            let (on_copy, at_y) = values.split_at(values.len() - 1);
            let z = ambient_realizer(ambient, &state.copy, on_copy, &[(y, at_y[0])])
                .ok_or_else(|| format!("no ambient point realizes the rounded profile of ambient {y}"))?;
            (on_copy.to_vec(), z)
        }
        ClaimOutcome::GridAligned { profile } => (profile.into_values(), y),
    };
    let k = target_realizer(target, &state.sigma, &profile)
        .ok_or_else(|| format!("no target point realizes the rounded profile of ambient {y}"))?;
    state.sigma.push(k);
    state.copy.push(z);
    state.trace.push(StepTrace {
        step,
        target_index: Some(k),
        ambient_index: Some(z),
        note: format!("cover ambient {y}"),
    });
    Ok(())
}
