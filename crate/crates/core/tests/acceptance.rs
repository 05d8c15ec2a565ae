//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails that is not listed in `KNOWN_FAILURES`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{grid, r};
use rand::Rng;
use urysohn::builder::{build_approx, build_with, kuratowski_embed, BuildConfig};
use urysohn::discretize::{ceil_m, ceil_metric, collapse_metric, collapse_value, fine_order};
use urysohn::distance_sets::{check_four_values, classify, four_values_counterexample, similar, DistanceSet};
use urysohn::hedgehog::{path_metric, verify, Hedgehog, DEFAULT_MAX_CYCLE};
use urysohn::ramsey::{experiment, ColoringKind, ExperimentConfig};
use urysohn::{claim_map, enumerate_katetov, is_katetov, ClaimOutcome, Error, FiniteMetricSpace, Rat};

/// Criteria that fail for reasons recorded alongside the project notes; they
/// are still run and reported as FAIL.
const KNOWN_FAILURES: &[u32] = &[6];

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn timed(limit: Duration, what: &str, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    ensure!(took <= limit, "{what} took {took:?}, limit {limit:?}");
    Ok(took)
}

// ---------------------------------------------------------------- oracles

/// Bit `(i, j, k)` of the triangle truth table, over integers.
fn pattern_mask(s: &[i64]) -> u64 {
    let m = s.len();
    let mut mask = 0u64;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if s[i] <= s[j] + s[k] {
                    mask |= 1 << ((i * m + j) * m + k);
                }
            }
        }
    }
    mask
}

fn four_values_oracle(s: &[i64]) -> Option<[i64; 4]> {
    let tri = |a: i64, b: i64, c: i64| (a - b).abs() <= c && c <= a + b;
    for &a in s {
        for &b in s {
            for &c in s {
                for &d in s {
                    let linked = s.iter().any(|&t| tri(a, b, t) && tri(c, d, t));
                    let closed = s.iter().any(|&u| tri(a, c, u) && tri(b, d, u));
                    if linked && !closed {
                        return Some([a, b, c, d]);
                    }
                }
            }
        }
    }
    None
}

/// First increasing tuple of each pattern among tuples with values `<= bound`.
fn bounded_census(len: usize, bound: i64) -> BTreeMap<u64, Vec<i64>> {
    let mut out = BTreeMap::new();
    let mut t: Vec<i64> = (1..=len as i64).collect();
    loop {
        out.entry(pattern_mask(&t)).or_insert_with(|| t.clone());
        // next increasing tuple in lexicographic order
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if t[i] < bound - (len - 1 - i) as i64 {
                break;
            }
        }
        t[i] += 1;
        for j in i + 1..len {
            t[j] = t[j - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------- criteria

fn classification_golden() -> Outcome {
    let started = Instant::now();
    let one = classify(1);
    ensure!(one.total_classes == 1, "classify(1) has {} classes", one.total_classes);
    let two = classify(2);
    let reps: Vec<DistanceSet> = two.classes.iter().map(|c| c.canonical_set()).collect();
    ensure!(reps.len() == 2, "classify(2) has {} classes", reps.len());
    for want in [[1, 2], [1, 3]] {
        let w = DistanceSet::from_ints(&want).unwrap();
        ensure!(reps.iter().filter(|s| similar(s, &w)).count() == 1, "no unique class for {want:?}");
    }
    let three = classify(3);
    let sat: Vec<DistanceSet> = three.satisfying().map(|c| c.canonical_set()).collect();
    ensure!(sat.len() == 6, "classify(3) has {} satisfying classes", sat.len());
    let listed = [[2, 3, 4], [1, 2, 3], [1, 2, 5], [1, 3, 4], [1, 3, 6], [1, 3, 7]];
    let mut matched = BTreeSet::new();
    for want in listed {
        let w = DistanceSet::from_ints(&want).unwrap();
        ensure!(check_four_values(&w), "{want:?} fails the 4-values check");
        let hits: Vec<usize> = (0..sat.len()).filter(|&i| similar(&sat[i], &w)).collect();
        ensure!(hits.len() == 1, "{want:?} matches {} classes", hits.len());
        matched.insert(hits[0]);
    }
    ensure!(matched.len() == 6, "the six sets do not match six distinct classes");
    let took = timed(Duration::from_secs(1), "classify(1..=3)", started)?;
    Ok(format!("1/2/6 classes, six listed sets matched one-to-one ({took:.2?})"))
}

fn size_four_census() -> Outcome {
    let started = Instant::now();
    let report = classify(4);
    ensure!(report.four_values_classes > 20, "only {} satisfying classes", report.four_values_classes);
    let census = bounded_census(4, 60);
    let oracle_sat = census.values().filter(|t| four_values_oracle(t).is_none()).count();
    ensure!(census.len() == report.total_classes, "oracle {} classes, classify {}", census.len(), report.total_classes);
    ensure!(oracle_sat == report.four_values_classes, "oracle {oracle_sat} satisfying, classify {}", report.four_values_classes);
    for c in &report.classes {
        let mask = pattern_mask(&c.canonical);
        ensure!(census.contains_key(&mask), "class {} missing from oracle", c.pattern_id);
        ensure!(census[&mask] == c.canonical, "canonical {:?} vs oracle {:?}", c.canonical, census[&mask]);
        ensure!(four_values_oracle(&c.canonical).is_none() == c.four_values, "verdict differs for {:?}", c.canonical);
    }
    ensure!((report.total_classes, report.four_values_classes) == (40, 22), "counts moved from 40/22");
    let took = timed(Duration::from_secs(300), "census", started)?;
    Ok(format!("22 of 40 classes satisfy, oracle over 4-tuples <= 60 agrees ({took:.2?})"))
}

fn four_values_spot_checks() -> Outcome {
    for m in 1..=6 {
        let s: Vec<i64> = (1..=m).collect();
        let ds = DistanceSet::from_ints(&s).unwrap();
        ensure!(four_values_oracle(&s).is_none() && check_four_values(&ds), "{{1..{m}}} rejected");
    }
    let ds = DistanceSet::from_ints(&[2, 4, 7]).unwrap();
    let cx = four_values_counterexample(&ds).ok_or("{2,4,7} accepted")?;
    let q = [cx.s0, cx.s1, cx.s0p, cx.s1p].map(|v| v.numer());
    ensure!(Some(q) == four_values_oracle(&[2, 4, 7]), "quadruple {q:?} differs from oracle");
    ensure!(q == [2, 2, 4, 7] && cx.t == Rat::from_int(4), "quadruple {q:?}, t={}", cx.t);
    Ok("{1..m} pass for m <= 6; {2,4,7} fails at (2,2,4,7) with t=4".into())
}

fn discretization() -> Outcome {
    let check = |a: Rat, b: Rat, m: u32| -> Result<(), String> {
        let (ca, cb) = (ceil_m(a, m).unwrap().value(), ceil_m(b, m).unwrap().value());
        ensure!(a > b || ca <= cb, "ceil not monotone at {a},{b},m={m}");
        ensure!(a + b > Rat::ONE || ceil_m(a + b, m).unwrap().value() <= ca + cb, "ceil not subadditive at {a},{b}");
        let p = (a.abs_diff(b) * Rat::from_int(m as i64)).ceil();
        ensure!(ca.abs_diff(cb) <= r(p, m as i64), "lipschitz transfer fails at {a},{b},m={m}");
        Ok(())
    };
    for m in 1..=4 {
        for den in 1..=12 {
            for a in 0..=den {
                for b in 0..=den {
                    check(r(a, den), r(b, den), m)?;
                }
            }
        }
    }
    let mut rng = common::rng(4);
    for _ in 0..10_000 {
        let (da, db) = (rng.gen_range(1..=500), rng.gen_range(1..=500));
        check(r(rng.gen_range(0..=da), da), r(rng.gen_range(0..=db), db), rng.gen_range(1..=40))?;
    }
    let mut spaces = 0;
    for den in [5u32, 6] {
        for n in 2..=4 {
            for x in common::all_grid_spaces(n, den) {
                for m in 1..=4 {
                    ensure!(ceil_metric(&x, m).map(|c| c.is_valid()) == Ok(true), "ceil_metric invalid");
                }
                spaces += 1;
            }
        }
    }
    for m in 1..=4 {
        for x in common::all_grid_spaces(3, fine_order(m)) {
            ensure!(collapse_metric(&x, m).map(|c| c.is_valid()) == Ok(true), "collapse_metric invalid, m={m}");
            spaces += 1;
        }
    }
    for _ in 0..10_000 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(2..=7);
        let x = common::random_grid_space(&mut rng, n, fine_order(m));
        ensure!(collapse_metric(&x, m).map(|c| c.is_valid()) == Ok(true), "collapse_metric invalid, m={m}");
        let den = rng.gen_range(1..=60);
        let y = common::random_grid_space(&mut rng, n, den);
        ensure!(ceil_metric(&y, m).map(|c| c.is_valid()) == Ok(true), "ceil_metric invalid, m={m}");
    }
    for m in 1..=8u32 {
        let fine = fine_order(m) as i64;
        for l in 1..=m as i64 {
            for eps in -2..=2 {
                let x = r(l, m as i64) + r(eps, fine);
                if x <= Rat::ONE {
                    ensure!(collapse_value(x, m).unwrap().value() == r(l, m as i64), "plateau fails at l={l} eps={eps}");
                }
            }
        }
    }
    Ok(format!("ceil laws exhaustive + 10^4 fuzz, {spaces} exhaustive spaces valid, plateau holds for alpha >= 1/m"))
}

fn hedgehog_instances() -> Outcome {
    let mut instances = 0;
    let mut slowest = Duration::ZERO;
    for m in [2u32, 3] {
        let built = build_with(&DistanceSet::grid(2 * m), &BuildConfig::new(2, 2).size_cap(10_000))
            .map_err(|e| e.to_string())?;
        let idx: Vec<usize> = (0..8).collect();
        let fine = built.space.restrict(&idx).map_err(|e| e.to_string())?;
        let coarse = ceil_metric(&fine, m).map_err(|e| e.to_string())?;
        for max_tree in 1..=4 {
            let started = Instant::now();
            let g = Hedgehog::build(&fine, &coarse, m, max_tree).map_err(|e| e.to_string())?;
            let dz = path_metric(&g).map_err(|e| e.to_string())?;
            for (a, b, v) in g.edges() {
                ensure!(dz.d(a, b) == v, "d^Z differs from the label on ({a},{b})");
            }
            let (report, census) = verify(&g, DEFAULT_MAX_CYCLE).map_err(|e| e.to_string())?;
            ensure!(report.ok(), "m={m} t={max_tree}: {report:?}, {} violations", census.violation_count());
            for branch in g.branches() {
                for (i, &u) in branch.iter().enumerate() {
                    ensure!(dz.d(u, g.projection(u)) == r(1, m as i64), "projection distance");
                    for (j, &v) in branch.iter().enumerate() {
                        ensure!(dz.d(u, v) == fine.d(i, j), "branch not isometric");
                    }
                }
            }
            slowest = slowest.max(timed(Duration::from_secs(30), "hedgehog instance", started)?);
            instances += 1;
        }
    }
    Ok(format!("{instances} instances (8 points, m in {{2,3}}, trees <= 4) verified; slowest {slowest:.2?}"))
}

fn builder_closure() -> Outcome {
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for m in 1..=3u32 {
        match build_approx(&DistanceSet::grid(m), 12, 2, 0) {
            Ok(a) => match a.closed_after {
                Some(rounds) if a.check_extension(2).is_empty() => {
                    notes.push(format!("m={m} closed after {rounds} rounds at {} points", a.space.len()))
                }
                _ => failures.push(format!("m={m} not closed after 12 rounds ({} points)", a.space.len())),
            },
            Err(Error::SizeCapExceeded { cap, round }) => {
                failures.push(format!("m={m} exceeded {cap} points in round {round}"))
            }
            Err(e) => failures.push(format!("m={m}: {e}")),
        }
    }
    let thirds = build_approx(&DistanceSet::grid(3), 4, 2, 0).map_err(|e| e.to_string())?.space;
    let forbidden = [r(1, 3), r(1, 3), Rat::ONE];
    let n = thirds.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let mut t = [thirds.d(a, b), thirds.d(a, c), thirds.d(b, c)];
                t.sort();
                if t == forbidden {
                    failures.push(format!("forbidden triangle ({a},{b},{c})"));
                }
            }
        }
    }
    notes.push(format!("no (1/3,1/3,1) triangle among {n} points"));

    let rado = build_approx(&DistanceSet::new(vec![r(1, 2), Rat::ONE]).unwrap(), 8, 3, 0)
        .map_err(|e| e.to_string())?
        .space;
    let n = rado.len();
    let adjacent = |a: usize, b: usize| rado.d(a, b) == r(1, 2);
    let mut pairs = 0;
    for u in 0..n {
        for w in u..n {
            let set: Vec<usize> = if u == w { vec![u] } else { vec![u, w] };
            for mask in 0..(1 << set.len()) {
                let inside = |i: usize| mask >> i & 1 == 1;
                let ok = (0..n).filter(|v| !set.contains(v)).any(|v| {
                    set.iter().enumerate().all(|(i, &p)| adjacent(p, v) == inside(i))
                });
                if !ok {
                    failures.push(format!("no Rado witness over {set:?}, mask {mask}"));
                }
                pairs += 1;
            }
        }
    }
    ensure!(n >= 60, "Rado build has only {n} points");
    notes.push(format!("Rado witnesses for all {pairs} set pairs on {n} points"));
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{}; passed: {}", failures.join("; "), notes.join("; ")))
    }
}

fn kuratowski() -> Outcome {
    let started = Instant::now();
    let mut rng = common::rng(0x4b);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let x = common::random_grid_space(&mut rng, n, 3);
        let e = kuratowski_embed(&x, 3).map_err(|e| e.to_string())?;
        for i in 0..n {
            for j in 0..n {
                let sup = e.functions[i].iter().zip(&e.functions[j]).map(|(a, b)| a.abs_diff(*b)).max();
                ensure!(sup == Some(x.d(i, j)), "not isometric at ({i},{j})");
            }
        }
    }
    let took = timed(Duration::from_secs(5), "embedding", started)?;
    Ok(format!("200 random spaces embedded isometrically ({took:.2?})"))
}

fn katetov_engine() -> Outcome {
    let mut spaces = 0;
    for m in 1..=3u32 {
        let alphabet = grid(m);
        for n in 1..=4 {
            for x in common::all_grid_spaces(n, m) {
                let mut got: Vec<Vec<Rat>> = enumerate_katetov(&x, &alphabet).into_iter().map(|f| f.into_values()).collect();
                got.sort();
                let want: Vec<Vec<Rat>> = common::product(&alphabet, n)
                    .into_iter()
                    .filter(|f| {
                        (0..n).all(|i| {
                            (0..n).all(|j| f[i].abs_diff(f[j]) <= x.d(i, j) && x.d(i, j) <= f[i] + f[j])
                        })
                    })
                    .collect();
                ensure!(got == want, "enumeration differs on {:?}", x.rows());
                spaces += 1;
            }
        }
    }
    let mut rng = common::rng(0x5eed);
    let mut checked = 0;
    while checked < 10_000 {
        let m = rng.gen_range(1..=5u32);
        let n = rng.gen_range(1..=5usize);
        let x = common::random_grid_space(&mut rng, n, m);
        let q = rng.gen_range(1..=24i64);
        let mut rows = x.rows();
        let col: Vec<Rat> = (0..n).map(|_| r(rng.gen_range(1..=q), q)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(col[i]);
        }
        rows.push(col.iter().copied().chain([Rat::ZERO]).collect());
        let Ok(ambient) = FiniteMetricSpace::new(rows) else { continue };
        checked += 1;
        let xs: Vec<usize> = (0..n).collect();
        let ok = match claim_map(&ambient, &xs, n, m).map_err(|e| e.to_string())? {
            ClaimOutcome::Map { base, map } => is_katetov(&base, map.values()).unwrap_or(false),
            ClaimOutcome::GridAligned { profile } => {
                is_katetov(&ambient.restrict(&xs).unwrap(), profile.values()).unwrap_or(false)
            }
        };
        ensure!(ok, "claim map not Katetov on {:?}", ambient.rows());
    }
    Ok(format!("enumeration matches on {spaces} spaces; 10^4 claim maps Katetov"))
}

/// All 3-point `[0,1]_3` spaces up to isometry, excluding the forbidden one.
fn thirds_triangles() -> Vec<FiniteMetricSpace> {
    let mut out = Vec::new();
    for a in 1..=3 {
        for b in a..=3 {
            for c in b..=3 {
                if c <= a + b && !(a == 1 && b == 1 && c == 3) {
                    out.push(
                        FiniteMetricSpace::new(vec![
                            vec![Rat::ZERO, r(a, 3), r(b, 3)],
                            vec![r(a, 3), Rat::ZERO, r(c, 3)],
                            vec![r(b, 3), r(c, 3), Rat::ZERO],
                        ])
                        .unwrap(),
                    );
                }
            }
        }
    }
    out
}

fn experiment_baseline() -> Outcome {
    let x = build_approx(&DistanceSet::grid(3), 3, 2, 0).map_err(|e| e.to_string())?.space;
    let targets = thirds_triangles();
    let cfg = ExperimentConfig {
        k: 2,
        eps: Rat::ZERO,
        seeds: (0..100).collect(),
        kinds: vec![ColoringKind::Random],
        timing: false,
    };
    let report = experiment(&x, &targets, &cfg).map_err(|e| e.to_string())?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(|e| e.to_string())?;
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/experiment_thirds_k2.csv");
    let want = std::fs::read(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    ensure!(csv == want, "report differs from {}", golden.display());
    let rates: Vec<String> = report.summary().iter().map(|s| format!("{}/{}", s.successes, s.runs)).collect();
    Ok(format!(
        "infinite-space claims excluded; baseline matches over {} points, success per target {}",
        x.len(),
        rates.join(" ")
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "classification golden", classification_golden),
        (2, "size-4 census", size_four_census),
        (3, "4-values spot checks", four_values_spot_checks),
        (4, "discretization", discretization),
        (5, "hedgehog verification", hedgehog_instances),
        (6, "builder closure", builder_closure),
        (7, "kuratowski embedding", kuratowski),
        (8, "katetov engine", katetov_engine),
        (9, "experiment baseline", experiment_baseline),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {id} {name}: {detail}"),
            Err(detail) => {
                let known = KNOWN_FAILURES.contains(&id);
                println!("FAIL {id} {name}: {detail}{}", if known { " (known)" } else { "" });
                if !known {
                    unexpected.push(id);
                }
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
