//! The hedgehog graph: a coarse space `X` (the `ceil_m` image of a fine
//! rational space) together with a tree `T` of isometry-coherent index
//! sequences, a partial edge labelling and the capped path metric it induces.
//!
//! Vertices `0..points` are the points of `X`; the remaining vertices are
//! tree nodes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretize::ceil_m;
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Vertex {
    Point { index: usize },
    Node { set: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hedgehog {
    m: u32,
    fine: FiniteMetricSpace,
    coarse: FiniteMetricSpace,
    nodes: Vec<Vec<usize>>,
    /// Dense `n × n` label matrix, `None` off the domain.
    labels: Vec<Option<Rat>>,
}

#[derive(Serialize)]
struct GraphJson<'a> {
    m: u32,
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize, &'a Rat)>,
}

fn is_prefix(s: &[usize], t: &[usize]) -> bool {
    s.len() < t.len() && t.starts_with(s)
}

impl Hedgehog {
    /// Builds the graph over `fine` with `coarse = ceil_metric(fine, m)`,
    /// enumerating tree nodes of at most `max_tree` elements.
    pub fn build(fine: &FiniteMetricSpace, coarse: &FiniteMetricSpace, m: u32, max_tree: usize) -> Result<Self> {
        if fine.len() != coarse.len() {
            return Err(Error::Precondition("fine and coarse spaces differ in size".into()));
        }
        if !fine.is_valid() {
            return Err(Error::NotMetric("fine space".into()));
        }
        let p = fine.len();
        for i in 0..p {
            for j in 0..p {
                if i != j && ceil_m(fine.d(i, j), m)?.value() != coarse.d(i, j) {
                    return Err(Error::Precondition(format!(
                        "coarse d({i},{j}) = {} is not the ceiling of {}",
                        coarse.d(i, j),
                        fine.d(i, j)
                    )));
                }
            }
        }
        let nodes = tree_nodes(coarse, max_tree);
        let n = p + nodes.len();
        let mut labels = vec![None; n * n];
        let inv_m = Rat::new(1, m as i64);
        let mut set = |a: usize, b: usize, v: Rat| {
            labels[a * n + b] = Some(v);
            labels[b * n + a] = Some(v);
        };
        for i in 0..p {
            for j in (i + 1)..p {
                set(i, j, coarse.d(i, j));
            }
        }
        for (a, s) in nodes.iter().enumerate() {
            set(p + a, *s.last().expect("nodes are nonempty"), inv_m);
            for (b, t) in nodes.iter().enumerate().skip(a + 1) {
                if is_prefix(s, t) || is_prefix(t, s) {
                    set(p + a, p + b, fine.d(s.len() - 1, t.len() - 1));
                }
            }
        }
        Ok(Hedgehog { m, fine: fine.clone(), coarse: coarse.clone(), nodes, labels })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn points(&self) -> usize {
        self.fine.len()
    }

    pub fn nodes(&self) -> &[Vec<usize>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.points() + self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_point(&self, v: usize) -> bool {
        v < self.points()
    }

    pub fn node(&self, v: usize) -> Option<&[usize]> {
        v.checked_sub(self.points()).map(|a| self.nodes[a].as_slice())
    }

    pub fn vertex(&self, v: usize) -> Vertex {
        match self.node(v) {
            None => Vertex::Point { index: v },
            Some(s) => Vertex::Node { set: s.to_vec() },
        }
    }

    pub fn node_vertex(&self, set: &[usize]) -> Option<usize> {
        self.nodes.iter().position(|s| s == set).map(|a| a + self.points())
    }

    /// The point a vertex projects to: itself, or `x_{max t}` for a node.
    pub fn projection(&self, v: usize) -> usize {
        match self.node(v) {
            None => v,
            Some(s) => *s.last().expect("nonempty"),
        }
    }

    pub fn label(&self, a: usize, b: usize) -> Option<Rat> {
        self.labels[a * self.len() + b]
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = (usize, Rat)> + '_ {
        let n = self.len();
        self.labels[a * n..(a + 1) * n]
            .iter()
            .enumerate()
            .filter_map(|(b, l)| l.map(|v| (b, v)))
    }

    pub fn edges(&self) -> Vec<(usize, usize, Rat)> {
        let n = self.len();
        (0..n)
            .flat_map(|a| ((a + 1)..n).filter_map(move |b| self.label(a, b).map(|v| (a, b, v))))
            .collect()
    }

    /// `s` strictly below `t` in the tree order (proper prefix).
    pub fn below(&self, s: usize, t: usize) -> bool {
        match (self.node(s), self.node(t)) {
            (Some(a), Some(b)) => is_prefix(a, b),
            _ => false,
        }
    }

    pub fn comparable(&self, s: usize, t: usize) -> bool {
        s == t || self.below(s, t) || self.below(t, s)
    }

    pub fn to_json(&self) -> Result<String> {
        let edges = self.edges();
        let g = GraphJson {
            m: self.m,
            vertices: (0..self.len()).map(|v| self.vertex(v)).collect(),
            edges: edges.iter().map(|(a, b, v)| (*a, *b, v)).collect(),
        };
        Ok(serde_json::to_string_pretty(&g)?)
    }

    /// Maximal chains of the built tree, one per node without an extension,
    /// each listed from the root up.
    pub fn branches(&self) -> Vec<Vec<usize>> {
        let p = self.points();
        (0..self.nodes.len())
            .filter(|&a| !self.nodes.iter().any(|t| is_prefix(&self.nodes[a], t)))
            .map(|a| {
                let top = &self.nodes[a];
                (1..=top.len())
                    .map(|k| self.node_vertex(&top[..k]).expect("prefixes of nodes are nodes"))
                    .collect::<Vec<_>>()
            })
            .inspect(|b| debug_assert!(b.iter().all(|&v| v >= p)))
            .collect()
    }
}

/// Strictly increasing index sequences `t` of length `1..=max_len` such that
/// `x_i -> x_{t_i}` is an isometry of the coarse space. Sorted by length,
/// then lexicographically.
fn tree_nodes(coarse: &FiniteMetricSpace, max_len: usize) -> Vec<Vec<usize>> {
    let p = coarse.len();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..p).map(|i| vec![i]).collect();
    for len in 1..=max_len.min(p) {
        out.extend(layer.iter().cloned());
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for t in &layer {
            let k = t.len();
            for x in (t[k - 1] + 1)..p {
                if (0..k).all(|i| coarse.d(t[i], x) == coarse.d(i, k)) {
                    let mut u = t.clone();
                    u.push(x);
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    out
}

/// All-pairs capped shortest-path distances, `min(shortest path, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathMetric {
    n: usize,
    d: Vec<Rat>,
}

impl PathMetric {
    pub fn d(&self, a: usize, b: usize) -> Rat {
        self.d[a * self.n + b]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::from_rows((0..self.n).map(|a| self.d[a * self.n..(a + 1) * self.n].to_vec()).collect())
    }
}

pub fn path_metric(g: &Hedgehog) -> Result<PathMetric> {
    let n = g.len();
    let adj: Vec<Vec<(usize, Rat)>> = (0..n).map(|a| g.neighbors(a).collect()).collect();
    let rows: Vec<Vec<Option<Rat>>> = (0..n).into_par_iter().map(|s| dijkstra(&adj, s)).collect();
    let mut d = Vec::with_capacity(n * n);
    for (s, row) in rows.into_iter().enumerate() {
        for (t, v) in row.into_iter().enumerate() {
            let v = v.ok_or(Error::Disconnected { from: s, to: t })?;
            d.push(v.min(Rat::ONE));
        }
    }
    Ok(PathMetric { n, d })
}

fn dijkstra(adj: &[Vec<(usize, Rat)>], s: usize) -> Vec<Option<Rat>> {
    let mut dist: Vec<Option<Rat>> = vec![None; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(Rat::ZERO);
    heap.push(Reverse((Rat::ZERO, s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Shape of an irreducible cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Points,
    Nodes,
    /// Two points and two comparable nodes, each node next to its projection.
    Comparable,
    /// One point, two incomparable nodes over it and a common lower node.
    Fork,
    /// Two points, two nodes over them and a common lower node.
    TwoPointFork,
    Unmatched,
}

impl CycleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CycleKind::Points => "points",
            CycleKind::Nodes => "nodes",
            CycleKind::Comparable => "comparable",
            CycleKind::Fork => "fork",
            CycleKind::TwoPointFork => "two_point_fork",
            CycleKind::Unmatched => "unmatched",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRecord {
    /// Starts at the least vertex; the second entry is less than the last.
    pub vertices: Vec<usize>,
    pub kind: CycleKind,
    pub metric: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCensus {
    pub max_len: usize,
    pub cycles: Vec<CycleRecord>,
}

impl CycleCensus {
    pub fn violations(&self) -> impl Iterator<Item = (&CycleRecord, &String)> {
        self.cycles.iter().flat_map(|c| c.violations.iter().map(move |v| (c, v)))
    }

    pub fn violation_count(&self) -> usize {
        self.cycles.iter().map(|c| c.violations.len()).sum()
    }

    pub fn count(&self, kind: CycleKind, len: usize) -> usize {
        self.cycles.iter().filter(|c| c.kind == kind && c.vertices.len() == len).count()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["cycle_id", "length", "kind", "vertices", "metric", "violations"])?;
        for (i, c) in self.cycles.iter().enumerate() {
            let vs: Vec<String> = c.vertices.iter().map(usize::to_string).collect();
            out.write_record([
                i.to_string(),
                c.vertices.len().to_string(),
                c.kind.as_str().to_string(),
                vs.join(" "),
                c.metric.to_string(),
                c.violations.join("; "),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub const DEFAULT_MAX_CYCLE: usize = 6;

/// Enumerates every chordless cycle of length `3..=max_len` and checks its
/// shape and the polygon inequalities. Cycles longer than five are reported
/// as violations.
pub fn classify_cycles(g: &Hedgehog, max_len: usize) -> Result<CycleCensus> {
    if max_len < 3 {
        return Err(Error::InvalidArgument("max_len must be at least 3".into()));
    }
    let n = g.len();
    let mut cycles: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut found = Vec::new();
            let mut path = vec![s];
            chordless_from(g, s, max_len, &mut path, &mut found);
            found
        })
        .collect();
    cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let cycles = cycles.into_iter().map(|c| inspect_cycle(g, c)).collect();
    Ok(CycleCensus { max_len, cycles })
}

fn chordless_from(g: &Hedgehog, s: usize, max_len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *path.last().expect("nonempty");
    let k = path.len();
    for (w, _) in g.neighbors(last) {
        if w <= s || path.contains(&w) {
            continue;
        }
        if k > 2 && path[1..k - 1].iter().any(|&v| g.label(v, w).is_some()) {
            continue;
        }
        let closes = k >= 2 && g.label(s, w).is_some();
        if closes {
            if path[1] < w {
                let mut c = path.clone();
                c.push(w);
                out.push(c);
            }
        } else if k + 1 < max_len {
            path.push(w);
            chordless_from(g, s, max_len, path, out);
            path.pop();
        }
    }
}

fn inspect_cycle(g: &Hedgehog, c: Vec<usize>) -> CycleRecord {
    let len = c.len();
    let edge = |i: usize| g.label(c[i], c[(i + 1) % len]).expect("cycle edges are labelled");
    let weights: Vec<Rat> = (0..len).map(edge).collect();
    let total: Rat = weights.iter().copied().sum();
    let metric = weights.iter().all(|&w| w + w <= total);
    let mut violations = Vec::new();
    if !metric {
        violations.push("not metric".into());
    }
    if len > 5 {
        violations.push(format!("irreducible cycle of length {len}"));
    }
    let points = c.iter().filter(|&&v| g.is_point(v)).count();
    let kind = if points == len {
        if len != 3 {
            violations.push(format!("point cycle of length {len}"));
        }
        CycleKind::Points
    } else if points == 0 {
        let chain = c.iter().all(|&a| c.iter().all(|&b| g.comparable(a, b)));
        if len != 3 || !chain {
            violations.push("node cycle is not a 3-chain".into());
        }
        CycleKind::Nodes
    } else {
        match mixed_shape(g, &c) {
            Some((kind, ok)) => {
                if !ok {
                    violations.push(format!("{} inequality fails", kind.as_str()));
                }
                kind
            }
            None => {
                violations.push("mixed cycle matches no known shape".into());
                CycleKind::Unmatched
            }
        }
    };
    CycleRecord { vertices: c, kind, metric, violations }
}

/// Rotates the cycle so it starts at a point and, when there are two points,
/// so that the second point is last. Returns the shape and whether its
/// characteristic inequality holds.
fn mixed_shape(g: &Hedgehog, c: &[usize]) -> Option<(CycleKind, bool)> {
    let len = c.len();
    let pos: Vec<usize> = (0..len).filter(|&i| g.is_point(c[i])).collect();
    let two_m = Rat::new(2, g.m() as i64);
    let l = |a: usize, b: usize| g.label(a, b).expect("labelled");
    match pos.as_slice() {
        [i] => {
            if len != 4 {
                return None;
            }
            let z: Vec<usize> = (0..4).map(|k| c[(i + k) % 4]).collect();
            let (z0, z1, z2, z3) = (z[0], z[1], z[2], z[3]);
            let shape = g.projection(z1) == z0
                && g.projection(z3) == z0
                && !g.comparable(z1, z3)
                && g.below(z2, z1)
                && g.below(z2, z3);
            if !shape {
                return None;
            }
            Some((CycleKind::Fork, l(z1, z2).abs_diff(l(z2, z3)) <= two_m))
        }
        [a, b] => {
            // orient so the points sit at the two ends: z0, nodes..., z_last
            let start = if (a + 1) % len == *b { *b } else if (b + 1) % len == *a { *a } else { return None };
            let z: Vec<usize> = (0..len).map(|k| c[(start + k) % len]).collect();
            let (z0, zl) = (z[0], z[len - 1]);
            let first = z[1];
            let last = z[len - 2];
            if g.projection(first) != z0 || g.projection(last) != zl {
                return None;
            }
            match len {
                4 => {
                    if !g.comparable(first, last) {
                        return None;
                    }
                    let ceil = ceil_m(l(first, last), g.m()).ok()?.value();
                    Some((CycleKind::Comparable, l(z0, zl) == ceil))
                }
                5 => {
                    let mid = z[2];
                    if g.comparable(first, last) || !g.below(mid, first) || !g.below(mid, last) {
                        return None;
                    }
                    let (d12, d23, d04) = (l(first, mid), l(mid, last), l(z0, zl));
                    Some((CycleKind::TwoPointFork, d12 <= d23 + d04 + two_m && d04 <= d12 + d23 + two_m))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchReport {
    pub branch: Vec<usize>,
    /// `d^Z(b(i), b(j)) = d_fine(y_i, y_j)` for all heights.
    pub isometric: bool,
    /// Every node sits at exactly `1/m` from its projection.
    pub projections_at_inverse_m: bool,
    pub mismatches: Vec<(usize, usize)>,
}

impl BranchReport {
    pub fn ok(&self) -> bool {
        self.isometric && self.projections_at_inverse_m
    }
}

/// Checks a chain of nodes listed from the root up against the fine metric.
pub fn branch_cover_check(g: &Hedgehog, dz: &PathMetric, branch: &[usize]) -> Result<BranchReport> {
    for (h, &v) in branch.iter().enumerate() {
        match g.node(v) {
            Some(s) if s.len() == h + 1 => {}
            _ => return Err(Error::Precondition(format!("vertex {v} is not a node of height {h}"))),
        }
        if h > 0 && !g.below(branch[h - 1], v) {
            return Err(Error::Precondition("branch is not a chain".into()));
        }
    }
    let mut mismatches = Vec::new();
    for i in 0..branch.len() {
        for j in (i + 1)..branch.len() {
            if dz.d(branch[i], branch[j]) != g.fine.d(i, j) {
                mismatches.push((i, j));
            }
        }
    }
    let inv_m = Rat::new(1, g.m() as i64);
    let projections_at_inverse_m = branch.iter().all(|&v| dz.d(v, g.projection(v)) == inv_m);
    Ok(BranchReport { branch: branch.to_vec(), isometric: mismatches.is_empty(), projections_at_inverse_m, mismatches })
}

/// Everything checked on one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HedgehogVerification {
    pub vertices: usize,
    pub edges: usize,
    pub extends_labels: bool,
    pub metric: bool,
    pub cycle_violations: usize,
    pub cycles: usize,
    pub branches: usize,
    pub branch_failures: usize,
}

impl HedgehogVerification {
    pub fn ok(&self) -> bool {
        self.extends_labels && self.metric && self.cycle_violations == 0 && self.branch_failures == 0
    }
}

pub fn verify(g: &Hedgehog, max_cycle: usize) -> Result<(HedgehogVerification, CycleCensus)> {
    let dz = path_metric(g)?;
    let edges = g.edges();
    let extends_labels = edges.iter().all(|&(a, b, v)| dz.d(a, b) == v);
    let metric = dz.to_space()?.is_valid();
    let census = classify_cycles(g, max_cycle)?;
    let branches = g.branches();
    let mut branch_failures = 0;
    for b in &branches {
        if !branch_cover_check(g, &dz, b)?.ok() {
            branch_failures += 1;
        }
    }
    let report = HedgehogVerification {
        vertices: g.len(),
        edges: edges.len(),
        extends_labels,
        metric,
        cycle_violations: census.violation_count(),
        cycles: census.cycles.len(),
        branches: branches.len(),
        branch_failures,
    };
    Ok((report, census))
}
