//! Geodesic hulls, edge-avoidance entourages and the finite hyperbolicity
//! diagnostics built on them.
//!
//! A pair `(a, b)` is `u_e`-small when some geodesic from `a` to `b` avoids the
//! edge `e`; `u_F` is the intersection over `e ∈ F`. Every entourage question
//! in this module is phrased through that family.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::floyd::{sphere_clusters, FloydError, ScalingFunction};
use crate::graph::{
    geodesics_with_distances, DistanceMatrix, EdgeId, GraphError, LabeledGraph, Path, TrustRegion,
    VertexId, UNREACHED,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Floyd(#[from] FloydError),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex sets are not disjoint (both contain {0})")]
    NotDisjoint(VertexId),
    #[error("vertex {0} lies outside the trusted depth")]
    OutsideTrustedDepth(VertexId),
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("geodesic enumeration exceeded the cap of {0} paths")]
    CapExceeded(usize),
}

/// A geodesic core with optional constant tails at either end.
///
/// A flagged stop means the path is constant beyond that endpoint; a segment
/// with both stops and a single vertex is a constant geodesic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventualGeodesicSegment {
    core: Path,
    pub left_stop: bool,
    pub right_stop: bool,
}

impl EventualGeodesicSegment {
    pub fn new(
        g: &LabeledGraph,
        core: Path,
        left_stop: bool,
        right_stop: bool,
    ) -> Result<Self, FlowError> {
        let verts = core.vertices();
        let Some(&first) = verts.first() else {
            return Err(FlowError::EmptySet);
        };
        for &v in verts {
            g.check_vertex(v)?;
        }
        let dist = g.bfs(first);
        for (i, &v) in verts.iter().enumerate() {
            if dist[v] as usize != i {
                return Err(FlowError::Graph(GraphError::Disconnected(first, v)));
            }
        }
        Ok(EventualGeodesicSegment {
            core,
            left_stop,
            right_stop,
        })
    }

    pub fn constant(v: VertexId) -> Self {
        EventualGeodesicSegment {
            core: Path(vec![v]),
            left_stop: true,
            right_stop: true,
        }
    }

    pub fn core(&self) -> &Path {
        &self.core
    }

    /// The two limit points of the segment.
    pub fn boundary(&self) -> (VertexId, VertexId) {
        (self.core.start(), self.core.end())
    }
}

/// The entourage `u_e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeEntourage {
    pub edge: (VertexId, VertexId),
}

impl EdgeEntourage {
    pub fn new(g: &LabeledGraph, u: VertexId, v: VertexId) -> Result<Self, FlowError> {
        if !g.has_edge(u, v) {
            return Err(FlowError::NotAnEdge(u, v));
        }
        Ok(EdgeEntourage {
            edge: (u.min(v), u.max(v)),
        })
    }

    pub fn contains(&self, g: &LabeledGraph, a: VertexId, b: VertexId) -> Result<bool, FlowError> {
        ue_small(g, self.edge, a, b)
    }
}

/// True iff some geodesic from `a` to `b` avoids `e`. Diagonal pairs are
/// always small.
pub fn ue_small(
    g: &LabeledGraph,
    e: (VertexId, VertexId),
    a: VertexId,
    b: VertexId,
) -> Result<bool, FlowError> {
    g.check_vertex(a)?;
    g.check_vertex(b)?;
    if !g.has_edge(e.0, e.1) {
        return Err(FlowError::NotAnEdge(e.0, e.1));
    }
    if a == b {
        return Ok(true);
    }
    let d = g.bfs(a)[b];
    if d == UNREACHED {
        return Err(GraphError::Disconnected(a, b).into());
    }
    Ok(g.bfs_avoiding(a, e)[b] == d)
}

/// `u_e`-smallness from a distance matrix.
///
/// `e = {x, y}` lies on every geodesic from `a` to `b` exactly when it lies on
/// one, oriented `x → y`, and the geodesic interval between `a` and `b` has a
/// single vertex at the levels of both `x` and `y`.
pub struct EntourageOracle<'a> {
    dist: &'a DistanceMatrix,
}

impl<'a> EntourageOracle<'a> {
    pub fn new(dist: &'a DistanceMatrix) -> Self {
        EntourageOracle { dist }
    }

    pub fn is_small(&self, e: (VertexId, VertexId), a: VertexId, b: VertexId) -> bool {
        if a == b {
            return true;
        }
        let d = self.dist.get(a, b);
        let (x, y) = if self.dist.get(a, e.0) + 1 + self.dist.get(e.1, b) == d {
            (e.0, e.1)
        } else if self.dist.get(a, e.1) + 1 + self.dist.get(e.0, b) == d {
            (e.1, e.0)
        } else {
            return true;
        };
        let (kx, ky) = (self.dist.get(a, x), self.dist.get(a, y));
        let mut at_x = 0;
        let mut at_y = 0;
        for w in 0..self.dist.len() {
            let dw = self.dist.get(a, w);
            if (dw == kx || dw == ky) && dw + self.dist.get(w, b) == d {
                if dw == kx {
                    at_x += 1;
                } else {
                    at_y += 1;
                }
            }
        }
        !(at_x == 1 && at_y == 1)
    }
}

/// Vertex and edge sets of a geodesic hull.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Hull {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Hull {
    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn is_subset_of(&self, other: &Hull) -> bool {
        self.vertices.iter().all(|&v| other.contains_vertex(v))
            && self.edges.iter().all(|&e| other.contains_edge(e))
    }
}

fn check_trusted(set: &[VertexId], trust: Option<&TrustRegion>) -> Result<(), FlowError> {
    if let Some(t) = trust {
        if let Some(&v) = set.iter().find(|&&v| !t.contains(v)) {
            return Err(FlowError::OutsideTrustedDepth(v));
        }
    }
    Ok(())
}

/// Union of all geodesics with both endpoints in `set`, including the
/// constant ones, so the hull always contains `set`.
///
/// For each source `s ∈ set` a vertex `y` is marked when it can reach some
/// target in `set` by steps that increase the distance from `s`; an edge
/// `x → y` climbing one level into a marked `y` lies on a geodesic from `s`
/// into `set`. This covers every geodesic without enumerating them.
pub fn hull(
    g: &LabeledGraph,
    set: &[VertexId],
    trust: Option<&TrustRegion>,
) -> Result<Hull, FlowError> {
    let mut set: Vec<VertexId> = set.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(FlowError::EmptySet);
    }
    for &v in &set {
        g.check_vertex(v)?;
    }
    check_trusted(&set, trust)?;
    let n = g.vertex_count();
    let mut in_set = vec![false; n];
    for &v in &set {
        in_set[v] = true;
    }
    let partial: Vec<Result<(Vec<bool>, Vec<bool>), FlowError>> = set
        .par_iter()
        .map(|&s| {
            let dist = g.bfs(s);
            if let Some(&t) = set.iter().find(|&&t| dist[t] == UNREACHED) {
                return Err(GraphError::Disconnected(s, t).into());
            }
            let mut order: Vec<VertexId> = (0..n).filter(|&v| dist[v] != UNREACHED).collect();
            order.sort_by_key(|&v| std::cmp::Reverse(dist[v]));
            let mut marked = vec![false; n];
            let mut edges = vec![false; g.edge_count()];
            for &y in &order {
                let mut m = in_set[y];
                for &(z, e) in g.incident(y) {
                    if dist[z] == dist[y] + 1 && marked[z] {
                        m = true;
                        edges[e] = true;
                    }
                }
                marked[y] = m;
            }
            Ok((marked, edges))
        })
        .collect();
    let mut vmask = vec![false; n];
    let mut emask = vec![false; g.edge_count()];
    for r in partial {
        let (marked, edges) = r?;
        for (a, b) in vmask.iter_mut().zip(marked) {
            *a |= b;
        }
        for (a, b) in emask.iter_mut().zip(edges) {
            *a |= b;
        }
    }
    Ok(Hull {
        vertices: (0..n).filter(|&v| vmask[v]).collect(),
        edges: (0..g.edge_count()).filter(|&e| emask[e]).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityWitness {
    /// Edge ids, sorted.
    pub edges: Vec<EdgeId>,
    pub geodesics: usize,
}

/// Every geodesic from `a` to `b` for `a ∈ from`, `b ∈ to`, as sorted edge-id
/// lists.
fn geodesic_edge_sets(
    g: &LabeledGraph,
    from: &[VertexId],
    to: &[VertexId],
    cap: usize,
) -> Result<Vec<Vec<EdgeId>>, FlowError> {
    let mut out = Vec::new();
    for &b in to {
        let to_b = g.bfs(b);
        for &a in from {
            let set = geodesics_with_distances(g, a, b, &to_b, cap)?;
            if set.truncated {
                return Err(FlowError::CapExceeded(cap));
            }
            for p in set.paths {
                let mut ids: Vec<EdgeId> = p
                    .edges()
                    .map(|(x, y)| g.edge_id(x, y).expect("path edges exist"))
                    .collect();
                ids.sort_unstable();
                out.push(ids);
            }
        }
    }
    Ok(out)
}

/// A set of edges met by every geodesic from `from` to `to`.
///
/// Greedy hitting set (most geodesics hit first, smallest edge id on ties),
/// followed by a pass that drops redundant edges. Small, not minimum.
pub fn visibility_witness(
    g: &LabeledGraph,
    from: &[VertexId],
    to: &[VertexId],
    cap: usize,
) -> Result<VisibilityWitness, FlowError> {
    if from.is_empty() || to.is_empty() {
        return Err(FlowError::EmptySet);
    }
    for &v in from.iter().chain(to) {
        g.check_vertex(v)?;
    }
    if let Some(&v) = from.iter().find(|v| to.contains(v)) {
        return Err(FlowError::NotDisjoint(v));
    }
    let paths = geodesic_edge_sets(g, from, to, cap)?;
    let mut hit = vec![false; paths.len()];
    let mut chosen: Vec<EdgeId> = Vec::new();
    let mut counts = vec![0usize; g.edge_count()];
    while hit.iter().any(|h| !h) {
        counts.iter_mut().for_each(|c| *c = 0);
        for (p, done) in paths.iter().zip(&hit) {
            if !done {
                for &e in p {
                    counts[e] += 1;
                }
            }
        }
        let best = (0..counts.len())
            .max_by_key(|&e| (counts[e], std::cmp::Reverse(e)))
            .expect("an unhit geodesic has edges");
        chosen.push(best);
        for (p, done) in paths.iter().zip(hit.iter_mut()) {
            if p.binary_search(&best).is_ok() {
                *done = true;
            }
        }
    }
    // drop edges whose removal keeps every geodesic hit, latest picks first
    let mut i = chosen.len();
    while i > 0 {
        i -= 1;
        let candidate: Vec<EdgeId> = chosen
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &e)| e)
            .collect();
        if paths
            .iter()
            .all(|p| candidate.iter().any(|e| p.binary_search(e).is_ok()))
        {
            chosen = candidate;
        }
    }
    chosen.sort_unstable();
    Ok(VisibilityWitness {
        edges: chosen,
        geodesics: paths.len(),
    })
}

/// Fraction of geodesics from `from` to `to` that meet `edges` (1.0 when
/// there are none to check), by full enumeration.
pub fn visibility_hit_rate(
    g: &LabeledGraph,
    from: &[VertexId],
    to: &[VertexId],
    edges: &[EdgeId],
    cap: usize,
) -> Result<f64, FlowError> {
    let paths = geodesic_edge_sets(g, from, to, cap)?;
    if paths.is_empty() {
        return Ok(1.0);
    }
    let hits = paths
        .iter()
        .filter(|p| edges.iter().any(|e| p.binary_search(e).is_ok()))
        .count();
    Ok(hits as f64 / paths.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangleSample {
    /// Every multiset `{x, y, z}` of trusted vertices (bigons included).
    Exhaustive,
    Triples(Vec<[VertexId; 3]>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaEstimate {
    pub delta: u32,
    /// A triangle attaining the maximum.
    pub witness: Option<[VertexId; 3]>,
    pub triangles: u64,
}

/// Per-graph cache of geodesic intervals `I(p, q)`, sorted by distance from
/// `p`.
struct Intervals<'a> {
    g: &'a LabeledGraph,
    dist: &'a DistanceMatrix,
}

impl<'a> Intervals<'a> {
    fn interval(&self, p: VertexId, q: VertexId) -> Vec<VertexId> {
        let d = self.dist.get(p, q);
        let mut out: Vec<VertexId> = (0..self.dist.len())
            .filter(|&w| self.dist.get(p, w) + self.dist.get(w, q) == d)
            .collect();
        out.sort_by_key(|&w| self.dist.get(p, w));
        out
    }

    /// `max` over geodesics `γ` from `p` to `q` of `d(w, γ)`.
    fn farthest_geodesic(&self, w: VertexId, interval: &[VertexId], p: VertexId) -> u32 {
        // bottleneck DP along the interval DAG
        let mut best: Vec<(VertexId, u32)> = Vec::with_capacity(interval.len());
        for &s in interval {
            let level = self.dist.get(p, s);
            let here = self.dist.get(w, s);
            let val = if level == 0 {
                here
            } else {
                let from_prev = best
                    .iter()
                    .rev()
                    .take_while(|(t, _)| self.dist.get(p, *t) + 1 >= level)
                    .filter(|(t, _)| self.dist.get(p, *t) + 1 == level && self.g.has_edge(*t, s))
                    .map(|&(_, b)| b)
                    .max()
                    .expect("interval vertices have a predecessor");
                here.min(from_prev)
            };
            best.push((s, val));
        }
        best.last().expect("interval is nonempty").1
    }

    fn triangle_defect(&self, t: [VertexId; 3]) -> u32 {
        let mut worst = 0;
        for (p, q, r) in [(t[0], t[1], t[2]), (t[1], t[2], t[0]), (t[2], t[0], t[1])] {
            let side = self.interval(p, q);
            let (to_pr, to_qr) = (self.interval(p, r), self.interval(q, r));
            for &w in &side {
                let a = self.farthest_geodesic(w, &to_pr, p);
                if a <= worst {
                    continue;
                }
                let b = self.farthest_geodesic(w, &to_qr, q);
                worst = worst.max(a.min(b));
            }
        }
        worst
    }
}

/// Largest one-sided Hausdorff defect over the sampled geodesic triangles,
/// maximized over every choice of geodesic for each side.
pub fn thin_triangle_delta(
    g: &LabeledGraph,
    sample: &TriangleSample,
    trust: Option<&TrustRegion>,
) -> Result<DeltaEstimate, FlowError> {
    if !g.is_connected() {
        let far = g.bfs(0).iter().position(|&d| d == UNREACHED).unwrap_or(0);
        return Err(GraphError::Disconnected(0, far).into());
    }
    let dist = g.distance_matrix();
    let intervals = Intervals { g, dist: &dist };
    let trusted: Vec<VertexId> = match trust {
        Some(t) => t.vertices(),
        None => (0..g.vertex_count()).collect(),
    };
    let triples: Vec<[VertexId; 3]> = match sample {
        TriangleSample::Exhaustive => {
            let mut v = Vec::new();
            for (i, &x) in trusted.iter().enumerate() {
                for (j, &y) in trusted.iter().enumerate().skip(i) {
                    for &z in &trusted[j..] {
                        v.push([x, y, z]);
                    }
                }
            }
            v
        }
        TriangleSample::Triples(t) => {
            for tri in t {
                for &v in tri {
                    g.check_vertex(v)?;
                }
                check_trusted(tri, trust)?;
            }
            t.clone()
        }
    };
    let best = triples
        .par_iter()
        .map(|&t| (intervals.triangle_defect(t), t))
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        });
    Ok(DeltaEstimate {
        delta: best.map_or(0, |b| b.0),
        witness: best.filter(|b| b.0 > 0).map(|b| b.1),
        triangles: triples.len() as u64,
    })
}

/// Rows of a boolean relation over the trusted vertices, packed 64 per word.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitMatrix {
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix {
            words,
            bits: vec![0; n * words],
        }
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn and_assign(&mut self, other: &BitMatrix) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltHyperbolicityRecord {
    pub edge: EdgeId,
    /// Edges `F` with `u_F² ⊂ u_e` on the trusted vertices, if one was found.
    pub witness: Option<Vec<EdgeId>>,
    /// `1 + max { d(e, w) : w a vertex of F }`.
    pub delta: Option<u32>,
    pub search_radius: u32,
}

struct AltSearch<'a> {
    g: &'a LabeledGraph,
    dist: DistanceMatrix,
    trusted: Vec<VertexId>,
    cache: std::collections::HashMap<EdgeId, BitMatrix>,
}

impl<'a> AltSearch<'a> {
    /// `u_f`-small relation on trusted vertices via BFS with `f` removed.
    fn small(&mut self, f: EdgeId) -> &BitMatrix {
        let (g, trusted, dist) = (self.g, &self.trusted, &self.dist);
        self.cache.entry(f).or_insert_with(|| {
            let mut m = BitMatrix::new(trusted.len());
            for (i, &a) in trusted.iter().enumerate() {
                let avoiding = g.bfs_avoiding(a, g.edge(f));
                for (j, &b) in trusted.iter().enumerate() {
                    if avoiding[b] == dist.get(a, b) {
                        m.set(i, j);
                    }
                }
            }
            m
        })
    }

    /// Whether `u_F ∘ u_F ⊂ u_e` on trusted vertices.
    fn verifies(&mut self, e: EdgeId, f_set: &[EdgeId]) -> bool {
        let n = self.trusted.len();
        let mut uf = BitMatrix::new(n);
        uf.bits.iter_mut().for_each(|w| *w = u64::MAX);
        for &f in f_set {
            let m = self.small(f).clone();
            uf.and_assign(&m);
        }
        let ue = self.small(e).clone();
        for x in 0..n {
            for z in 0..n {
                if ue.get(x, z) {
                    continue;
                }
                // u_F is symmetric, so column z equals row z
                if uf.row(x).iter().zip(uf.row(z)).any(|(a, b)| a & b != 0) {
                    return false;
                }
            }
        }
        true
    }

    fn edge_distance(&self, e: EdgeId, f: EdgeId) -> u32 {
        let ((a, b), (c, d)) = (self.g.edge(e), self.g.edge(f));
        [(a, c), (a, d), (b, c), (b, d)]
            .iter()
            .map(|&(x, y)| self.dist.get(x, y))
            .min()
            .expect("four pairs")
    }

    fn vertex_distance(&self, e: EdgeId, w: VertexId) -> u32 {
        let (a, b) = self.g.edge(e);
        self.dist.get(a, w).min(self.dist.get(b, w))
    }

    fn delta_for(&self, e: EdgeId, f_set: &[EdgeId]) -> u32 {
        1 + f_set
            .iter()
            .flat_map(|&f| {
                let (x, y) = self.g.edge(f);
                [x, y]
            })
            .map(|w| self.vertex_distance(e, w))
            .max()
            .unwrap_or(0)
    }
}

/// For each probe edge `e`, searches for a finite `F` with `u_F² ⊂ u_e`
/// (verified by a full triple scan over the trusted vertices) and reports the
/// resulting `δ = 1 + max d(e, F⁰)`.
///
/// Candidates are `{e}` and then all edges within distance `r` of `e`,
/// `r = 0..=search_radius`; the first that verifies is pruned greedily,
/// farthest edges first.
pub fn alt_hyperbolicity_delta(
    g: &LabeledGraph,
    probe_edges: &[EdgeId],
    trust: Option<&TrustRegion>,
    search_radius: u32,
) -> Result<Vec<AltHyperbolicityRecord>, FlowError> {
    if !g.is_connected() {
        let far = g.bfs(0).iter().position(|&d| d == UNREACHED).unwrap_or(0);
        return Err(GraphError::Disconnected(0, far).into());
    }
    for &e in probe_edges {
        if e >= g.edge_count() {
            return Err(FlowError::NotAnEdge(e, e));
        }
    }
    let trusted = match trust {
        Some(t) => t.vertices(),
        None => (0..g.vertex_count()).collect(),
    };
    let mut search = AltSearch {
        g,
        dist: g.distance_matrix(),
        trusted,
        cache: Default::default(),
    };
    let mut out = Vec::new();
    for &e in probe_edges {
        let mut candidates: Vec<Vec<EdgeId>> = vec![vec![e]];
        for r in 0..=search_radius {
            let mut ring: Vec<EdgeId> = (0..g.edge_count())
                .filter(|&f| search.edge_distance(e, f) <= r)
                .collect();
            ring.sort_unstable();
            if candidates.last() != Some(&ring) {
                candidates.push(ring);
            }
        }
        let found = candidates.into_iter().find(|c| search.verifies(e, c));
        let witness = found.map(|mut f_set| {
            let mut order = f_set.clone();
            order.sort_by_key(|&f| {
                (
                    std::cmp::Reverse(search.edge_distance(e, f)),
                    std::cmp::Reverse(f),
                )
            });
            for f in order {
                if f_set.len() == 1 {
                    break;
                }
                let trial: Vec<EdgeId> = f_set.iter().copied().filter(|&x| x != f).collect();
                if search.verifies(e, &trial) {
                    f_set = trial;
                }
            }
            f_set
        });
        out.push(AltHyperbolicityRecord {
            edge: e,
            delta: witness.as_ref().map(|f| search.delta_for(e, f)),
            witness,
            search_radius,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorocycleCandidate {
    pub cluster: usize,
    pub ray_a: Path,
    pub ray_b: Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorocycleReport {
    pub depth: u32,
    pub core_depth: u32,
    pub clusters: usize,
    pub rays: usize,
    pub candidates: Vec<HorocycleCandidate>,
}

/// Looks for pairs of geodesic rays from `base` whose endpoints fall in one
/// Floyd cluster of the sphere of radius `depth` while the rays stay apart:
/// `d(γ₁(k), γ₂(k)) = 2k` at the core depth `k = max(1, depth/2)`, so
/// `γ₁⁻¹γ₂` is geodesic through the base up to depth `k`. Such a pair is a
/// finite candidate for a geodesic horocycle; an empty report is the expected
/// outcome on graphs without them.
pub fn horocycle_scan(
    g: &LabeledGraph,
    base: VertexId,
    f: &ScalingFunction,
    depth: u32,
    cluster_eps: Option<f64>,
    cap: usize,
) -> Result<HorocycleReport, FlowError> {
    let eps = cluster_eps.unwrap_or_else(|| f.default_cluster_eps(depth as usize));
    let clusters = sphere_clusters(g, base, f, depth, eps)?;
    let core = (depth / 2).max(1).min(depth);
    let mut candidates = Vec::new();
    let mut ray_total = 0;
    for (ci, cluster) in clusters.iter().enumerate() {
        let mut rays = Vec::new();
        for &s in cluster {
            let to_s = g.bfs(s);
            let set = geodesics_with_distances(g, base, s, &to_s, cap)?;
            if set.truncated {
                return Err(FlowError::CapExceeded(cap));
            }
            rays.extend(set.paths);
        }
        ray_total += rays.len();
        let mut seen = BTreeSet::new();
        for i in 0..rays.len() {
            let xi = rays[i].vertices()[core as usize];
            let di = g.bfs(xi);
            for j in i + 1..rays.len() {
                let xj = rays[j].vertices()[core as usize];
                if di[xj] == 2 * core && seen.insert((i, j)) {
                    candidates.push(HorocycleCandidate {
                        cluster: ci,
                        ray_a: rays[i].clone(),
                        ray_b: rays[j].clone(),
                    });
                }
            }
        }
    }
    Ok(HorocycleReport {
        depth,
        core_depth: core,
        clusters: clusters.len(),
        rays: ray_total,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cayley_ball, geodesics_between, DEFAULT_BALL_CAP, DEFAULT_GEODESIC_CAP};
    use crate::words::Basis;

    fn ball(rank: usize, radius: usize) -> LabeledGraph {
        cayley_ball(&Basis::standard(rank), radius, DEFAULT_BALL_CAP).unwrap()
    }

    #[test]
    fn tree_hull_is_axis_segment() {
        let g = ball(2, 3);
        let set = [g.vertex("a a").unwrap(), g.vertex("A A").unwrap()];
        let h = hull(&g, &set, None).unwrap();
        let expect: BTreeSet<VertexId> = ["A A", "A", "", "a", "a a"]
            .iter()
            .map(|w| g.vertex(w).unwrap())
            .collect();
        assert_eq!(h.vertices.iter().copied().collect::<BTreeSet<_>>(), expect);
        assert_eq!(h.edges.len(), 4);
    }

    #[test]
    fn singleton_hull() {
        let g = ball(2, 2);
        let h = hull(&g, &[5], None).unwrap();
        assert_eq!(h.vertices, vec![5]);
        assert!(h.edges.is_empty());
        assert_eq!(hull(&g, &[], None), Err(FlowError::EmptySet));
    }

    #[test]
    fn square_hull_is_whole_cycle() {
        let g = LabeledGraph::cycle(4);
        let h = hull(&g, &[0, 2], None).unwrap();
        assert_eq!(h.vertices, vec![0, 1, 2, 3]);
        assert_eq!(h.edges.len(), 4);
    }

    #[test]
    fn hull_respects_trust_region() {
        let g = ball(2, 4);
        let t = TrustRegion::for_ball(&g, 4).unwrap();
        let deep = g.vertex("a a a a").unwrap();
        assert_eq!(
            hull(&g, &[0, deep], Some(&t)),
            Err(FlowError::OutsideTrustedDepth(deep))
        );
    }

    #[test]
    fn hull_matches_enumeration_on_grid() {
        let g = LabeledGraph::grid(4, 5);
        let set = [0, 7, 19, 13];
        let h = hull(&g, &set, None).unwrap();
        let mut verts = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for &a in &set {
            for &b in &set {
                for p in geodesics_between(&g, a, b, usize::MAX).unwrap().paths {
                    verts.extend(p.vertices().iter().copied());
                    edges.extend(p.edges().map(|(x, y)| g.edge_id(x, y).unwrap()));
                }
            }
        }
        assert_eq!(h.vertices, verts.into_iter().collect::<Vec<_>>());
        assert_eq!(h.edges, edges.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn ue_small_examples() {
        let g = ball(2, 2);
        let (aa, e, a) = (g.vertex("a a").unwrap(), 0, g.vertex("a").unwrap());
        assert!(!ue_small(&g, (e, a), aa, g.vertex("b").unwrap()).unwrap());
        assert!(ue_small(&g, (e, a), aa, aa).unwrap());
        let sq = LabeledGraph::cycle(4);
        for &(x, y) in sq.edges() {
            assert!(ue_small(&sq, (x, y), 0, 2).unwrap());
        }
        assert_eq!(ue_small(&sq, (0, 2), 1, 3), Err(FlowError::NotAnEdge(0, 2)));
    }

    #[test]
    fn entourage_routes_agree() {
        for g in [ball(2, 2), LabeledGraph::grid(3, 4), LabeledGraph::cycle(7)] {
            let dist = g.distance_matrix();
            let oracle = EntourageOracle::new(&dist);
            for &e in g.edges() {
                for a in 0..g.vertex_count() {
                    for b in 0..g.vertex_count() {
                        let slow = ue_small(&g, e, a, b).unwrap();
                        assert_eq!(slow, oracle.is_small(e, a, b));
                        assert_eq!(slow, ue_small(&g, e, b, a).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn visibility_examples() {
        let g = ball(2, 2);
        let w = visibility_witness(
            &g,
            &[g.vertex("a a").unwrap()],
            &[g.vertex("b b").unwrap()],
            DEFAULT_GEODESIC_CAP,
        )
        .unwrap();
        assert_eq!(w.edges, vec![g.edge_id(0, g.vertex("a").unwrap()).unwrap()]);

        let (u, v) = (g.vertex("a").unwrap(), g.vertex("a b").unwrap());
        let w = visibility_witness(&g, &[u], &[v], 10).unwrap();
        assert_eq!(w.edges, vec![g.edge_id(u, v).unwrap()]);

        let sq = LabeledGraph::cycle(4);
        let w = visibility_witness(&sq, &[0], &[2], 10).unwrap();
        assert!(w.edges.len() >= 2);
        assert_eq!(
            visibility_hit_rate(&sq, &[0], &[2], &w.edges, 10).unwrap(),
            1.0
        );
        assert_eq!(
            visibility_witness(&sq, &[0, 1], &[1], 10),
            Err(FlowError::NotDisjoint(1))
        );
    }

    #[test]
    fn tree_triangles_are_thin() {
        let g = ball(2, 3);
        let d = thin_triangle_delta(&g, &TriangleSample::Exhaustive, None).unwrap();
        assert_eq!(d.delta, 0);
        assert!(d.witness.is_none());
    }

    #[test]
    fn square_bigon_has_width_one() {
        let g = LabeledGraph::cycle(4);
        let d = thin_triangle_delta(&g, &TriangleSample::Triples(vec![[0, 2, 2]]), None).unwrap();
        assert_eq!(d.delta, 1);
    }

    #[test]
    fn tree_alt_hyperbolicity() {
        let g = ball(2, 2);
        let probes: Vec<EdgeId> = (0..g.edge_count()).collect();
        for r in alt_hyperbolicity_delta(&g, &probes, None, 2).unwrap() {
            assert_eq!(r.witness, Some(vec![r.edge]));
            assert_eq!(r.delta, Some(1));
        }
    }

    #[test]
    fn square_alt_hyperbolicity() {
        let g = LabeledGraph::cycle(4);
        let probes: Vec<EdgeId> = (0..4).collect();
        for r in alt_hyperbolicity_delta(&g, &probes, None, 2).unwrap() {
            assert_eq!(r.delta, Some(2));
            // e together with both edges adjacent to it
            assert_eq!(r.witness.as_ref().unwrap().len(), 3);
        }
    }

    #[test]
    fn alt_search_reports_missing_witness() {
        let g = LabeledGraph::cycle(4);
        let r = alt_hyperbolicity_delta(&g, &[0], None, 0).unwrap();
        // radius 0 already contains e and its neighbours
        assert!(r[0].witness.is_some());
        let g = LabeledGraph::cycle(12);
        let r = alt_hyperbolicity_delta(&g, &[0], None, 0).unwrap();
        assert_eq!(r[0].witness, None);
        assert_eq!(r[0].delta, None);
    }

    #[test]
    fn eventual_segment_validation() {
        let g = ball(2, 2);
        let a = g.vertex("a").unwrap();
        let seg = EventualGeodesicSegment::new(&g, Path(vec![0, a]), true, false).unwrap();
        assert_eq!(seg.boundary(), (0, a));
        assert!(EventualGeodesicSegment::new(&g, Path(vec![a, 0, a]), false, false).is_err());
        assert_eq!(EventualGeodesicSegment::constant(3).boundary(), (3, 3));
        let ent = EdgeEntourage::new(&g, a, 0).unwrap();
        assert!(ent.contains(&g, 4, 4).unwrap());
        assert!(EdgeEntourage::new(&g, a, g.vertex("b").unwrap()).is_err());
    }

    #[test]
    fn tree_has_no_horocycles() {
        let g = ball(2, 4);
        let f = ScalingFunction::geometric(1, 2).unwrap();
        for depth in 2..=4 {
            let r = horocycle_scan(&g, 0, &f, depth, None, DEFAULT_GEODESIC_CAP).unwrap();
            assert!(r.candidates.is_empty());
        }
    }

    #[test]
    fn cycle_antipode_is_flagged() {
        let r = 6;
        let g = LabeledGraph::cycle(2 * r);
        let f = ScalingFunction::geometric(1, 2).unwrap();
        let rep = horocycle_scan(&g, 0, &f, r as u32, None, DEFAULT_GEODESIC_CAP).unwrap();
        assert_eq!(rep.clusters, 1);
        assert_eq!(rep.rays, 2);
        assert_eq!(rep.candidates.len(), 1);
        assert_eq!(rep.candidates[0].ray_a.end(), r);
    }
}
