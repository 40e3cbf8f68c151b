//! Finite labeled graphs: Cayley balls, geodesic enumeration and simple-arc
//! counting.
//!
//! Vertices are identified by their label, so building the same graph twice
//! yields identical vertex and edge numbering. Edges are stored once as
//! `(u, v)` with `u < v`, sorted; edge ids are positions in that list.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::words::{ball_size, Basis, Letter, Word};

pub type VertexId = usize;
pub type EdgeId = usize;

pub const UNREACHED: u32 = u32::MAX;

/// Default vertex cap for [`cayley_ball`].
pub const DEFAULT_BALL_CAP: usize = 2_000_000;

/// Default path cap for geodesic enumeration.
pub const DEFAULT_GEODESIC_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("ball of radius {radius} would have {projected} vertices, cap is {cap}")]
    BallTooLarge {
        radius: usize,
        projected: u128,
        cap: usize,
    },
    #[error("basis is empty")]
    EmptyBasis,
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("no vertex labeled `{0}`")]
    UnknownLabel(String),
    #[error("vertices {0} and {1} lie in different components")]
    Disconnected(VertexId, VertexId),
    #[error("arc length must be at least 1")]
    InvalidLength,
    #[error("search budget of {budget} steps exhausted; at least {lower_bound} arcs found")]
    LengthBudgetExceeded { budget: u64, lower_bound: u64 },
    #[error("geodesic enumeration truncated at {0} paths")]
    CapExceeded(usize),
    #[error("duplicate vertex label at index {0}")]
    DuplicateLabel(VertexId),
}

/// What a vertex stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    /// A group element in reduced form.
    Element(Word),
    /// Cone vertex over the coset `representative * R` of peripheral subgroup
    /// number `peripheral`. The representative is shortlex minimal.
    Cone {
        representative: Word,
        peripheral: usize,
    },
    /// A parabolic point tagged by index.
    Parabolic(usize),
    /// Free-form vertex for non-group fixtures (grids, cycles).
    Named(String),
}

impl VertexLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            VertexLabel::Element(_) => "element",
            VertexLabel::Cone { .. } => "cone",
            VertexLabel::Parabolic(_) => "parabolic",
            VertexLabel::Named(_) => "named",
        }
    }

    pub fn as_element(&self) -> Option<&Word> {
        match self {
            VertexLabel::Element(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_cone(&self) -> bool {
        matches!(self, VertexLabel::Cone { .. })
    }
}

/// A finite simple graph with labeled vertices.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    basis: Basis,
    labels: Vec<VertexLabel>,
    index: HashMap<VertexLabel, VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
    adjacency: Vec<Vec<VertexId>>,
    incidence: Vec<Vec<(VertexId, EdgeId)>>,
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.labels == other.labels && self.edges == other.edges
    }
}

impl Eq for LabeledGraph {}

fn normalize(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Incremental construction; vertices keep insertion order, edges are sorted
/// on [`GraphBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    basis: Basis,
    labels: Vec<VertexLabel>,
    index: HashMap<VertexLabel, VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    seen: std::collections::HashSet<(VertexId, VertexId)>,
}

impl GraphBuilder {
    pub fn new(basis: Basis) -> Self {
        GraphBuilder {
            basis,
            ..Default::default()
        }
    }

    /// Returns the id of the vertex with this label, adding it if needed.
    pub fn add_vertex(&mut self, label: VertexLabel) -> VertexId {
        if let Some(&id) = self.index.get(&label) {
            return id;
        }
        let id = self.labels.len();
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        id
    }

    pub fn find(&self, label: &VertexLabel) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Adds an undirected edge; returns false if it was already present.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if w >= self.labels.len() {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        let e = normalize(u, v);
        if self.seen.insert(e) {
            self.edges.push(e);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn build(self) -> LabeledGraph {
        let mut edges = self.edges;
        edges.sort_unstable();
        let mut adjacency = vec![Vec::new(); self.labels.len()];
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push(v);
            adjacency[v].push(u);
            edge_index.insert((u, v), i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let incidence = adjacency
            .iter()
            .enumerate()
            .map(|(u, list)| {
                list.iter()
                    .map(|&v| (v, edge_index[&normalize(u, v)]))
                    .collect()
            })
            .collect();
        LabeledGraph {
            basis: self.basis,
            labels: self.labels,
            index: self.index,
            edges,
            edge_index,
            adjacency,
            incidence,
        }
    }
}

impl LabeledGraph {
    pub fn from_parts(
        basis: Basis,
        labels: Vec<VertexLabel>,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new(basis);
        for (i, l) in labels.into_iter().enumerate() {
            if b.add_vertex(l) != i {
                return Err(GraphError::DuplicateLabel(i));
            }
        }
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Cycle on `n >= 3` vertices named `0..n`.
    pub fn cycle(n: usize) -> Self {
        let mut b = GraphBuilder::default();
        for i in 0..n {
            b.add_vertex(VertexLabel::Named(i.to_string()));
        }
        for i in 0..n {
            b.add_edge(i, (i + 1) % n).expect("cycle edges are valid");
        }
        b.build()
    }

    /// `rows x cols` grid; vertex `(r, c)` has id `r * cols + c` and name `"r,c"`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut b = GraphBuilder::default();
        for r in 0..rows {
            for c in 0..cols {
                b.add_vertex(VertexLabel::Named(format!("{r},{c}")));
            }
        }
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    b.add_edge(v, v + 1).expect("grid edges are valid");
                }
                if r + 1 < rows {
                    b.add_edge(v, v + cols).expect("grid edges are valid");
                }
            }
        }
        b.build()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &VertexLabel {
        &self.labels[v]
    }

    pub fn find(&self, label: &VertexLabel) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn find_element(&self, w: &Word) -> Option<VertexId> {
        self.find(&VertexLabel::Element(w.clone()))
    }

    /// Looks up a group element by its written form, e.g. `"a a"`.
    pub fn vertex(&self, word: &str) -> Result<VertexId, GraphError> {
        let w = self
            .basis
            .parse(word)
            .map_err(|_| GraphError::UnknownLabel(word.to_string()))?;
        self.find_element(&w)
            .ok_or_else(|| GraphError::UnknownLabel(word.to_string()))
    }

    pub fn named(&self, name: &str) -> Result<VertexId, GraphError> {
        self.find(&VertexLabel::Named(name.to_string()))
            .ok_or_else(|| GraphError::UnknownLabel(name.to_string()))
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edge_id(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edge_index.get(&normalize(u, v)).copied()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    /// Neighbors paired with the connecting edge id.
    pub fn incident(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    /// Human-readable vertex label.
    pub fn display_label(&self, v: VertexId) -> String {
        match &self.labels[v] {
            VertexLabel::Element(w) if w.is_identity() => "1".to_string(),
            VertexLabel::Element(w) => self.basis.format(w),
            VertexLabel::Cone {
                representative,
                peripheral,
            } => {
                let rep = if representative.is_identity() {
                    "1".to_string()
                } else {
                    self.basis.format(representative)
                };
                format!("{rep}·R{peripheral}")
            }
            VertexLabel::Parabolic(i) => format!("p{i}"),
            VertexLabel::Named(s) => s.clone(),
        }
    }

    /// Breadth-first distances from `source`; unreachable vertices get
    /// [`UNREACHED`].
    pub fn bfs(&self, source: VertexId) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let d = dist[x] + 1;
            for &y in &self.adjacency[x] {
                if dist[y] == UNREACHED {
                    dist[y] = d;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Distances from `source` with one edge removed.
    pub fn bfs_avoiding(&self, source: VertexId, avoid: (VertexId, VertexId)) -> Vec<u32> {
        let avoid = normalize(avoid.0, avoid.1);
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let d = dist[x] + 1;
            for &y in &self.adjacency[x] {
                if dist[y] == UNREACHED && normalize(x, y) != avoid {
                    dist[y] = d;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.bfs(0).iter().all(|&d| d != UNREACHED)
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count() > 0
            && self.edge_count() + 1 == self.vertex_count()
            && self.is_connected()
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<u32, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        match self.bfs(u)[v] {
            UNREACHED => Err(GraphError::Disconnected(u, v)),
            d => Ok(d),
        }
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.vertex_count();
        let mut data = Vec::with_capacity(n * n);
        for u in 0..n {
            data.extend(self.bfs(u));
        }
        DistanceMatrix { n, data }
    }

    /// The identity element, if present.
    pub fn identity(&self) -> Option<VertexId> {
        self.find_element(&Word::identity())
    }
}

/// All-pairs graph distances, row-major.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, u: VertexId, v: VertexId) -> u32 {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: VertexId) -> &[u32] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Vertices whose depth below a root is at most `radius - margin`; results
/// near the truncation boundary are not trusted.
#[derive(Debug, Clone)]
pub struct TrustRegion {
    pub root: VertexId,
    pub radius: usize,
    pub margin: usize,
    depth: Vec<u32>,
}

impl TrustRegion {
    pub fn new(g: &LabeledGraph, root: VertexId, radius: usize, margin: usize) -> Self {
        TrustRegion {
            root,
            radius,
            margin,
            depth: g.bfs(root),
        }
    }

    /// Default margin `radius / 4`, rooted at the identity.
    pub fn for_ball(g: &LabeledGraph, radius: usize) -> Option<Self> {
        g.identity()
            .map(|root| Self::new(g, root, radius, radius / 4))
    }

    /// Every vertex is trusted.
    pub fn everything(g: &LabeledGraph) -> Self {
        let root = 0;
        TrustRegion {
            root,
            radius: usize::MAX,
            margin: 0,
            depth: vec![0; g.vertex_count()],
        }
    }

    pub fn trusted_depth(&self) -> usize {
        self.radius.saturating_sub(self.margin)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.depth
            .get(v)
            .is_some_and(|&d| d != UNREACHED && (d as usize) <= self.trusted_depth())
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        (0..self.depth.len())
            .filter(|&v| self.contains(v))
            .collect()
    }
}

/// The ball of the given radius in the Cayley graph of the free group on
/// `basis`. Vertices come in shortlex order, so the identity is vertex 0.
pub fn cayley_ball(basis: &Basis, radius: usize, cap: usize) -> Result<LabeledGraph, GraphError> {
    if basis.rank() == 0 {
        return Err(GraphError::EmptyBasis);
    }
    let projected = ball_size(basis.rank(), radius);
    if projected > cap as u128 {
        return Err(GraphError::BallTooLarge {
            radius,
            projected,
            cap,
        });
    }
    let mut b = GraphBuilder::new(basis.clone());
    let mut words = vec![Word::identity()];
    b.add_vertex(VertexLabel::Element(Word::identity()));
    let mut layer = 0..1;
    for _ in 0..radius {
        let start = words.len();
        for i in layer.clone() {
            for code in 0..2 * basis.rank() {
                let l = Letter::from_code(code);
                if words[i].last() == Some(l.inverse()) {
                    continue;
                }
                let w = words[i].times_letter(l);
                let child = b.add_vertex(VertexLabel::Element(w.clone()));
                b.add_edge(i, child)?;
                words.push(w);
            }
        }
        layer = start..words.len();
    }
    Ok(b.build())
}

/// A vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<VertexId>);

impl Path {
    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// Number of edges traversed.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.0[0]
    }

    pub fn end(&self) -> VertexId {
        *self.0.last().expect("paths are nonempty")
    }

    /// Normalized `(min, max)` pairs of consecutive distinct vertices.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.0
            .windows(2)
            .filter(|w| w[0] != w[1])
            .map(|w| normalize(w[0], w[1]))
    }

    pub fn contains_edge(&self, e: (VertexId, VertexId)) -> bool {
        let e = normalize(e.0, e.1);
        self.edges().any(|f| f == e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicSet {
    pub paths: Vec<Path>,
    pub distance: u32,
    /// Set when enumeration stopped at the cap.
    pub truncated: bool,
}

/// All geodesics from `u` to `v`, in lexicographic vertex order, up to `cap`.
pub fn geodesics_between(
    g: &LabeledGraph,
    u: VertexId,
    v: VertexId,
    cap: usize,
) -> Result<GeodesicSet, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let to_v = g.bfs(v);
    geodesics_with_distances(g, u, v, &to_v, cap)
}

/// Like [`geodesics_between`] with precomputed distances to `v`.
pub fn geodesics_with_distances(
    g: &LabeledGraph,
    u: VertexId,
    v: VertexId,
    to_v: &[u32],
    cap: usize,
) -> Result<GeodesicSet, GraphError> {
    let d = to_v[u];
    if d == UNREACHED {
        return Err(GraphError::Disconnected(u, v));
    }
    let mut paths = Vec::new();
    let mut truncated = false;
    // stack of (vertex, next neighbor position)
    let mut current = vec![u];
    let mut cursor = vec![0usize];
    while let Some(&x) = current.last() {
        if x == v {
            if paths.len() == cap {
                truncated = true;
                break;
            }
            paths.push(Path(current.clone()));
            current.pop();
            cursor.pop();
            continue;
        }
        let pos = cursor.last_mut().expect("cursor tracks stack");
        let nbrs = g.neighbors(x);
        let mut advanced = false;
        while *pos < nbrs.len() {
            let y = nbrs[*pos];
            *pos += 1;
            if to_v[y] + 1 == to_v[x] {
                current.push(y);
                cursor.push(0);
                advanced = true;
                break;
            }
        }
        if !advanced {
            current.pop();
            cursor.pop();
        }
    }
    Ok(GeodesicSet {
        paths,
        distance: d,
        truncated,
    })
}

/// Number of simple arcs with exactly `length` edges from `u` to `v`.
///
/// Depth-first search pruned by the graph distance to `v`. `budget` bounds the
/// number of search steps; running out yields
/// [`GraphError::LengthBudgetExceeded`] carrying the partial count.
pub fn simple_arcs_count(
    g: &LabeledGraph,
    u: VertexId,
    v: VertexId,
    length: usize,
    budget: u64,
) -> Result<u64, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if length == 0 {
        return Err(GraphError::InvalidLength);
    }
    if u == v {
        return Ok(0);
    }
    let to_v = g.bfs(v);
    let mut on_path = vec![false; g.vertex_count()];
    let mut count = 0u64;
    let mut steps = 0u64;

    fn dfs(
        g: &LabeledGraph,
        x: VertexId,
        v: VertexId,
        remaining: usize,
        to_v: &[u32],
        on_path: &mut [bool],
        count: &mut u64,
        steps: &mut u64,
        budget: u64,
    ) -> bool {
        *steps += 1;
        if *steps > budget {
            return false;
        }
        if x == v {
            if remaining == 0 {
                *count += 1;
            }
            return true;
        }
        if remaining == 0 || to_v[x] == UNREACHED || to_v[x] as usize > remaining {
            return true;
        }
        on_path[x] = true;
        for &y in g.neighbors(x) {
            if !on_path[y] && !dfs(g, y, v, remaining - 1, to_v, on_path, count, steps, budget) {
                on_path[x] = false;
                return false;
            }
        }
        on_path[x] = false;
        true
    }

    if dfs(
        g,
        u,
        v,
        length,
        &to_v,
        &mut on_path,
        &mut count,
        &mut steps,
        budget,
    ) {
        Ok(count)
    } else {
        Err(GraphError::LengthBudgetExceeded {
            budget,
            lower_bound: count,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinenessEntry {
    pub length: usize,
    /// Maximum number of simple arcs of this length over ordered pairs of
    /// distinct vertices.
    pub max_count: u64,
    /// A pair attaining the maximum (first in vertex order).
    pub pair: Option<(VertexId, VertexId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinenessProfile {
    pub entries: Vec<FinenessEntry>,
}

impl FinenessProfile {
    pub fn max_counts(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.max_count).collect()
    }
}

/// For every length up to `max_length`, the largest simple-arc count over all
/// vertex pairs. One depth-first enumeration per source vertex.
pub fn fineness_profile(
    g: &LabeledGraph,
    max_length: usize,
    budget: u64,
) -> Result<FinenessProfile, GraphError> {
    if max_length == 0 {
        return Err(GraphError::InvalidLength);
    }
    let n = g.vertex_count();
    let mut best = vec![(0u64, None); max_length + 1];
    let mut steps = 0u64;
    let mut counts = vec![vec![0u64; n]; max_length + 1];
    let mut on_path = vec![false; n];
    for source in 0..n {
        for row in counts.iter_mut() {
            row.iter_mut().for_each(|c| *c = 0);
        }
        let mut stack: Vec<(VertexId, usize)> = vec![(source, 0)];
        let mut path: Vec<VertexId> = Vec::new();
        // iterative DFS over simple paths from `source`
        while let Some((x, depth)) = stack.pop() {
            while path.len() > depth {
                on_path[path.pop().expect("nonempty")] = false;
            }
            steps += 1;
            if steps > budget {
                let lower = best.iter().map(|b| b.0).max().unwrap_or(0);
                return Err(GraphError::LengthBudgetExceeded {
                    budget,
                    lower_bound: lower,
                });
            }
            path.push(x);
            on_path[x] = true;
            if depth > 0 {
                counts[depth][x] += 1;
            }
            if depth < max_length {
                for &y in g.neighbors(x).iter().rev() {
                    if !on_path[y] {
                        stack.push((y, depth + 1));
                    }
                }
            }
        }
        for v in path.drain(..) {
            on_path[v] = false;
        }
        for len in 1..=max_length {
            for (target, &c) in counts[len].iter().enumerate() {
                if target != source && c > best[len].0 {
                    best[len] = (c, Some((source, target)));
                }
            }
        }
    }
    Ok(FinenessProfile {
        entries: (1..=max_length)
            .map(|length| FinenessEntry {
                length,
                max_count: best[length].0,
                pair: best[length].1,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinenessTrend {
    pub length: usize,
    /// One count per profile, in the order given.
    pub counts: Vec<u64>,
    /// Strictly increasing across every consecutive pair of profiles.
    pub growing: bool,
}

/// Compares profiles computed at increasing truncation radii. A length whose
/// maximum arc count keeps growing with the radius is a fineness red flag.
pub fn fineness_growth(profiles: &[FinenessProfile]) -> Vec<FinenessTrend> {
    let lengths = profiles.iter().map(|p| p.entries.len()).min().unwrap_or(0);
    (0..lengths)
        .map(|i| {
            let counts: Vec<u64> = profiles.iter().map(|p| p.entries[i].max_count).collect();
            FinenessTrend {
                length: i + 1,
                growing: counts.len() > 1 && counts.windows(2).all(|w| w[1] > w[0]),
                counts,
            }
        })
        .collect()
}
