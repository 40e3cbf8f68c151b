//! Limit-set shadows of subgroups, the hull orbit-class count behind the
//! dynamical quasiconvexity criterion, and the free-group scenario with two
//! incompatible coned trees.
//!
//! The criterion asks whether the hull `C` of the limit set `ΛH` has finitely
//! many edge classes modulo `H`. At finite scale the limit set is replaced by
//! the deep part of the orbit `H·base`, and finiteness by a class count that
//! stops changing across radii. A verdict is evidence, not proof.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::conedoff::{
    coned_tree, peripheral_intersections, ConedError, IntersectionBounds, PairCheck,
    PeripheralStructure,
};
use crate::flow::{hull, FlowError, Hull};
use crate::floyd::{sphere_clusters, FloydError, ScalingFunction};
use crate::graph::{cayley_ball, GraphError, LabeledGraph, VertexId, DEFAULT_BALL_CAP};
use crate::words::{
    Basis, Endomorphism, IntersectionReport, IntersectionVerdict, Letter, Subgroup, Word, WordError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Floyd(#[from] FloydError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Coned(#[from] ConedError),
    #[error("the orbit does not reach depth {depth}")]
    EmptyShadow { depth: usize },
    #[error("depth {depth} exceeds the radius {radius}")]
    DepthTooLarge { depth: usize, radius: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// A subgroup acting on a finite graph by partial translations.
pub trait OrbitModel: Sync {
    type Element: Send + Sync;

    fn graph(&self) -> &LabeledGraph;
    fn base(&self) -> VertexId;
    /// Radius of the region around the base on which the orbit is sampled.
    fn radius(&self) -> usize;
    /// How far an identifying translation may move the base.
    fn reach(&self) -> usize;
    /// Subgroup elements moving the base by at most `bound`.
    fn elements(&self, bound: usize) -> Vec<Self::Element>;
    /// Image of `v`, when it stays in the graph.
    fn act(&self, h: &Self::Element, v: VertexId) -> Option<VertexId>;
}

/// A subgroup of a free group acting on a Cayley ball by left multiplication.
#[derive(Debug, Clone)]
pub struct FreeGroupModel {
    ball: LabeledGraph,
    radius: usize,
    subgroup: Subgroup,
}

impl FreeGroupModel {
    pub fn new(basis: &Basis, radius: usize, subgroup: Subgroup) -> Result<Self, QcError> {
        for g in subgroup.generators() {
            basis.reduce(g.letters())?;
        }
        let ball = cayley_ball(basis, radius, DEFAULT_BALL_CAP)?;
        Ok(FreeGroupModel {
            ball,
            radius,
            subgroup,
        })
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }
}

impl OrbitModel for FreeGroupModel {
    type Element = Word;

    fn graph(&self) -> &LabeledGraph {
        &self.ball
    }

    fn base(&self) -> VertexId {
        0
    }

    fn radius(&self) -> usize {
        self.radius
    }

    fn reach(&self) -> usize {
        2 * self.radius
    }

    /// Breadth-first over products of generators. Intermediate products may
    /// overshoot the bound by one generator length before cancelling back.
    fn elements(&self, bound: usize) -> Vec<Word> {
        let slack = bound + self.subgroup.max_generator_len();
        let steps: Vec<Word> = self
            .subgroup
            .generators()
            .iter()
            .flat_map(|g| [g.clone(), g.inverse()])
            .collect();
        let mut seen: HashSet<Word> = HashSet::from([Word::identity()]);
        let mut frontier = vec![Word::identity()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for h in &frontier {
                for s in &steps {
                    let p = h.product(s);
                    if p.len() <= slack && seen.insert(p.clone()) {
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<Word> = seen.into_iter().filter(|h| h.len() <= bound).collect();
        out.sort();
        out
    }

    fn act(&self, h: &Word, v: VertexId) -> Option<VertexId> {
        let w = self.ball.label(v).as_element()?;
        self.ball.find_element(&h.product(w))
    }
}

/// Diagonal translations `(i, j) ↦ (i + k, j + k)` on an `n × n` grid based at
/// the center: a non-hyperbolic stand-in whose hull classes keep growing.
#[derive(Debug, Clone)]
pub struct GridDiagonalModel {
    grid: LabeledGraph,
    n: usize,
}

impl GridDiagonalModel {
    pub fn new(n: usize) -> Result<Self, QcError> {
        if n < 2 {
            return Err(QcError::InvalidScenario(
                "grid size must be at least 2".into(),
            ));
        }
        Ok(GridDiagonalModel {
            grid: LabeledGraph::grid(n, n),
            n,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn coords(&self, v: VertexId) -> (usize, usize) {
        (v / self.n, v % self.n)
    }
}

impl OrbitModel for GridDiagonalModel {
    type Element = i64;

    fn graph(&self) -> &LabeledGraph {
        &self.grid
    }

    fn base(&self) -> VertexId {
        let c = (self.n - 1) / 2;
        c * self.n + c
    }

    fn radius(&self) -> usize {
        (self.n - 1) / 2
    }

    fn reach(&self) -> usize {
        2 * (self.n - 1)
    }

    fn elements(&self, bound: usize) -> Vec<i64> {
        let k = (bound / 2) as i64;
        (-k..=k).collect()
    }

    fn act(&self, k: &i64, v: VertexId) -> Option<VertexId> {
        let (r, c) = self.coords(v);
        let (r, c) = (r as i64 + k, c as i64 + k);
        let n = self.n as i64;
        ((0..n).contains(&r) && (0..n).contains(&c)).then(|| (r * n + c) as VertexId)
    }
}

/// Default shadow depth: the radius minus a quarter-radius margin (at least
/// one), never below 1.
pub fn default_depth(radius: usize) -> usize {
    radius.saturating_sub((radius / 4).max(1)).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShadowMode {
    /// Orbit points only.
    OrbitTrace,
    /// Orbit points plus the sphere clusters containing them.
    FloydClusters {
        scaling: ScalingFunction,
        eps: Option<f64>,
    },
}

/// Points of `H·base` at distance at least `depth` from the base, sorted.
pub fn limit_shadow<M: OrbitModel>(
    model: &M,
    depth: usize,
    mode: &ShadowMode,
) -> Result<Vec<VertexId>, QcError> {
    if depth > model.radius() {
        return Err(QcError::DepthTooLarge {
            depth,
            radius: model.radius(),
        });
    }
    let g = model.graph();
    let dist = g.bfs(model.base());
    let mut shadow: BTreeSet<VertexId> = model
        .elements(model.reach())
        .iter()
        .filter_map(|h| model.act(h, model.base()))
        .filter(|&v| dist[v] as usize >= depth)
        .collect();
    if shadow.is_empty() {
        return Err(QcError::EmptyShadow { depth });
    }
    if let ShadowMode::FloydClusters { scaling, eps } = mode {
        for level in depth..=model.radius() {
            let eps = eps.unwrap_or_else(|| scaling.default_cluster_eps(level));
            for cluster in sphere_clusters(g, model.base(), scaling, level as u32, eps)? {
                if cluster.iter().any(|v| shadow.contains(v)) {
                    shadow.extend(cluster);
                }
            }
        }
    }
    Ok(shadow.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcRecord {
    pub radius: usize,
    pub depth: usize,
    pub shadow_size: usize,
    pub hull_vertices: usize,
    pub hull_edges: usize,
    pub orbit_classes: usize,
    /// Largest hull degree of a hull vertex outside the shadow.
    pub max_inner_degree: usize,
}

/// Classes of hull edges under the translations moving the base by at most
/// `model.reach()`: edges `e`, `f` are joined when `h·e = f` for some such `h`.
pub fn hull_edge_classes<M: OrbitModel>(model: &M, h: &Hull) -> Vec<usize> {
    let g = model.graph();
    let mut parent: Vec<usize> = (0..h.edges.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for t in model.elements(model.reach()) {
        for (i, &e) in h.edges.iter().enumerate() {
            let (u, v) = g.edge(e);
            let (Some(tu), Some(tv)) = (model.act(&t, u), model.act(&t, v)) else {
                continue;
            };
            if let Some(f) = g.edge_id(tu, tv) {
                if let Ok(j) = h.edges.binary_search(&f) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    (0..h.edges.len()).map(|i| find(&mut parent, i)).collect()
}

/// Hull of the limit shadow and its number of edge classes modulo `H`.
pub fn subgroup_hull_orbit_count<M: OrbitModel>(
    model: &M,
    depth: usize,
    mode: &ShadowMode,
) -> Result<(QcRecord, Hull), QcError> {
    let shadow = limit_shadow(model, depth, mode)?;
    let c = hull(model.graph(), &shadow, None)?;
    let classes: BTreeSet<usize> = hull_edge_classes(model, &c).into_iter().collect();
    let mut degree = vec![0usize; model.graph().vertex_count()];
    for &e in &c.edges {
        let (u, v) = model.graph().edge(e);
        degree[u] += 1;
        degree[v] += 1;
    }
    let max_inner_degree = c
        .vertices
        .iter()
        .filter(|v| shadow.binary_search(v).is_err())
        .map(|&v| degree[v])
        .max()
        .unwrap_or(0);
    Ok((
        QcRecord {
            radius: model.radius(),
            depth,
            shadow_size: shadow.len(),
            hull_vertices: c.vertices.len(),
            hull_edges: c.edges.len(),
            orbit_classes: classes.len(),
            max_inner_degree,
        },
        c,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Growing,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "STABLE",
            Verdict::Growing => "GROWING",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcReport {
    pub records: Vec<QcRecord>,
    pub window: usize,
    pub verdict: Verdict,
}

pub const DEFAULT_WINDOW: usize = 3;

/// STABLE when the class count is constant on the last `window` records,
/// GROWING when it strictly increases across all of them, INCONCLUSIVE
/// otherwise or with fewer than three records.
pub fn quasiconvexity_verdict(mut records: Vec<QcRecord>, window: usize) -> QcReport {
    records.sort_by_key(|r| r.radius);
    let counts: Vec<usize> = records.iter().map(|r| r.orbit_classes).collect();
    let verdict = if counts.len() < 3 || window == 0 {
        Verdict::Inconclusive
    } else if counts.len() >= window
        && counts[counts.len() - window..]
            .windows(2)
            .all(|w| w[0] == w[1])
    {
        Verdict::Stable
    } else if counts.windows(2).all(|w| w[0] < w[1]) {
        Verdict::Growing
    } else {
        Verdict::Inconclusive
    };
    QcReport {
        records,
        window,
        verdict,
    }
}

/// Sweeps Cayley balls of the given radii, in parallel, with the default
/// depth for each radius.
pub fn free_group_sweep(
    basis: &Basis,
    subgroup: &Subgroup,
    radii: &[usize],
    mode: &ShadowMode,
    window: usize,
) -> Result<QcReport, QcError> {
    check_increasing(radii)?;
    let records = radii
        .par_iter()
        .map(|&r| {
            let model = FreeGroupModel::new(basis, r, subgroup.clone())?;
            subgroup_hull_orbit_count(&model, default_depth(r), mode).map(|x| x.0)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(quasiconvexity_verdict(records, window))
}

/// Same sweep for the grid stand-in over the given sizes. Records carry the
/// grid size in place of the radius.
pub fn grid_sweep(sizes: &[usize], window: usize) -> Result<QcReport, QcError> {
    check_increasing(sizes)?;
    let records = sizes
        .par_iter()
        .map(|&n| {
            let model = GridDiagonalModel::new(n)?;
            let (mut rec, _) = subgroup_hull_orbit_count(
                &model,
                default_depth(model.radius()),
                &ShadowMode::OrbitTrace,
            )?;
            rec.radius = n;
            Ok(rec)
        })
        .collect::<Result<Vec<_>, QcError>>()?;
    Ok(quasiconvexity_verdict(records, window))
}

fn check_increasing(values: &[usize]) -> Result<(), QcError> {
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QcError::InvalidScenario(
            "radii must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeinfBounds {
    pub conj_bound: usize,
    pub word_bound: usize,
    /// Radius of the balls under the two coned trees.
    pub tree_radius: usize,
}

impl Default for FreeinfBounds {
    fn default() -> Self {
        FreeinfBounds {
            conj_bound: 4,
            word_bound: 6,
            tree_radius: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioVerdict {
    Consistent,
    WitnessFound,
    Degenerate,
}

impl ScenarioVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioVerdict::Consistent => "CONSISTENT",
            ScenarioVerdict::WitnessFound => "WITNESS_FOUND",
            ScenarioVerdict::Degenerate => "DEGENERATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSummary {
    pub vertices: usize,
    pub edges: usize,
    pub cones: usize,
    pub connected: bool,
    pub is_tree: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeinfReport {
    pub n: usize,
    pub m: usize,
    pub bounds: FreeinfBounds,
    /// Basis `X ∪ Y`; `W` and `Z` are written over it.
    pub basis: Basis,
    pub w: Vec<Word>,
    pub z: Vec<Word>,
    /// `φ∘ψ` and `ψ∘φ` fix every generator.
    pub nielsen_round_trip: bool,
    /// `f(z_k) = w_k` for every `k`.
    pub retraction_matches: bool,
    pub intersection: Option<IntersectionReport>,
    pub r: PeripheralStructure,
    pub tree_p: TreeSummary,
    pub tree_q: TreeSummary,
    pub verdict: ScenarioVerdict,
    pub narrative: Vec<String>,
}

/// `w_i = x2^(i-1) x1 x2^i`. Each `w_i` has a single `x1`, and no two `x1`
/// letters cancel in a product of these words and their inverses, so they
/// freely generate a subgroup of `⟨x1, x2⟩`.
pub fn default_w(basis: &Basis, i: usize) -> Result<Word, QcError> {
    if i == 0 {
        return Err(QcError::InvalidScenario("w_i is indexed from 1".into()));
    }
    let x1 = Word::letter(basis.generator("x1")?);
    let x2 = Word::letter(basis.generator("x2")?);
    Ok(x2.pow(i as i64 - 1).product(&x1).product(&x2.pow(i as i64)))
}

fn summarize(bundle: &crate::conedoff::ConedGraphBundle) -> TreeSummary {
    TreeSummary {
        vertices: bundle.graph.vertex_count(),
        edges: bundle.graph.edge_count(),
        cones: bundle.cones().len(),
        connected: bundle.graph.is_connected(),
        is_tree: bundle.graph.is_tree(),
    }
}

fn names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

/// `G = A * P = A * Q` with `A = ⟨x1..xn⟩`, `P = ⟨y1..ym⟩`,
/// `Q = ⟨z1..zm⟩`, `z_k = y_k w_k`.
///
/// Builds the Nielsen substitution and its inverse, bounds-checks
/// `P ∩ g⁻¹Qg = {1}` through the retraction `x ↦ x, y ↦ 1`, computes the
/// intersection structure `R`, and cones a ball over `P`-cosets (basis
/// `X ∪ Y`) and over `Q`-cosets (basis `X ∪ Z`).
pub fn freeinf_scenario(
    n: usize,
    m: usize,
    bounds: FreeinfBounds,
) -> Result<FreeinfReport, QcError> {
    if n < 2 {
        return Err(QcError::InvalidScenario("n must be at least 2".into()));
    }
    let xs = names("x", n);
    let basis = Basis::free(&[xs.clone(), names("y", m)].concat())?;
    let basis_xz = Basis::free(&[xs, names("z", m)].concat())?;
    let rank = n + m;
    let w: Vec<Word> = (1..=m)
        .map(|i| default_w(&basis, i))
        .collect::<Result<_, _>>()?;
    let y: Vec<Word> = (0..m)
        .map(|k| Word::letter(Letter::new(n + k, false)))
        .collect();
    let z: Vec<Word> = y.iter().zip(&w).map(|(y, w)| y.product(w)).collect();

    let mut phi = Endomorphism::identity(rank);
    let mut psi = Endomorphism::identity(rank);
    for k in 0..m {
        phi.set(n + k, z[k].clone());
        psi.set(n + k, y[k].product(&w[k].inverse()));
    }
    let generators: Vec<Word> = (0..rank)
        .map(|g| Word::letter(Letter::new(g, false)))
        .collect();
    let mut nielsen_round_trip = true;
    for g in &generators {
        nielsen_round_trip &= phi.apply(&psi.apply(g)?)? == *g && psi.apply(&phi.apply(g)?)? == *g;
    }
    // y_k = z_k w_k⁻¹ exactly
    for k in 0..m {
        nielsen_round_trip &= z[k].product(&w[k].inverse()) == y[k];
    }

    let mut f = Endomorphism::identity(rank);
    for k in 0..m {
        f.set(n + k, Word::identity());
    }
    let mut retraction_matches = true;
    for k in 0..m {
        retraction_matches &= f.apply(&z[k])? == w[k];
    }

    let y_factor: Vec<usize> = (n..rank).collect();
    let ball_xy = cayley_ball(&basis, bounds.tree_radius, DEFAULT_BALL_CAP)?;
    let ball_xz = cayley_ball(&basis_xz, bounds.tree_radius, DEFAULT_BALL_CAP)?;
    let mut narrative = Vec::new();

    if m == 0 {
        let empty = PeripheralStructure::empty();
        let tree_p = summarize(&coned_tree(&ball_xy, &empty)?);
        let tree_q = summarize(&coned_tree(&ball_xz, &empty)?);
        narrative.push("m = 0: P and Q are trivial, nothing to intersect or cone".into());
        return Ok(FreeinfReport {
            n,
            m,
            bounds,
            basis,
            w,
            z,
            nielsen_round_trip,
            retraction_matches,
            intersection: None,
            r: empty,
            tree_p,
            tree_q,
            verdict: ScenarioVerdict::Degenerate,
            narrative,
        });
    }

    let p_struct = PeripheralStructure::free_factors(&[y_factor])?;
    let q_struct = PeripheralStructure::new(vec![Subgroup::new(z.clone())?])?;
    let (intersection, r, verdict) = match peripheral_intersections(
        &basis,
        &p_struct,
        &q_struct,
        IntersectionBounds {
            conj_bound: bounds.conj_bound,
            word_bound: bounds.word_bound,
        },
    ) {
        Ok(outcome) => {
            let report = outcome.pairs.into_iter().find_map(|p| match p.check {
                PairCheck::Retraction(r) => Some(r),
                PairCheck::FreeFactors { .. } => None,
            });
            (report, outcome.structure, ScenarioVerdict::Consistent)
        }
        Err(ConedError::UnsupportedSubgroup(_)) => {
            let conjugators = crate::words::reduced_words(rank, bounds.conj_bound);
            let report = crate::words::verify_trivial_intersection(
                p_struct.subgroups()[0].generators(),
                &z,
                &f,
                &conjugators,
                bounds.word_bound,
            )?;
            (
                Some(report),
                PeripheralStructure::empty(),
                ScenarioVerdict::WitnessFound,
            )
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(rep) = &intersection {
        if rep.verdict == IntersectionVerdict::WitnessFound {
            narrative.push(format!("{} retraction witnesses found", rep.witness_count));
        } else {
            narrative.push(format!(
                "no element of P is conjugate into Q: {} conjugators x {} subgroup words checked",
                rep.conjugators_checked, rep.subgroup_words_checked
            ));
        }
    }

    let z_factor: Vec<usize> = (n..rank).collect();
    let tree_p = summarize(&coned_tree(&ball_xy, &p_struct)?);
    let tree_q = summarize(&coned_tree(
        &ball_xz,
        &PeripheralStructure::free_factors(&[z_factor])?,
    )?);
    if r.is_empty() {
        narrative.push(
            "R is empty: the pullback construction has no cone vertices, so the combined action has no parabolic points"
                .into(),
        );
    }
    Ok(FreeinfReport {
        n,
        m,
        bounds,
        basis,
        w,
        z,
        nielsen_round_trip,
        retraction_matches,
        intersection,
        r,
        tree_p,
        tree_q,
        verdict,
        narrative,
    })
}
