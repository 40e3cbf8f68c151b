//! Floyd-rescaled path metrics.
//!
//! Fix a base vertex `v` and a summable scaling function `f`. Every edge `e`
//! gets length `f(d(v, e))`, where `d(v, e)` is the graph distance from `v` to
//! the nearer endpoint of `e`, and `δ_{v,f}` is the induced path metric.
//!
//! Geometric scaling with a rational ratio `p/q` is computed exactly: all edge
//! lengths are put over the common denominator `q^N` (`N` the largest edge
//! depth), so shortest paths run on `u128` numerators. Polynomial scaling uses
//! `f64`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{GraphError, LabeledGraph, Path, VertexId, UNREACHED};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloydError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid scaling function: {0}")]
    InvalidScaling(String),
    #[error("exact arithmetic overflow (denominator q^{0} too large); use a smaller radius or polynomial scaling")]
    Overflow(u32),
    #[error("path is not a geodesic from its first vertex (index {0})")]
    NotGeodesic(usize),
    #[error("tail start {start} past the end of a path with {len} vertices")]
    TailOutOfRange { start: usize, len: usize },
}

/// A summable sequence `f_n` with a certified lower bound `λ` on `f_{n+1}/f_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalingFunction {
    /// `f_n = ratio^n`.
    Geometric {
        ratio: Ratio<u64>,
        lambda: Ratio<u64>,
    },
    /// `f_n = (1 + n)^-exponent`.
    Polynomial { exponent: f64, lambda: f64 },
}

impl ScalingFunction {
    /// Geometric scaling; `λ = ratio`.
    pub fn geometric(numer: u64, denom: u64) -> Result<Self, FloydError> {
        if numer == 0 || denom == 0 || numer >= denom {
            return Err(FloydError::InvalidScaling(format!(
                "geometric ratio {numer}/{denom} must lie in (0, 1)"
            )));
        }
        let ratio = Ratio::new(numer, denom);
        Ok(ScalingFunction::Geometric {
            ratio,
            lambda: ratio,
        })
    }

    /// Polynomial scaling; `λ = 2^-exponent`.
    pub fn polynomial(exponent: f64) -> Result<Self, FloydError> {
        if !(exponent.is_finite() && exponent > 1.0) {
            return Err(FloydError::InvalidScaling(format!(
                "polynomial exponent {exponent} must exceed 1"
            )));
        }
        Ok(ScalingFunction::Polynomial {
            exponent,
            lambda: 0.5f64.powf(exponent),
        })
    }

    /// Replaces `λ` by a smaller positive bound.
    pub fn with_lambda(self, numer: u64, denom: u64) -> Result<Self, FloydError> {
        if numer == 0 || denom == 0 {
            return Err(FloydError::InvalidScaling("λ must be positive".into()));
        }
        let requested = Ratio::new(numer, denom);
        match self {
            ScalingFunction::Geometric { ratio, lambda } => {
                if requested > lambda {
                    return Err(FloydError::InvalidScaling(format!(
                        "λ = {requested} exceeds the certified bound {lambda}"
                    )));
                }
                Ok(ScalingFunction::Geometric {
                    ratio,
                    lambda: requested,
                })
            }
            ScalingFunction::Polynomial { exponent, lambda } => {
                let r = numer as f64 / denom as f64;
                if r > lambda {
                    return Err(FloydError::InvalidScaling(format!(
                        "λ = {r} exceeds the certified bound {lambda}"
                    )));
                }
                Ok(ScalingFunction::Polynomial {
                    exponent,
                    lambda: r,
                })
            }
        }
    }

    pub fn value(&self, n: u32) -> f64 {
        match self {
            ScalingFunction::Geometric { ratio, .. } => {
                (*ratio.numer() as f64 / *ratio.denom() as f64).powi(n as i32)
            }
            ScalingFunction::Polynomial { exponent, .. } => (1.0 + n as f64).powf(-exponent),
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            ScalingFunction::Geometric { lambda, .. } => {
                *lambda.numer() as f64 / *lambda.denom() as f64
            }
            ScalingFunction::Polynomial { lambda, .. } => *lambda,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScalingFunction::Geometric { .. })
    }

    /// Upper bound for `Σ_{n ≥ m} f_n` (exact for geometric scaling).
    pub fn tail_sum(&self, m: u32) -> f64 {
        match self {
            ScalingFunction::Geometric { ratio, .. } => {
                let mu = *ratio.numer() as f64 / *ratio.denom() as f64;
                mu.powi(m as i32) / (1.0 - mu)
            }
            ScalingFunction::Polynomial { exponent, .. } => {
                const TERMS: u32 = 10_000;
                let s = *exponent;
                let head: f64 = (m..m + TERMS).map(|n| (1.0 + n as f64).powf(-s)).sum();
                // Σ_{n ≥ N} (1+n)^-s ≤ ∫_{N-1}^∞ (1+x)^-s dx
                let n = (m + TERMS) as f64;
                head + n.powf(1.0 - s) / (s - 1.0)
            }
        }
    }

    /// Checks `1 ≥ f_{n+1}/f_n ≥ λ` for `n < terms`.
    pub fn verify_ratio_bound(&self, terms: u32) -> bool {
        match self {
            ScalingFunction::Geometric { ratio, lambda } => {
                // f_{n+1}/f_n = ratio for every n
                *ratio <= Ratio::from_integer(1) && ratio >= lambda
            }
            ScalingFunction::Polynomial { lambda, .. } => (0..terms).all(|n| {
                let r = self.value(n + 1) / self.value(n);
                r <= 1.0 && r >= *lambda - 1e-15
            }),
        }
    }

    /// Default Floyd cluster radius for a sphere of the given radius:
    /// `2 Σ_{n ≥ r/2} f_n`.
    pub fn default_cluster_eps(&self, radius: usize) -> f64 {
        2.0 * self.tail_sum((radius / 2) as u32)
    }
}

/// A Floyd length: exact for geometric scaling, floating point otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FloydLength {
    Exact(Ratio<u128>),
    Approx(f64),
}

impl FloydLength {
    pub fn to_f64(self) -> f64 {
        match self {
            FloydLength::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            FloydLength::Approx(x) => x,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            FloydLength::Exact(r) => *r.numer() == 0,
            FloydLength::Approx(x) => x == 0.0,
        }
    }
}

impl std::fmt::Display for FloydLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FloydLength::Exact(r) => write!(f, "{r}"),
            FloydLength::Approx(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Edge lengths for one base vertex.
#[derive(Debug, Clone)]
enum Weights {
    /// Numerators over `denom^scale`.
    Exact {
        numer: Vec<u128>,
        scale: u32,
    },
    Float(Vec<f64>),
}

/// Raw shortest-path lengths from one source.
#[derive(Debug, Clone)]
pub enum RawDistances {
    /// Numerators over the metric's common denominator.
    Exact(Vec<u128>),
    Float(Vec<f64>),
}

/// `δ_{v,f}` on a connected graph.
#[derive(Debug, Clone)]
pub struct FloydMetric<'g> {
    graph: &'g LabeledGraph,
    base: VertexId,
    scaling: ScalingFunction,
    edge_depth: Vec<u32>,
    weights: Weights,
}

fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    let mut out: u128 = 1;
    for _ in 0..exp {
        out = out.checked_mul(base)?;
    }
    Some(out)
}

/// Largest edge depth over all edges, measured from `base`.
fn edge_depths(g: &LabeledGraph, base: VertexId) -> Result<Vec<u32>, FloydError> {
    let dist = g.bfs(base);
    if let Some(v) = dist.iter().position(|&d| d == UNREACHED) {
        return Err(GraphError::Disconnected(base, v).into());
    }
    Ok(g.edges()
        .iter()
        .map(|&(x, y)| dist[x].min(dist[y]))
        .collect())
}

impl<'g> FloydMetric<'g> {
    pub fn new(
        graph: &'g LabeledGraph,
        base: VertexId,
        scaling: &ScalingFunction,
    ) -> Result<Self, FloydError> {
        Self::with_scale(graph, base, scaling, None)
    }

    /// As [`FloydMetric::new`], forcing the exact denominator to
    /// `q^scale` so metrics for different bases are directly comparable.
    pub fn with_scale(
        graph: &'g LabeledGraph,
        base: VertexId,
        scaling: &ScalingFunction,
        scale: Option<u32>,
    ) -> Result<Self, FloydError> {
        graph.check_vertex(base)?;
        let edge_depth = edge_depths(graph, base)?;
        let max_depth = edge_depth.iter().copied().max().unwrap_or(0);
        let weights = match scaling {
            ScalingFunction::Geometric { ratio, .. } => {
                let scale = scale.unwrap_or(max_depth).max(max_depth);
                let (p, q) = (*ratio.numer() as u128, *ratio.denom() as u128);
                let mut p_pow = vec![1u128; scale as usize + 1];
                let mut q_pow = vec![1u128; scale as usize + 1];
                for i in 1..=scale as usize {
                    p_pow[i] = p_pow[i - 1]
                        .checked_mul(p)
                        .ok_or(FloydError::Overflow(scale))?;
                    q_pow[i] = q_pow[i - 1]
                        .checked_mul(q)
                        .ok_or(FloydError::Overflow(scale))?;
                }
                let numer = edge_depth
                    .iter()
                    .map(|&d| {
                        p_pow[d as usize]
                            .checked_mul(q_pow[(scale - d) as usize])
                            .ok_or(FloydError::Overflow(scale))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                // path sums must fit as well
                numer
                    .iter()
                    .try_fold(0u128, |acc, &w| acc.checked_add(w))
                    .ok_or(FloydError::Overflow(scale))?;
                Weights::Exact { numer, scale }
            }
            ScalingFunction::Polynomial { .. } => {
                Weights::Float(edge_depth.iter().map(|&d| scaling.value(d)).collect())
            }
        };
        Ok(FloydMetric {
            graph,
            base,
            scaling: scaling.clone(),
            edge_depth,
            weights,
        })
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn graph(&self) -> &'g LabeledGraph {
        self.graph
    }

    pub fn scaling(&self) -> &ScalingFunction {
        &self.scaling
    }

    /// `d(v, e)`: distance from the base to the nearer endpoint.
    pub fn edge_depth(&self, e: usize) -> u32 {
        self.edge_depth[e]
    }

    /// Common denominator of exact lengths (`q^scale`), if exact.
    pub fn denominator(&self) -> Option<u128> {
        match (&self.weights, &self.scaling) {
            (Weights::Exact { scale, .. }, ScalingFunction::Geometric { ratio, .. }) => {
                checked_pow(*ratio.denom() as u128, *scale)
            }
            _ => None,
        }
    }

    pub fn edge_weight(&self, e: usize) -> FloydLength {
        match &self.weights {
            Weights::Exact { numer, .. } => FloydLength::Exact(Ratio::new(
                numer[e],
                self.denominator().expect("exact metric has a denominator"),
            )),
            Weights::Float(w) => FloydLength::Approx(w[e]),
        }
    }

    fn lift(&self, raw: u128) -> FloydLength {
        FloydLength::Exact(Ratio::new(
            raw,
            self.denominator().expect("exact metric has a denominator"),
        ))
    }

    /// Shortest Floyd lengths from `source` to every vertex.
    pub fn raw_from(&self, source: VertexId) -> RawDistances {
        match &self.weights {
            Weights::Exact { numer, .. } => {
                RawDistances::Exact(dijkstra(self.graph, source, |e| numer[e], u128::MAX))
            }
            Weights::Float(w) => RawDistances::Float(
                dijkstra(self.graph, source, |e| OrdF64(w[e]), OrdF64(f64::INFINITY))
                    .into_iter()
                    .map(|x| x.0)
                    .collect(),
            ),
        }
    }

    pub fn distances_from(&self, source: VertexId) -> Vec<FloydLength> {
        match self.raw_from(source) {
            RawDistances::Exact(v) => v.into_iter().map(|x| self.lift(x)).collect(),
            RawDistances::Float(v) => v.into_iter().map(FloydLength::Approx).collect(),
        }
    }

    /// `δ(a, b)`, always evaluated from the smaller vertex id so that the
    /// floating-point mode is exactly symmetric.
    pub fn distance(&self, a: VertexId, b: VertexId) -> Result<FloydLength, FloydError> {
        self.graph.check_vertex(a)?;
        self.graph.check_vertex(b)?;
        Ok(self.distances_from(a.min(b))[a.max(b)])
    }
}

impl std::ops::Add for OrdF64 {
    type Output = OrdF64;
    fn add(self, o: OrdF64) -> OrdF64 {
        OrdF64(self.0 + o.0)
    }
}

fn dijkstra<K, W>(g: &LabeledGraph, source: VertexId, weight: W, infinity: K) -> Vec<K>
where
    K: Ord + Copy + Default + std::ops::Add<Output = K>,
    W: Fn(usize) -> K,
{
    let mut dist = vec![infinity; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = K::default();
    heap.push(Reverse((K::default(), source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, e) in g.incident(x) {
            let nd = d + weight(e);
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Reverse((nd, y)));
            }
        }
    }
    dist
}

impl Default for OrdF64 {
    fn default() -> Self {
        OrdF64(0.0)
    }
}

/// `δ_{base,f}(a, b)`.
pub fn floyd_distance(
    g: &LabeledGraph,
    base: VertexId,
    f: &ScalingFunction,
    a: VertexId,
    b: VertexId,
) -> Result<FloydLength, FloydError> {
    FloydMetric::new(g, base, f)?.distance(a, b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseChangeReport {
    pub u: VertexId,
    pub v: VertexId,
    pub base_distance: u32,
    pub pairs_checked: usize,
    /// Pairs with `δ_u(a,b) < λ^{d(u,v)} δ_v(a,b)`.
    pub violations: Vec<(VertexId, VertexId)>,
    /// Smallest observed `δ_u(a,b) / δ_v(a,b)` over pairs with `δ_v > 0`.
    pub min_ratio: Option<f64>,
    pub min_ratio_exact: Option<Ratio<u128>>,
}

/// Checks `δ_u(a,b) ≥ λ^{d(u,v)} · δ_v(a,b)` on the given pairs.
pub fn base_change_check(
    g: &LabeledGraph,
    f: &ScalingFunction,
    u: VertexId,
    v: VertexId,
    pairs: &[(VertexId, VertexId)],
) -> Result<BaseChangeReport, FloydError> {
    let d_uv = g.distance(u, v)?;
    let scale = common_scale(g, &[u, v])?;
    let mu = FloydMetric::with_scale(g, u, f, Some(scale))?;
    let mv = FloydMetric::with_scale(g, v, f, Some(scale))?;
    let mut sources: Vec<VertexId> = pairs.iter().map(|p| p.0).collect();
    sources.sort_unstable();
    sources.dedup();
    let mut report = BaseChangeReport {
        u,
        v,
        base_distance: d_uv,
        pairs_checked: 0,
        violations: Vec::new(),
        min_ratio: None,
        min_ratio_exact: None,
    };
    let cmp = RatioCheck::new(f, d_uv)?;
    for a in sources {
        let (ru, rv) = (mu.raw_from(a), mv.raw_from(a));
        for &(x, b) in pairs.iter().filter(|p| p.0 == a) {
            debug_assert_eq!(x, a);
            report.pairs_checked += 1;
            cmp.check(&ru, &rv, a, b, &mut report)?;
        }
    }
    Ok(report)
}

/// Largest edge depth seen from any of `bases`.
fn common_scale(g: &LabeledGraph, bases: &[VertexId]) -> Result<u32, FloydError> {
    let mut scale = 0;
    for &b in bases {
        g.check_vertex(b)?;
        scale = scale.max(edge_depths(g, b)?.into_iter().max().unwrap_or(0));
    }
    Ok(scale)
}

/// Precomputed `λ^d` in the representation matching the scaling function.
enum RatioCheck {
    Exact { lam_num: u128, lam_den: u128 },
    Float { factor: f64 },
}

impl RatioCheck {
    fn new(f: &ScalingFunction, d: u32) -> Result<Self, FloydError> {
        Ok(match f {
            ScalingFunction::Geometric { lambda, .. } => RatioCheck::Exact {
                lam_num: checked_pow(*lambda.numer() as u128, d).ok_or(FloydError::Overflow(d))?,
                lam_den: checked_pow(*lambda.denom() as u128, d).ok_or(FloydError::Overflow(d))?,
            },
            ScalingFunction::Polynomial { lambda, .. } => RatioCheck::Float {
                factor: lambda.powi(d as i32),
            },
        })
    }

    fn check(
        &self,
        ru: &RawDistances,
        rv: &RawDistances,
        a: VertexId,
        b: VertexId,
        report: &mut BaseChangeReport,
    ) -> Result<(), FloydError> {
        match (self, ru, rv) {
            (
                RatioCheck::Exact { lam_num, lam_den },
                RawDistances::Exact(du),
                RawDistances::Exact(dv),
            ) => {
                let (x, y) = (du[b], dv[b]);
                let lhs = x.checked_mul(*lam_den).ok_or(FloydError::Overflow(0))?;
                let rhs = y.checked_mul(*lam_num).ok_or(FloydError::Overflow(0))?;
                if lhs < rhs {
                    report.violations.push((a, b));
                }
                if y > 0 {
                    let r = Ratio::new(x, y);
                    if report.min_ratio_exact.is_none_or(|m| r < m) {
                        report.min_ratio_exact = Some(r);
                        report.min_ratio = Some(x as f64 / y as f64);
                    }
                }
            }
            (RatioCheck::Float { factor }, RawDistances::Float(du), RawDistances::Float(dv)) => {
                let (x, y) = (du[b], dv[b]);
                if x < factor * y - 1e-12 {
                    report.violations.push((a, b));
                }
                if y > 0.0 {
                    let r = x / y;
                    if report.min_ratio.is_none_or(|m| r < m) {
                        report.min_ratio = Some(r);
                    }
                }
            }
            _ => unreachable!("both metrics share the scaling function"),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseChangeSummary {
    pub base_pairs: usize,
    pub vertex_pairs_per_base_pair: usize,
    pub comparisons: u64,
    pub violations: Vec<(VertexId, VertexId, VertexId, VertexId)>,
    /// Minimum of `δ_u/δ_v` per base distance `d = 1..=max_base_distance`.
    pub min_ratio_by_distance: Vec<Option<f64>>,
}

/// Base-change inequality over every ordered base pair `(u, v)` with
/// `1 ≤ d(u,v) ≤ max_base_distance` and every vertex pair `a < b`.
///
/// Loops over sources `a` so only one row per base is alive at a time.
pub fn base_change_exhaustive(
    g: &LabeledGraph,
    f: &ScalingFunction,
    max_base_distance: u32,
) -> Result<BaseChangeSummary, FloydError> {
    let n = g.vertex_count();
    let all: Vec<VertexId> = (0..n).collect();
    let scale = common_scale(g, &all)?;
    let metrics: Vec<FloydMetric> = all
        .par_iter()
        .map(|&b| FloydMetric::with_scale(g, b, f, Some(scale)))
        .collect::<Result<_, _>>()?;
    let mut base_pairs = Vec::new();
    for u in 0..n {
        let dist = g.bfs(u);
        for v in 0..n {
            if v != u && dist[v] <= max_base_distance {
                base_pairs.push((u, v, dist[v]));
            }
        }
    }
    let checks: Vec<RatioCheck> = (0..=max_base_distance)
        .map(|d| RatioCheck::new(f, d))
        .collect::<Result<_, _>>()?;

    let per_source: Vec<Result<(Vec<_>, Vec<Option<f64>>), FloydError>> = all
        .par_iter()
        .map(|&a| {
            let rows: Vec<RawDistances> = metrics.iter().map(|m| m.raw_from(a)).collect();
            let mut violations = Vec::new();
            let mut mins = vec![None; max_base_distance as usize + 1];
            for &(u, v, d) in &base_pairs {
                let mut report = BaseChangeReport {
                    u,
                    v,
                    base_distance: d,
                    pairs_checked: 0,
                    violations: Vec::new(),
                    min_ratio: None,
                    min_ratio_exact: None,
                };
                for b in a + 1..n {
                    checks[d as usize].check(&rows[u], &rows[v], a, b, &mut report)?;
                }
                violations.extend(report.violations.into_iter().map(|(a, b)| (u, v, a, b)));
                let slot: &mut Option<f64> = &mut mins[d as usize];
                if let Some(r) = report.min_ratio {
                    if slot.is_none_or(|m| r < m) {
                        *slot = Some(r);
                    }
                }
            }
            Ok((violations, mins))
        })
        .collect();

    let mut violations = Vec::new();
    let mut min_ratio_by_distance = vec![None; max_base_distance as usize + 1];
    for r in per_source {
        let (v, mins) = r?;
        violations.extend(v);
        for (slot, m) in min_ratio_by_distance.iter_mut().zip(mins) {
            if let Some(m) = m {
                if slot.is_none_or(|s: f64| m < s) {
                    *slot = Some(m);
                }
            }
        }
    }
    min_ratio_by_distance.remove(0);
    let vertex_pairs = n * n.saturating_sub(1) / 2;
    Ok(BaseChangeSummary {
        base_pairs: base_pairs.len(),
        vertex_pairs_per_base_pair: vertex_pairs,
        comparisons: base_pairs.len() as u64 * vertex_pairs as u64,
        violations,
        min_ratio_by_distance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailDiameter {
    pub start: usize,
    pub diameter: FloydLength,
    /// `2 Σ_{n ≥ start - offset} f_n`.
    pub bound: f64,
    /// Graph distance from the base to the first vertex of the ray.
    pub offset: usize,
}

/// Floyd diameter of `ray[start..]`.
///
/// The edge `ray[j]–ray[j+1]` sits at depth at least `j - offset` from the
/// base, so the tail has Floyd length at most `Σ_{n ≥ start-offset} f_n` and
/// its diameter at most twice that.
pub fn ray_tail_diameter(
    g: &LabeledGraph,
    base: VertexId,
    f: &ScalingFunction,
    ray: &Path,
    start: usize,
) -> Result<TailDiameter, FloydError> {
    let metric = FloydMetric::new(g, base, f)?;
    tail_diameter_with(&metric, ray, start)
}

fn check_geodesic(g: &LabeledGraph, ray: &Path) -> Result<(), FloydError> {
    let verts = ray.vertices();
    if verts.is_empty() {
        return Err(FloydError::NotGeodesic(0));
    }
    for &v in verts {
        g.check_vertex(v)?;
    }
    let from_start = g.bfs(verts[0]);
    for (i, &v) in verts.iter().enumerate() {
        if from_start[v] as usize != i {
            return Err(FloydError::NotGeodesic(i));
        }
    }
    Ok(())
}

fn tail_diameter_with(
    metric: &FloydMetric,
    ray: &Path,
    start: usize,
) -> Result<TailDiameter, FloydError> {
    let g = metric.graph();
    check_geodesic(g, ray)?;
    let verts = ray.vertices();
    if start >= verts.len() {
        return Err(FloydError::TailOutOfRange {
            start,
            len: verts.len(),
        });
    }
    let offset = g.bfs(metric.base())[verts[0]] as usize;
    let tail = &verts[start..];
    let mut diameter = match metric.denominator() {
        Some(den) => FloydLength::Exact(Ratio::new(0, den)),
        None => FloydLength::Approx(0.0),
    };
    for (i, &x) in tail.iter().enumerate() {
        let row = metric.distances_from(x);
        for &y in &tail[i + 1..] {
            if longer(row[y], diameter) {
                diameter = row[y];
            }
        }
    }
    let bound = 2.0
        * metric
            .scaling()
            .tail_sum(start.saturating_sub(offset) as u32);
    Ok(TailDiameter {
        start,
        diameter,
        bound,
        offset,
    })
}

fn longer(a: FloydLength, b: FloydLength) -> bool {
    match (a, b) {
        (FloydLength::Exact(x), FloydLength::Exact(y)) => x > y,
        _ => a.to_f64() > b.to_f64(),
    }
}

/// Tail diameters for every start index of the ray.
pub fn tail_decay_profile(
    g: &LabeledGraph,
    base: VertexId,
    f: &ScalingFunction,
    ray: &Path,
) -> Result<Vec<TailDiameter>, FloydError> {
    let metric = FloydMetric::new(g, base, f)?;
    (0..ray.vertices().len())
        .map(|k| tail_diameter_with(&metric, ray, k))
        .collect()
}

/// Single-linkage clusters of the sphere of the given radius around `base`,
/// joining vertices at Floyd distance at most `eps`. Clusters and their
/// members are in increasing vertex order.
pub fn sphere_clusters(
    g: &LabeledGraph,
    base: VertexId,
    f: &ScalingFunction,
    radius: u32,
    eps: f64,
) -> Result<Vec<Vec<VertexId>>, FloydError> {
    let metric = FloydMetric::new(g, base, f)?;
    let depth = g.bfs(base);
    let sphere: Vec<VertexId> = (0..g.vertex_count())
        .filter(|&v| depth[v] == radius)
        .collect();
    let mut parent: Vec<usize> = (0..sphere.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, &x) in sphere.iter().enumerate() {
        let row = metric.distances_from(x);
        for (j, &y) in sphere.iter().enumerate().skip(i + 1) {
            if row[y].to_f64() <= eps + 1e-12 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<VertexId>> = Vec::new();
    let mut slot = vec![usize::MAX; sphere.len()];
    for i in 0..sphere.len() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(sphere[i]);
    }
    Ok(clusters)
}
