//! Brute-force reference implementations used by the integration tests.
//! Everything here favours obviousness over speed.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use floydkit_core::words::Subgroup;
use floydkit_core::{LabeledGraph, VertexId, Word};
use num_rational::Ratio;

/// Every simple path of exactly `len` edges from `u` to `v`, by plain
/// recursion over neighbours.
pub fn simple_paths(g: &LabeledGraph, u: VertexId, v: VertexId, len: usize) -> Vec<Vec<VertexId>> {
    fn go(
        g: &LabeledGraph,
        path: &mut Vec<VertexId>,
        v: VertexId,
        len: usize,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        let last = *path.last().unwrap();
        if path.len() - 1 == len {
            if last == v {
                out.push(path.clone());
            }
            return;
        }
        if last == v {
            return;
        }
        for &w in g.neighbors(last) {
            if !path.contains(&w) {
                path.push(w);
                go(g, path, v, len, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if u != v {
        go(g, &mut vec![u], v, len, &mut out);
    }
    out
}

/// Maximum simple-arc count over ordered vertex pairs, per length `1..=max`.
pub fn arc_profile(g: &LabeledGraph, max_len: usize) -> Vec<u64> {
    let n = g.vertex_count();
    let mut best = vec![0u64; max_len];
    for u in 0..n {
        // count all simple paths from u by length and endpoint
        let mut counts: HashMap<(usize, VertexId), u64> = HashMap::new();
        let mut path = vec![u];
        fn walk(
            g: &LabeledGraph,
            path: &mut Vec<VertexId>,
            max_len: usize,
            counts: &mut HashMap<(usize, VertexId), u64>,
        ) {
            let len = path.len() - 1;
            let last = *path.last().unwrap();
            if len > 0 {
                *counts.entry((len, last)).or_default() += 1;
            }
            if len == max_len {
                return;
            }
            for &w in g.neighbors(last) {
                if !path.contains(&w) {
                    path.push(w);
                    walk(g, path, max_len, counts);
                    path.pop();
                }
            }
        }
        walk(g, &mut path, max_len, &mut counts);
        for ((len, _), c) in counts {
            best[len - 1] = best[len - 1].max(c);
        }
    }
    best
}

/// All geodesics from `u` to `v`: simple paths whose length is the BFS
/// distance.
pub fn all_geodesics(g: &LabeledGraph, u: VertexId, v: VertexId) -> Vec<Vec<VertexId>> {
    if u == v {
        return vec![vec![u]];
    }
    let d = g.bfs(u)[v] as usize;
    simple_paths(g, u, v, d)
}

pub fn edge_ids(g: &LabeledGraph, path: &[VertexId]) -> BTreeSet<usize> {
    path.windows(2)
        .map(|w| g.edge_id(w[0], w[1]).unwrap())
        .collect()
}

/// Union of all geodesics between points of `set`.
pub fn hull_by_enumeration(g: &LabeledGraph, set: &[VertexId]) -> (Vec<VertexId>, Vec<usize>) {
    let mut vs = BTreeSet::new();
    let mut es = BTreeSet::new();
    for &a in set {
        for &b in set {
            for p in all_geodesics(g, a, b) {
                es.extend(edge_ids(g, &p));
                vs.extend(p);
            }
        }
    }
    (vs.into_iter().collect(), es.into_iter().collect())
}

/// `u_e`-smallness straight from the definition.
pub fn ue_small_naive(g: &LabeledGraph, e: usize, a: VertexId, b: VertexId) -> bool {
    a == b
        || all_geodesics(g, a, b)
            .iter()
            .any(|p| !edge_ids(g, p).contains(&e))
}

/// Whether `u_F ∘ u_F ⊂ u_e` on all vertices, from the definition.
pub fn alt_relation_holds(g: &LabeledGraph, e: usize, f_set: &[usize]) -> bool {
    let n = g.vertex_count();
    let small_f = |a, b| f_set.iter().all(|&f| ue_small_naive(g, f, a, b));
    let uf: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| small_f(a, b)).collect())
        .collect();
    for x in 0..n {
        for z in 0..n {
            if ue_small_naive(g, e, x, z) {
                continue;
            }
            if (0..n).any(|y| uf[x][y] && uf[y][z]) {
                return false;
            }
        }
    }
    true
}

/// Smallest `1 + max d(e, F⁰)` over all edge subsets `F` satisfying the
/// relation. Exponential in the edge count.
pub fn alt_delta_brute_force(g: &LabeledGraph, e: usize) -> Option<u32> {
    let m = g.edge_count();
    assert!(m <= 16, "brute force over {m} edges");
    let (a, b) = g.edge(e);
    let (da, db) = (g.bfs(a), g.bfs(b));
    let mut best: Option<u32> = None;
    for mask in 1u32..(1 << m) {
        let f_set: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let delta = 1 + f_set
            .iter()
            .flat_map(|&f| {
                let (x, y) = g.edge(f);
                [x, y]
            })
            .map(|w| da[w].min(db[w]))
            .max()
            .unwrap();
        if best.is_some_and(|d| d <= delta) {
            continue;
        }
        if alt_relation_holds(g, e, &f_set) {
            best = Some(delta);
        }
    }
    best
}

/// Thin-triangle defect of `(x, y, z)` from explicit geodesic lists: for each
/// side, each choice of geodesic and each point on it, the distance to the
/// worse of the two other sides (each side chosen to be as far as possible).
pub fn triangle_defect(g: &LabeledGraph, t: [VertexId; 3]) -> u32 {
    let dist: Vec<Vec<u32>> = (0..g.vertex_count()).map(|v| g.bfs(v)).collect();
    let far = |w: VertexId, paths: &[Vec<VertexId>]| {
        paths
            .iter()
            .map(|p| p.iter().map(|&s| dist[w][s]).min().unwrap())
            .max()
            .unwrap()
    };
    let mut worst = 0;
    for (p, q, r) in [(t[0], t[1], t[2]), (t[1], t[2], t[0]), (t[2], t[0], t[1])] {
        let side = all_geodesics(g, p, q);
        let (s1, s2) = (all_geodesics(g, p, r), all_geodesics(g, q, r));
        for path in &side {
            for &w in path {
                worst = worst.max(far(w, &s1).min(far(w, &s2)));
            }
        }
    }
    worst
}

pub fn delta_by_enumeration(g: &LabeledGraph) -> u32 {
    let n = g.vertex_count();
    let mut worst = 0;
    for x in 0..n {
        for y in x..n {
            for z in y..n {
                worst = worst.max(triangle_defect(g, [x, y, z]));
            }
        }
    }
    worst
}

/// Edge classes of a hull in a free-group ball under `H`, by membership:
/// `{w, w·s}` and `{w', w'·s}` are identified iff `w' w⁻¹ ∈ H`.
pub fn free_edge_classes(g: &LabeledGraph, h: &Subgroup, edges: &[usize]) -> usize {
    // orient every ball edge as (w, w·s) with s a positive letter
    let oriented: Vec<(Word, usize)> = edges
        .iter()
        .map(|&e| {
            let (u, v) = g.edge(e);
            let (wu, wv) = (
                g.label(u).as_element().unwrap().clone(),
                g.label(v).as_element().unwrap().clone(),
            );
            let step = wu.inverse().product(&wv);
            let l = step.letters()[0];
            if l.is_inverse() {
                (wv, l.generator())
            } else {
                (wu, l.generator())
            }
        })
        .collect();
    let mut reps: Vec<(Word, usize)> = Vec::new();
    for (w, s) in oriented {
        let known = reps
            .iter()
            .any(|(r, t)| *t == s && h.contains(&w.product(&r.inverse())).unwrap());
        if !known {
            reps.push((w, s));
        }
    }
    reps.len()
}

/// Edge classes of a grid hull under diagonal translation: orientation plus
/// column-minus-row offset.
pub fn grid_edge_classes(g: &LabeledGraph, n: usize, edges: &[usize]) -> usize {
    edges
        .iter()
        .map(|&e| {
            let (u, v) = g.edge(e);
            let horizontal = v == u + 1;
            let (r, c) = ((u / n) as i64, (u % n) as i64);
            (horizontal, c - r)
        })
        .collect::<BTreeSet<_>>()
        .len()
}

/// Exact Floyd distances from `base` by Floyd–Warshall over rationals.
pub fn floyd_all_pairs(
    g: &LabeledGraph,
    base: VertexId,
    ratio: Ratio<u128>,
) -> Vec<Vec<Option<Ratio<u128>>>> {
    let n = g.vertex_count();
    let depth = g.bfs(base);
    let mut d: Vec<Vec<Option<Ratio<u128>>>> = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(Ratio::from_integer(0));
    }
    for &(u, v) in g.edges() {
        let k = depth[u].min(depth[v]);
        let mut w = Ratio::from_integer(1u128);
        for _ in 0..k {
            w *= ratio;
        }
        d[u][v] = Some(w);
        d[v][u] = Some(w);
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = d[k][j] {
                    let via = ik + kj;
                    if d[i][j].is_none_or(|cur| via < cur) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
    }
    d
}
