//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::collections::{BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use floydkit_cli::config::ScenarioConfig;
use floydkit_core::flow::{
    alt_hyperbolicity_delta, thin_triangle_delta, visibility_witness, TriangleSample,
};
use floydkit_core::floyd::base_change_exhaustive;
use floydkit_core::graph::{DEFAULT_BALL_CAP, DEFAULT_GEODESIC_CAP};
use floydkit_core::quasiconvex::{
    default_depth, free_group_sweep, freeinf_scenario, grid_sweep, subgroup_hull_orbit_count,
    FreeGroupModel, FreeinfBounds, GridDiagonalModel, OrbitModel, ScenarioVerdict, ShadowMode,
    DEFAULT_WINDOW,
};
use floydkit_core::words::{ball_size, IntersectionVerdict};
use floydkit_core::{
    build_coned_graph, cayley_ball, fineness_profile, hull, simple_arcs_count, Basis,
    EdgeProvenance, FloydLength, FloydMetric, LabeledGraph, PeripheralBlock, PeripheralStructure,
    ScalingFunction, Subgroup, Verdict, VertexId, VertexLabel, Word,
};
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn tree(rank: usize, radius: usize) -> LabeledGraph {
    cayley_ball(&Basis::standard(rank), radius, DEFAULT_BALL_CAP).unwrap()
}

fn coned_over_a(radius: usize) -> LabeledGraph {
    let r = PeripheralStructure::free_factors(&[vec![0]]).unwrap();
    build_coned_graph(&tree(2, radius), &r, &[PeripheralBlock::hyperbolic()])
        .unwrap()
        .graph
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    if t < limit {
        Ok(format!("{:.1}s", t.as_secs_f64()))
    } else {
        Err(format!(
            "took {:.1}s, limit {}s",
            t.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn floyd_base_change() -> Outcome {
    let f = ScalingFunction::geometric(1, 2).unwrap();
    ensure!(f.is_exact(), "geometric 1/2 must use exact arithmetic");

    // exact metric against rational Floyd-Warshall, and the inequality on the oracle's numbers
    let small = tree(2, 3);
    let half = Ratio::new(1u128, 2);
    let dist = small.distance_matrix();
    let tables: Vec<_> = (0..small.vertex_count())
        .map(|b| oracles::floyd_all_pairs(&small, b, half))
        .collect();
    for base in 0..small.vertex_count() {
        let m = FloydMetric::new(&small, base, &f).unwrap();
        for a in 0..small.vertex_count() {
            for (got, want) in m.distances_from(a).iter().zip(&tables[base][a]) {
                ensure!(
                    matches!(got, FloydLength::Exact(r) if Some(*r) == *want),
                    "metric mismatch at base {base}: {got} vs {want:?}"
                );
            }
        }
    }
    let mut oracle_checks = 0u64;
    for u in 0..small.vertex_count() {
        for v in 0..small.vertex_count() {
            let d = dist.get(u, v);
            if d > 2 {
                continue;
            }
            let lambda = half.pow(d as i32);
            for a in 0..small.vertex_count() {
                for b in 0..small.vertex_count() {
                    let (du, dv) = (tables[u][a][b].unwrap(), tables[v][a][b].unwrap());
                    ensure!(
                        du >= lambda * dv,
                        "oracle violation at u={u} v={v} a={a} b={b}"
                    );
                    oracle_checks += 1;
                }
            }
        }
    }

    let g = tree(2, 5);
    let start = Instant::now();
    let s = base_change_exhaustive(&g, &f, 2).unwrap();
    let time = within(start, Duration::from_secs(60))?;
    ensure!(s.violations.is_empty(), "{} violations", s.violations.len());
    let n = g.vertex_count();
    ensure!(
        s.vertex_pairs_per_base_pair >= n * (n - 1) / 2,
        "not every vertex pair was compared"
    );
    Ok(format!(
        "radius 5: {} comparisons over {} base pairs, 0 violations in {time}; radius 3 oracle: {oracle_checks} checks",
        s.comparisons, s.base_pairs
    ))
}

fn fineness() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0u64;
    for (rank, radius) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 3)] {
        let g = tree(rank, radius);
        for u in 0..g.vertex_count() {
            for v in 0..g.vertex_count() {
                for len in 1..=6 {
                    let c = simple_arcs_count(&g, u, v, len, u64::MAX).unwrap();
                    ensure!(
                        c <= 1,
                        "tree rank {rank} radius {radius}: {c} arcs {u}->{v} of length {len}"
                    );
                }
                pairs += 1;
            }
        }
    }
    let g = coned_over_a(4);
    let max_len = 5;
    let profile = fineness_profile(&g, max_len, u64::MAX)
        .unwrap()
        .max_counts();
    let oracle = oracles::arc_profile(&g, max_len);
    ensure!(
        profile == oracle,
        "coned profile {profile:?}, brute force {oracle:?}"
    );
    let time = within(start, Duration::from_secs(120))?;
    Ok(format!(
        "trees: {pairs} ordered pairs x lengths 1..6 all <= 1; coned radius 4 profile {profile:?} matches; {time}"
    ))
}

fn hyperbolicity_detector() -> Outcome {
    let g = tree(2, 4);
    let t = thin_triangle_delta(&g, &TriangleSample::Exhaustive, None).unwrap();
    ensure!(t.delta == 0, "tree delta {}", t.delta);
    let mut deltas = Vec::new();
    for n in 3..=5 {
        let grid = LabeledGraph::grid(n, n);
        let d = thin_triangle_delta(&grid, &TriangleSample::Exhaustive, None)
            .unwrap()
            .delta;
        let oracle = oracles::delta_by_enumeration(&grid);
        ensure!(d == oracle, "grid {n}: {d} vs brute force {oracle}");
        deltas.push(d);
    }
    ensure!(
        deltas.windows(2).all(|w| w[0] < w[1]),
        "grid deltas not increasing: {deltas:?}"
    );
    Ok(format!(
        "tree radius 4: 0 over {} triangles; grids 3,4,5: {deltas:?}",
        t.triangles
    ))
}

fn alt_hyperbolicity() -> Outcome {
    let mut edges = 0;
    for (rank, radius) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
        let g = tree(rank, radius);
        let probes: Vec<usize> = (0..g.edge_count()).collect();
        for r in alt_hyperbolicity_delta(&g, &probes, None, 2).unwrap() {
            ensure!(
                oracles::alt_relation_holds(&g, r.edge, &[r.edge]),
                "F = {{e}} fails for edge {} of tree rank {rank} radius {radius}",
                r.edge
            );
            ensure!(
                r.delta == Some(1),
                "tree edge {}: delta {:?}",
                r.edge,
                r.delta
            );
            edges += 1;
        }
    }
    let c4 = LabeledGraph::cycle(4);
    let probes: Vec<usize> = (0..4).collect();
    for r in alt_hyperbolicity_delta(&c4, &probes, None, 3).unwrap() {
        let f = r.witness.as_ref().ok_or("4-cycle edge without witness")?;
        ensure!(
            oracles::alt_relation_holds(&c4, r.edge, f),
            "4-cycle witness fails"
        );
        let brute = oracles::alt_delta_brute_force(&c4, r.edge);
        ensure!(
            r.delta == Some(2) && brute == Some(2),
            "4-cycle: {:?} vs brute force {brute:?}",
            r.delta
        );
    }
    Ok(format!(
        "{edges} tree edges verified with F = {{e}}, delta 1; 4-cycle delta 2 on all edges"
    ))
}

fn hull_correctness() -> Outcome {
    let g = tree(2, 3);
    let ids: Vec<VertexId> = ["A A", "A", "1", "a", "a a"]
        .iter()
        .map(|w| g.vertex(w).unwrap())
        .collect();
    let h = hull(&g, &[ids[0], ids[4]], None).unwrap();
    let want_v: BTreeSet<_> = ids.iter().copied().collect();
    let want_e: BTreeSet<_> = ids
        .windows(2)
        .map(|w| g.edge_id(w[0], w[1]).unwrap())
        .collect();
    ensure!(
        h.vertices.iter().copied().collect::<BTreeSet<_>>() == want_v,
        "axis vertices differ"
    );
    ensure!(
        h.edges.iter().copied().collect::<BTreeSet<_>>() == want_e,
        "axis edges differ"
    );
    ensure!(h.edges.len() == 4, "{} edges", h.edges.len());

    let mut rng = StdRng::seed_from_u64(5);
    let fixtures = [
        ("tree", tree(2, 3)),
        ("coned", coned_over_a(2)),
        ("grid", LabeledGraph::grid(4, 4)),
        ("cycle", LabeledGraph::cycle(7)),
    ];
    for (name, g) in &fixtures {
        for _ in 0..100 {
            let mut all: Vec<VertexId> = (0..g.vertex_count()).collect();
            all.shuffle(&mut rng);
            let big = rng.gen_range(2..=6.min(all.len()));
            let small = rng.gen_range(1..big);
            let (a, b) = (&all[..small], &all[..big]);
            let (ha, hb) = (hull(g, a, None).unwrap(), hull(g, b, None).unwrap());
            ensure!(
                ha.is_subset_of(&hb),
                "{name}: hull not monotone for {a:?} in {b:?}"
            );
            let (ov, oe) = oracles::hull_by_enumeration(g, a);
            ensure!(
                ha.vertices == ov && ha.edges == oe,
                "{name}: hull of {a:?} differs from enumeration"
            );
        }
    }
    Ok(
        "axis segment exact; 400 monotone pairs, each smaller hull equal to the enumerated one"
            .into(),
    )
}

fn quasiconvexity() -> Outcome {
    let basis = Basis::standard(2);
    let h = Subgroup::parse(&basis, &["a"]).unwrap();
    let radii: Vec<usize> = (4..=8).collect();
    let report =
        free_group_sweep(&basis, &h, &radii, &ShadowMode::OrbitTrace, DEFAULT_WINDOW).unwrap();
    for &r in &radii {
        let model = FreeGroupModel::new(&basis, r, h.clone()).unwrap();
        let (rec, hl) =
            subgroup_hull_orbit_count(&model, default_depth(r), &ShadowMode::OrbitTrace).unwrap();
        let oracle = oracles::free_edge_classes(model.graph(), &h, &hl.edges);
        ensure!(
            rec.orbit_classes == oracle && oracle == 1,
            "<a> radius {r}: {} vs {oracle}",
            rec.orbit_classes
        );
    }
    let counts: Vec<usize> = report.records.iter().map(|r| r.orbit_classes).collect();
    ensure!(
        report.verdict == Verdict::Stable,
        "verdict {}",
        report.verdict.as_str()
    );

    let grid = grid_sweep(&[3, 4, 5], DEFAULT_WINDOW).unwrap();
    let mut grid_counts = Vec::new();
    for n in 3..=5 {
        let model = GridDiagonalModel::new(n).unwrap();
        let (rec, hl) = subgroup_hull_orbit_count(
            &model,
            default_depth(model.radius()),
            &ShadowMode::OrbitTrace,
        )
        .unwrap();
        let oracle = oracles::grid_edge_classes(model.graph(), n, &hl.edges);
        ensure!(
            rec.orbit_classes == oracle,
            "grid {n}: {} vs {oracle}",
            rec.orbit_classes
        );
        grid_counts.push(oracle);
    }
    let swept: Vec<usize> = grid.records.iter().map(|r| r.orbit_classes).collect();
    ensure!(
        swept == grid_counts,
        "grid sweep {swept:?} vs oracle {grid_counts:?}"
    );
    ensure!(
        grid_counts.windows(2).all(|w| w[0] < w[1]),
        "grid counts {grid_counts:?} not growing"
    );
    ensure!(
        grid.verdict == Verdict::Growing,
        "grid verdict {}",
        grid.verdict.as_str()
    );
    Ok(format!(
        "<a> radii 4..8: {counts:?} STABLE; grid 3..5: {grid_counts:?} GROWING"
    ))
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn bfs_component_count(g: &LabeledGraph) -> usize {
    let mut seen = vec![false; g.vertex_count()];
    let mut components = 0;
    for s in 0..g.vertex_count() {
        if seen[s] {
            continue;
        }
        components += 1;
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    components
}

fn strip_right(w: &Word, subset: &[usize]) -> Word {
    let mut letters = w.letters().to_vec();
    while letters
        .last()
        .is_some_and(|l| subset.contains(&l.generator()))
    {
        letters.pop();
    }
    Word::reduced_from(letters)
}

fn coned_construction() -> Outcome {
    let mut summary = Vec::new();
    for file in ["cone-a.cfg", "product-parabolic.cfg", "two-cones.cfg"] {
        let cfg = ScenarioConfig::load(&scenario_path(file)).map_err(|e| e.to_string())?;
        let basis = cfg.basis().map_err(|e| e.to_string())?;
        let ball = cayley_ball(&basis, cfg.radius.unwrap(), DEFAULT_BALL_CAP).unwrap();
        let structure = cfg
            .peripheral_structure(&basis)
            .map_err(|e| e.to_string())?;
        let blocks = cfg.blocks(&basis).map_err(|e| e.to_string())?;
        let bundle = build_coned_graph(&ball, &structure, &blocks).map_err(|e| e.to_string())?;
        let g = &bundle.graph;
        let subsets: Vec<Vec<usize>> = structure
            .subgroups()
            .iter()
            .map(|s| s.basis_subset().unwrap())
            .collect();

        // expected provenance straight from the labels
        let step_sets: Vec<Vec<Word>> = blocks
            .iter()
            .zip(&subsets)
            .map(|(b, subset)| match &b.inner {
                floydkit_core::conedoff::InnerEdges::Cayley => subset
                    .iter()
                    .map(|&s| Word::letter(floydkit_core::Letter::new(s, false)))
                    .collect(),
                floydkit_core::conedoff::InnerEdges::Words(ws) => ws.clone(),
                floydkit_core::conedoff::InnerEdges::None => Vec::new(),
            })
            .collect();
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let expected = match (g.label(u), g.label(v)) {
                (VertexLabel::Cone { .. }, _) | (_, VertexLabel::Cone { .. }) => {
                    EdgeProvenance::Cone
                }
                (VertexLabel::Element(wu), VertexLabel::Element(wv)) => {
                    let step = wu.inverse().product(wv);
                    let mut tags: Vec<EdgeProvenance> = Vec::new();
                    for (i, steps) in step_sets.iter().enumerate() {
                        if steps.iter().any(|s| *s == step || s.inverse() == step) {
                            tags.push(match blocks[i].mode {
                                floydkit_core::conedoff::PeripheralMode::Hyperbolic => {
                                    EdgeProvenance::Hyperbolic
                                }
                                floydkit_core::conedoff::PeripheralMode::Parabolic => {
                                    EdgeProvenance::Parabolic
                                }
                            });
                        }
                    }
                    if tags.is_empty() {
                        ensure!(
                            step.len() == 1,
                            "{file}: edge {e} is neither a Cayley nor an inner edge"
                        );
                        EdgeProvenance::NonHorospherical
                    } else {
                        *tags.iter().min().unwrap()
                    }
                }
                _ => return Err(format!("{file}: unexpected vertex kind on edge {e}")),
            };
            ensure!(
                bundle.provenance(e) == expected,
                "{file}: edge {e} tagged {:?}, expected {expected:?}",
                bundle.provenance(e)
            );
        }
        // every ball element is joined to exactly one cone per peripheral
        for v in 0..ball.vertex_count() {
            for (i, subset) in subsets.iter().enumerate() {
                let w = ball.label(v).as_element().unwrap();
                let cone = g
                    .find(&VertexLabel::Cone {
                        representative: strip_right(w, subset),
                        peripheral: i,
                    })
                    .ok_or_else(|| format!("{file}: missing cone for vertex {v}"))?;
                ensure!(
                    g.has_edge(v, cone),
                    "{file}: vertex {v} not joined to its cone"
                );
            }
        }
        ensure!(
            bundle.partition_problem(&ball).is_none(),
            "{file}: {:?}",
            bundle.partition_problem(&ball)
        );
        ensure!(bfs_component_count(g) == 1, "{file}: not connected");

        // left translation by each generator, for edges whose image stays in the graph
        let mut checked = 0u64;
        let image = |x: VertexId, s: &Word| -> Option<VertexId> {
            match g.label(x) {
                VertexLabel::Element(w) => g.find_element(&s.product(w)),
                VertexLabel::Cone {
                    representative,
                    peripheral,
                } => g.find(&VertexLabel::Cone {
                    representative: strip_right(&s.product(representative), &subsets[*peripheral]),
                    peripheral: *peripheral,
                }),
                _ => None,
            }
        };
        for gen in 0..basis.rank() {
            for inv in [false, true] {
                let s = Word::letter(floydkit_core::Letter::new(gen, inv));
                for (e, &(u, v)) in g.edges().iter().enumerate() {
                    let (Some(su), Some(sv)) = (image(u, &s), image(v, &s)) else {
                        continue;
                    };
                    // a cone edge only translates faithfully if the element stays in the ball
                    let f = g.edge_id(su, sv).ok_or_else(|| {
                        format!(
                            "{file}: translate of edge {e} by {} missing",
                            basis.format(&s)
                        )
                    })?;
                    ensure!(
                        bundle.provenance(f) == bundle.provenance(e),
                        "{file}: provenance changes under translation"
                    );
                    checked += 1;
                }
            }
        }
        ensure!(
            bundle.equivariance_violations().is_empty(),
            "{file}: library reports violations"
        );
        summary.push(format!(
            "{file} ({} edges, {checked} translations)",
            g.edge_count()
        ));
    }
    Ok(summary.join("; "))
}

fn freeinf() -> Outcome {
    let start = Instant::now();
    let bounds = FreeinfBounds {
        conj_bound: 4,
        word_bound: 6,
        tree_radius: 3,
    };
    let r = freeinf_scenario(2, 3, bounds).map_err(|e| e.to_string())?;
    let time = within(start, Duration::from_secs(120))?;
    let i = r.intersection.as_ref().ok_or("no intersection report")?;
    ensure!(
        i.verdict == IntersectionVerdict::Consistent,
        "intersection verdict {:?}",
        i.verdict
    );
    ensure!(i.witness_count == 0, "{} witnesses", i.witness_count);
    // reduced words of length <= 4 over 5 generators, times nontrivial words of length <= 6 over 3
    let expected_pairs = ball_size(5, 4) * (ball_size(3, 6) - 1);
    ensure!(
        u128::from(i.pairs_checked) == expected_pairs,
        "{} pairs, expected {expected_pairs}",
        i.pairs_checked
    );
    ensure!(r.r.is_empty(), "R has {} members", r.r.len());
    for (name, t) in [("P", &r.tree_p), ("Q", &r.tree_q)] {
        ensure!(
            t.connected && t.is_tree,
            "coned tree {name}: connected {} tree {}",
            t.connected,
            t.is_tree
        );
    }
    ensure!(
        r.nielsen_round_trip && r.retraction_matches,
        "Nielsen maps do not round-trip"
    );
    for (k, (w, z)) in r.w.iter().zip(&r.z).enumerate() {
        let y = Word::letter(r.basis.generator(&format!("y{}", k + 1)).unwrap());
        ensure!(
            z.product(&w.inverse()) == y,
            "y{} != z{} w{}^-1",
            k + 1,
            k + 1,
            k + 1
        );
    }
    ensure!(
        r.verdict == ScenarioVerdict::Consistent,
        "scenario verdict {}",
        r.verdict.as_str()
    );
    Ok(format!(
        "{} pairs, 0 witnesses, R empty, both coned trees connected, {time}",
        i.pairs_checked
    ))
}

fn visibility() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let fixtures = [
        ("tree", tree(2, 3)),
        ("coned", coned_over_a(2)),
        ("grid", LabeledGraph::grid(4, 4)),
        ("cycle", LabeledGraph::cycle(7)),
    ];
    let mut geodesics = 0usize;
    for (name, g) in &fixtures {
        for _ in 0..50 {
            let mut all: Vec<VertexId> = (0..g.vertex_count()).collect();
            all.shuffle(&mut rng);
            let ka = rng.gen_range(1..=3);
            let kb = rng.gen_range(1..=3);
            let (a, b) = (&all[..ka], &all[ka..ka + kb]);
            let w = visibility_witness(g, a, b, DEFAULT_GEODESIC_CAP).map_err(|e| e.to_string())?;
            for &x in a {
                for &y in b {
                    for p in oracles::all_geodesics(g, x, y) {
                        let ids = oracles::edge_ids(g, &p);
                        ensure!(
                            w.edges.iter().any(|e| ids.contains(e)),
                            "{name}: geodesic {p:?} misses F"
                        );
                        geodesics += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "200 pairs, {geodesics} enumerated geodesics, hit rate 100%"
    ))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("floydkit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let s = |n: &str| scenario_path(n).to_string_lossy().into_owned();
    let file = |n: &str| dir.join(n).to_string_lossy().into_owned();
    let tree_file = file("tree.json");
    let commands: Vec<Vec<String>> = vec![
        vec![
            "cayley".into(),
            "--rank".into(),
            "2".into(),
            "--radius".into(),
            "3".into(),
            "--out".into(),
            tree_file.clone(),
        ],
        vec![
            "coned".into(),
            "--config".into(),
            s("cone-a.cfg"),
            "--out".into(),
            file("cone.json"),
            "--dot".into(),
            file("cone.dot"),
        ],
        vec![
            "coned".into(),
            "--config".into(),
            s("product-parabolic.cfg"),
            "--format".into(),
            "json".into(),
        ],
        vec!["coned".into(), "--config".into(), s("two-cones.cfg")],
        vec![
            "floyd".into(),
            "--config".into(),
            s("cone-a.cfg"),
            "--base-change".into(),
            "1".into(),
            "--horocycle".into(),
            "2".into(),
        ],
        vec![
            "floyd".into(),
            "--rank".into(),
            "2".into(),
            "--radius".into(),
            "3".into(),
            "--poly".into(),
            "2".into(),
            "--format".into(),
            "json".into(),
        ],
        vec![
            "fine".into(),
            "--config".into(),
            s("cone-a.cfg"),
            "--max-length".into(),
            "4".into(),
        ],
        vec!["delta".into(), "--in".into(), tree_file.clone()],
        vec![
            "delta".into(),
            "--grid".into(),
            "4".into(),
            "--format".into(),
            "json".into(),
        ],
        vec![
            "delta".into(),
            "--cycle".into(),
            "6".into(),
            "--alt-edge".into(),
            "all".into(),
        ],
        vec![
            "hull".into(),
            "--config".into(),
            s("two-cones.cfg"),
            "--vertex".into(),
            "a b".into(),
            "--vertex".into(),
            "C".into(),
            "--dot".into(),
            file("hull.dot"),
        ],
        vec![
            "vis".into(),
            "--grid".into(),
            "5".into(),
            "--from".into(),
            "0,0".into(),
            "--from".into(),
            "0,1".into(),
            "--to".into(),
            "4,4".into(),
        ],
        vec![
            "qc".into(),
            "--config".into(),
            s("qc-cyclic-a.cfg"),
            "--out".into(),
            file("qc.json"),
        ],
        vec!["qc".into(), "--config".into(), s("qc-grid.cfg")],
        vec![
            "freeinf".into(),
            "--config".into(),
            s("freeinf.cfg"),
            "--out".into(),
            file("freeinf.json"),
        ],
        vec![
            "export-dot".into(),
            "--config".into(),
            s("product-parabolic.cfg"),
        ],
    ];
    let outputs = |cmd: &[String]| -> Result<Vec<Vec<u8>>, String> {
        let o = Command::new(env!("CARGO_BIN_EXE_floydkit"))
            .args(cmd)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            o.status.success(),
            "{} failed: {}",
            cmd.join(" "),
            String::from_utf8_lossy(&o.stderr)
        );
        let mut all = vec![o.stdout];
        for w in cmd.windows(2) {
            if ["--out", "--dot"].contains(&w[0].as_str()) {
                all.push(std::fs::read(&w[1]).map_err(|e| e.to_string())?);
            }
        }
        Ok(all)
    };
    for cmd in &commands {
        let first = outputs(cmd)?;
        let second = outputs(cmd)?;
        ensure!(
            first == second,
            "output differs between runs of `{}`",
            cmd.join(" ")
        );
    }
    let _ = std::fs::remove_dir_all(&dir);
    let names: BTreeSet<&str> = commands.iter().map(|c| c[0].as_str()).collect();
    Ok(format!(
        "{} invocations over {} subcommands, byte-identical",
        commands.len(),
        names.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Floyd base-change inequality", floyd_base_change),
        ("fineness oracle", fineness),
        ("thin-triangle detector", hyperbolicity_detector),
        ("entourage hyperbolicity witness", alt_hyperbolicity),
        ("hull correctness", hull_correctness),
        ("quasiconvexity criterion", quasiconvexity),
        ("coned construction", coned_construction),
        ("free product scenario", freeinf),
        ("visibility", visibility),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.1}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
