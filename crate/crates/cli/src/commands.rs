use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use floydkit_core::conedoff::coned_tree;
use floydkit_core::flow::{
    alt_hyperbolicity_delta, horocycle_scan, thin_triangle_delta, visibility_hit_rate,
    visibility_witness, TriangleSample,
};
use floydkit_core::floyd::{base_change_exhaustive, FloydMetric};
use floydkit_core::graph::{DEFAULT_BALL_CAP, DEFAULT_GEODESIC_CAP};
use floydkit_core::quasiconvex::{
    free_group_sweep, freeinf_scenario, grid_sweep, FreeinfBounds, FreeinfReport, QcReport,
    ShadowMode, DEFAULT_WINDOW,
};
use floydkit_core::words::IntersectionVerdict;
use floydkit_core::{
    build_coned_graph, cayley_ball, fineness_profile, hull, Basis, ConedGraphBundle,
    EdgeProvenance, LabeledGraph, PeripheralBlock, PeripheralStructure, ScalingFunction, Subgroup,
    TrustRegion, VertexId,
};
use serde_json::{json, Value};

use crate::config::ScenarioConfig;
use crate::dot::{export_dot, DotStyle};
use crate::error::CliError;
use crate::json::{to_pretty, GraphFile};

#[derive(Debug, Parser)]
#[command(
    name = "floydkit",
    version,
    about = "Finite-scale experiments on Cayley graphs, Floyd metrics and coned-off graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Cayley ball of a free group or free product.
    Cayley(CayleyArgs),
    /// Cone off peripheral cosets in a Cayley ball.
    Coned(ConedArgs),
    /// Floyd distances, base-change checks and horocycle scans.
    Floyd(FloydArgs),
    /// Simple-arc counts per length (fineness profile).
    Fine(FineArgs),
    /// Thin-triangle and entourage-based hyperbolicity estimates.
    Delta(DeltaArgs),
    /// Geodesic hull of a vertex set.
    Hull(HullArgs),
    /// Visibility witness between two disjoint vertex sets.
    Vis(VisArgs),
    /// Hull orbit-class sweep for a subgroup.
    Qc(QcArgs),
    /// Free-product scenario with a retraction-based intersection check.
    Freeinf(FreeinfArgs),
    /// Write a graph as Graphviz DOT.
    ExportDot(ExportDotArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct SourceArgs {
    /// Read the graph from a JSON graph file.
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Scenario file providing the basis, radius and peripheral structure.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Free group of this rank with generators a, b, c, ...
    #[arg(long)]
    pub rank: Option<usize>,
    /// Comma-separated generator names, e.g. `x,y`.
    #[arg(long, value_delimiter = ',')]
    pub generators: Vec<String>,
    /// Free product factors, one flag per factor, e.g. `--factor a,b --factor c`.
    #[arg(long = "factor")]
    pub factors: Vec<String>,
    #[arg(long)]
    pub radius: Option<usize>,
    /// n x n grid instead of a Cayley ball.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Cycle on n vertices instead of a Cayley ball.
    #[arg(long)]
    pub cycle: Option<usize>,
    /// Maximum number of ball vertices.
    #[arg(long)]
    pub ball_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CayleyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ModeArg {
    Hyperbolic,
    Parabolic,
}

#[derive(Debug, Args)]
pub struct ConedArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Peripheral subgroup: comma-separated generators of a free factor, or a
    /// single word for a cyclic subgroup. Repeat for several subgroups.
    #[arg(long = "peripheral")]
    pub peripherals: Vec<String>,
    #[arg(long, value_enum, default_value = "hyperbolic")]
    pub mode: ModeArg,
    /// Build the coned tree: factor edges are dropped instead of kept.
    #[arg(long)]
    pub tree: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Default)]
pub struct ScalingArgs {
    /// Geometric scaling ratio `p/q` (default 1/2, or the config's scaling).
    #[arg(long)]
    pub ratio: Option<String>,
    /// Polynomial scaling `1/(n+1)^s` with this exponent.
    #[arg(long)]
    pub poly: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FloydArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    /// Base vertex (label, name or `#id`); defaults to the identity or vertex 0.
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    /// Check the base-change inequality for all base pairs within this distance.
    #[arg(long)]
    pub base_change: Option<u32>,
    /// Scan the sphere of this radius for horocycle-like ray pairs.
    #[arg(long)]
    pub horocycle: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FineArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 4)]
    pub max_length: usize,
    /// Total number of search steps before giving up.
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Only these triangles, each given as `x;y;z`.
    #[arg(long = "triangle")]
    pub triangles: Vec<String>,
    /// Entourage-based estimate for these edge ids instead (`all` for every edge).
    #[arg(long = "alt-edge")]
    pub alt_edges: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub search_radius: u32,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct HullArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Vertex in the set (label, name or `#id`); repeat the flag.
    #[arg(long = "vertex", required = true)]
    pub vertices: Vec<String>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VisArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long = "from", required = true)]
    pub from: Vec<String>,
    #[arg(long = "to", required = true)]
    pub to: Vec<String>,
    /// Maximum number of geodesics to enumerate.
    #[arg(long, default_value_t = DEFAULT_GEODESIC_CAP)]
    pub cap: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ShadowArg {
    Trace,
    Floyd,
}

#[derive(Debug, Args)]
pub struct QcArgs {
    /// Scenario file with `[basis]`, `[[subgroup]]`, `radii` and `[qc]`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// Subgroup generators as words; repeat the flag.
    #[arg(long = "subgroup")]
    pub subgroup: Vec<String>,
    /// Comma-separated, strictly increasing ball radii.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<usize>,
    /// Grid-diagonal stand-in with these grid sizes instead of a subgroup.
    #[arg(long, value_delimiter = ',')]
    pub grid_sizes: Vec<usize>,
    /// Number of trailing radii that must agree for a STABLE verdict.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, value_enum, default_value = "trace")]
    pub shadow: ShadowArg,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FreeinfArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rank of the first free factor (default 2).
    #[arg(long)]
    pub n: Option<usize>,
    /// Rank of the second free factor and number of `w_i` (default 3).
    #[arg(long)]
    pub m: Option<usize>,
    /// Longest conjugator tried (default 4).
    #[arg(long)]
    pub conj_bound: Option<usize>,
    /// Longest subgroup word tried (default 6).
    #[arg(long)]
    pub word_bound: Option<usize>,
    /// Radius of the coned trees (default 3).
    #[arg(long)]
    pub tree_radius: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportDotArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Print vertex ids instead of labels.
    #[arg(long)]
    pub ids: bool,
    #[arg(long, default_value = "G")]
    pub name: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A loaded graph plus the edge provenance when it is a coned graph.
pub struct Loaded {
    pub graph: LabeledGraph,
    pub provenance: Option<Vec<EdgeProvenance>>,
    pub config: Option<ScenarioConfig>,
    pub radius: Option<usize>,
}

fn write_file(path: &FsPath, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

fn flag_basis(src: &SourceArgs) -> Result<Option<Basis>, CliError> {
    let given = [
        src.rank.is_some(),
        !src.generators.is_empty(),
        !src.factors.is_empty(),
    ];
    match given.iter().filter(|&&x| x).count() {
        0 => Ok(None),
        1 => {
            let basis = if let Some(r) = src.rank {
                if r == 0 {
                    return Err(CliError::Config("--rank must be positive".into()));
                }
                Basis::standard(r)
            } else if !src.generators.is_empty() {
                Basis::free(&src.generators).map_err(|e| CliError::Config(e.to_string()))?
            } else {
                let factors: Vec<Vec<String>> = src
                    .factors
                    .iter()
                    .map(|f| f.split(',').map(|s| s.trim().to_string()).collect())
                    .collect();
                Basis::free_product(&factors).map_err(|e| CliError::Config(e.to_string()))?
            };
            Ok(Some(basis))
        }
        _ => Err(CliError::Config(
            "give only one of --rank, --generators, --factor".into(),
        )),
    }
}

pub fn load_source(src: &SourceArgs) -> Result<Loaded, CliError> {
    let kinds = [
        src.input.is_some(),
        src.grid.is_some(),
        src.cycle.is_some(),
        src.config.is_some()
            || src.rank.is_some()
            || !src.generators.is_empty()
            || !src.factors.is_empty(),
    ];
    if kinds.iter().filter(|&&x| x).count() != 1 {
        return Err(CliError::Config(
            "choose exactly one graph source: --in, --grid, --cycle, or a basis (--config/--rank/--generators/--factor)"
                .into(),
        ));
    }
    if let Some(path) = &src.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        let (graph, provenance) = GraphFile::parse(&text)?.to_graph()?;
        return Ok(Loaded {
            graph,
            provenance,
            config: None,
            radius: None,
        });
    }
    if let Some(n) = src.grid {
        if n == 0 {
            return Err(CliError::Config("--grid must be positive".into()));
        }
        return Ok(Loaded {
            graph: LabeledGraph::grid(n, n),
            provenance: None,
            config: None,
            radius: None,
        });
    }
    if let Some(n) = src.cycle {
        if n < 3 {
            return Err(CliError::Config("--cycle needs at least 3 vertices".into()));
        }
        return Ok(Loaded {
            graph: LabeledGraph::cycle(n),
            provenance: None,
            config: None,
            radius: None,
        });
    }
    let config = src
        .config
        .as_deref()
        .map(ScenarioConfig::load)
        .transpose()?;
    let basis = match (flag_basis(src)?, &config) {
        (Some(b), _) => b,
        (None, Some(c)) => c.basis()?,
        (None, None) => unreachable!("a basis source was detected above"),
    };
    let radius = src
        .radius
        .or(config.as_ref().and_then(|c| c.radius))
        .ok_or_else(|| {
            CliError::Config("a radius is required (--radius or `radius` in the config)".into())
        })?;
    let cap = src
        .ball_cap
        .or(config.as_ref().and_then(|c| c.bounds.ball_cap))
        .unwrap_or(DEFAULT_BALL_CAP);
    let ball = cayley_ball(&basis, radius, cap)?;
    // a config with peripheral subgroups describes a coned graph
    if let Some(cfg) = config.as_ref().filter(|c| !c.peripheral.is_empty()) {
        let bundle = build_coned_graph(
            &ball,
            &cfg.peripheral_structure(&basis)?,
            &cfg.blocks(&basis)?,
        )?;
        return Ok(Loaded {
            graph: bundle.graph.clone(),
            provenance: Some(bundle.provenances().to_vec()),
            config,
            radius: Some(radius),
        });
    }
    Ok(Loaded {
        graph: ball,
        provenance: None,
        config,
        radius: Some(radius),
    })
}

/// Resolves `#id`, a vertex name, or a group element written as a word.
pub fn resolve_vertex(g: &LabeledGraph, text: &str) -> Result<VertexId, CliError> {
    let text = text.trim();
    if let Some(id) = text.strip_prefix('#') {
        let v: usize = id
            .parse()
            .map_err(|_| CliError::Config(format!("bad vertex id `{text}`")))?;
        g.check_vertex(v)?;
        return Ok(v);
    }
    if let Ok(v) = g.named(text) {
        return Ok(v);
    }
    Ok(g.vertex(text)?)
}

fn resolve_all(g: &LabeledGraph, refs: &[String]) -> Result<Vec<VertexId>, CliError> {
    let mut out: Vec<VertexId> = refs
        .iter()
        .map(|r| resolve_vertex(g, r))
        .collect::<Result<_, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn default_base(g: &LabeledGraph) -> VertexId {
    g.identity().unwrap_or(0)
}

fn parse_ratio(text: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Config(format!("ratio `{text}` must look like p/q"));
    let (n, d) = text.split_once('/').ok_or_else(bad)?;
    Ok((
        n.trim().parse().map_err(|_| bad())?,
        d.trim().parse().map_err(|_| bad())?,
    ))
}

fn scaling_from(
    args: &ScalingArgs,
    config: Option<&ScenarioConfig>,
) -> Result<ScalingFunction, CliError> {
    let config_err = |e: floydkit_core::floyd::FloydError| CliError::Config(e.to_string());
    match (&args.ratio, args.poly) {
        (Some(_), Some(_)) => Err(CliError::Config("give only one of --ratio, --poly".into())),
        (Some(r), None) => {
            let (n, d) = parse_ratio(r)?;
            ScalingFunction::geometric(n, d).map_err(config_err)
        }
        (None, Some(s)) => ScalingFunction::polynomial(s).map_err(config_err),
        (None, None) => match config {
            Some(c) => c.scaling(),
            None => ScalingFunction::geometric(1, 2).map_err(config_err),
        },
    }
}

fn render(format: Format, text: String, value: Value) -> String {
    match format {
        Format::Text => text,
        Format::Json => to_pretty(&value),
    }
}

fn cayley(args: &CayleyArgs) -> Result<String, CliError> {
    let loaded = load_source(&args.source)?;
    let g = &loaded.graph;
    if let Some(out) = &args.out {
        write_file(
            out,
            &GraphFile::from_graph(g, loaded.provenance.as_deref()).to_json(),
        )?;
    }
    Ok(render(
        args.format,
        format!(
            "vertices: {}\nedges: {}\n",
            g.vertex_count(),
            g.edge_count()
        ),
        json!({"vertices": g.vertex_count(), "edges": g.edge_count()}),
    ))
}

fn peripheral_from_flag(basis: &Basis, text: &str) -> Result<Subgroup, CliError> {
    let gens: Vec<&str> = text.split(',').map(str::trim).collect();
    Subgroup::parse(basis, &gens).map_err(|e| CliError::Config(e.to_string()))
}

fn coned_summary(bundle: &ConedGraphBundle, ball: &LabeledGraph) -> (String, Value) {
    let counts: Vec<(String, usize)> = EdgeProvenance::ALL
        .iter()
        .map(|&p| (p.tag().to_string(), bundle.count(p)))
        .collect();
    let violations = bundle.equivariance_violations();
    let partition = bundle.partition_problem(ball);
    let mut text = format!(
        "ball vertices: {}\ncone vertices: {}\nedges: {}\n",
        bundle.ball_vertex_count(),
        bundle.cones().len(),
        bundle.graph.edge_count()
    );
    for (tag, c) in &counts {
        text.push_str(&format!("  {tag}: {c}\n"));
    }
    text.push_str(&format!("connected: {}\n", bundle.is_connected()));
    text.push_str(&format!(
        "partition: {}\n",
        partition.as_deref().unwrap_or("exact")
    ));
    text.push_str(&format!("equivariance violations: {}\n", violations.len()));
    for d in &bundle.diagnostics {
        text.push_str(&format!("note: {d}\n"));
    }
    let value = json!({
        "ball_vertices": bundle.ball_vertex_count(),
        "cone_vertices": bundle.cones().len(),
        "edges": bundle.graph.edge_count(),
        "provenance_counts": counts.iter().map(|(t, c)| json!({"tag": t, "count": c})).collect::<Vec<_>>(),
        "connected": bundle.is_connected(),
        "partition_problem": partition,
        "equivariance_violations": violations.len(),
        "diagnostics": bundle.diagnostics,
    });
    (text, value)
}

fn coned(args: &ConedArgs) -> Result<String, CliError> {
    let mut source = args.source.clone();
    if source.input.is_some() || source.grid.is_some() || source.cycle.is_some() {
        return Err(CliError::Config(
            "coned needs a Cayley ball source (--config/--rank/--generators/--factor)".into(),
        ));
    }
    let config = source
        .config
        .take()
        .map(|p| ScenarioConfig::load(&p))
        .transpose()?;
    let basis = match (flag_basis(&source)?, &config) {
        (Some(b), _) => b,
        (None, Some(c)) => c.basis()?,
        (None, None) => return Err(CliError::Config("coned needs a basis".into())),
    };
    let radius = source
        .radius
        .or(config.as_ref().and_then(|c| c.radius))
        .ok_or_else(|| CliError::Config("a radius is required".into()))?;
    let cap = source
        .ball_cap
        .or(config.as_ref().and_then(|c| c.bounds.ball_cap))
        .unwrap_or(DEFAULT_BALL_CAP);
    let ball = cayley_ball(&basis, radius, cap)?;
    let (structure, blocks) = if !args.peripherals.is_empty() {
        let subgroups = args
            .peripherals
            .iter()
            .map(|p| peripheral_from_flag(&basis, p))
            .collect::<Result<Vec<_>, _>>()?;
        let block = match args.mode {
            ModeArg::Hyperbolic => PeripheralBlock::hyperbolic(),
            ModeArg::Parabolic => {
                PeripheralBlock::parabolic(floydkit_core::conedoff::InnerEdges::Cayley)
            }
        };
        let blocks = vec![block; subgroups.len()];
        (PeripheralStructure::new(subgroups)?, blocks)
    } else if let Some(c) = &config {
        (c.peripheral_structure(&basis)?, c.blocks(&basis)?)
    } else {
        return Err(CliError::Config("no peripheral subgroups given".into()));
    };
    let bundle = if args.tree {
        coned_tree(&ball, &structure)?
    } else {
        build_coned_graph(&ball, &structure, &blocks)?
    };
    let output = config.as_ref().and_then(|c| c.output.clone());
    let graph_out = args
        .out
        .clone()
        .or_else(|| output.as_ref()?.graph.clone().map(PathBuf::from));
    let dot_out = args
        .dot
        .clone()
        .or_else(|| output.as_ref()?.dot.clone().map(PathBuf::from));
    if let Some(out) = graph_out {
        write_file(
            &out,
            &GraphFile::from_graph(&bundle.graph, Some(bundle.provenances())).to_json(),
        )?;
    }
    if let Some(out) = dot_out {
        write_file(
            &out,
            &export_dot(
                &bundle.graph,
                Some(bundle.provenances()),
                &DotStyle::default(),
            ),
        )?;
    }
    let (text, value) = coned_summary(&bundle, &ball);
    Ok(render(args.format, text, value))
}

fn floyd(args: &FloydArgs) -> Result<String, CliError> {
    let loaded = load_source(&args.source)?;
    let g = &loaded.graph;
    let f = scaling_from(&args.scaling, loaded.config.as_ref())?;
    let base = match &args.base {
        Some(b) => resolve_vertex(g, b)?,
        None => default_base(g),
    };
    let mut text = String::new();
    let mut value = json!({"base": base, "scaling_exact": f.is_exact()});
    match (&args.from, &args.to) {
        (Some(a), Some(b)) => {
            let (a, b) = (resolve_vertex(g, a)?, resolve_vertex(g, b)?);
            let d = FloydMetric::new(g, base, &f)?.distance(a, b)?;
            text.push_str(&format!("{d}\n"));
            value["distance"] =
                json!({"from": a, "to": b, "value": d.to_string(), "approx": d.to_f64()});
        }
        (None, None) => {
            if args.base_change.is_none() && args.horocycle.is_none() {
                let metric = FloydMetric::new(g, base, &f)?;
                let from_base = metric.distances_from(base);
                let mut rows = Vec::with_capacity(from_base.len());
                for (v, d) in from_base.iter().enumerate() {
                    text.push_str(&format!("{}\t{}\n", g.display_label(v), d));
                    rows.push(json!({"vertex": v, "label": g.display_label(v), "distance": d.to_string()}));
                }
                value["distances_from_base"] = Value::Array(rows);
            }
        }
        _ => return Err(CliError::Config("--from and --to go together".into())),
    }
    if let Some(dmax) = args.base_change {
        let s = base_change_exhaustive(g, &f, dmax)?;
        text.push_str(&format!(
            "base pairs: {}\ncomparisons: {}\nviolations: {}\n",
            s.base_pairs,
            s.comparisons,
            s.violations.len()
        ));
        value["base_change"] = json!({
            "max_base_distance": dmax,
            "base_pairs": s.base_pairs,
            "comparisons": s.comparisons,
            "violations": s.violations.iter().map(|&(u, v, a, b)| [u, v, a, b]).collect::<Vec<_>>(),
            "min_ratio_by_distance": s.min_ratio_by_distance,
        });
    }
    if let Some(depth) = args.horocycle {
        let r = horocycle_scan(g, base, &f, depth, None, DEFAULT_GEODESIC_CAP)?;
        text.push_str(&format!(
            "horocycle depth {}: {} clusters, {} rays, {} candidates\n",
            r.depth,
            r.clusters,
            r.rays,
            r.candidates.len()
        ));
        value["horocycle"] = json!({
            "depth": r.depth,
            "core_depth": r.core_depth,
            "clusters": r.clusters,
            "rays": r.rays,
            "candidates": r.candidates.iter().map(|c| json!({
                "cluster": c.cluster,
                "ray_a": c.ray_a.vertices(),
                "ray_b": c.ray_b.vertices(),
            })).collect::<Vec<_>>(),
        });
    }
    Ok(render(args.format, text, value))
}

fn fine(args: &FineArgs) -> Result<String, CliError> {
    let loaded = load_source(&args.source)?;
    let g = &loaded.graph;
    let budget = loaded
        .config
        .as_ref()
        .and_then(|c| c.bounds.arc_budget)
        .unwrap_or(args.budget);
    let profile = fineness_profile(g, args.max_length, budget)?;
    let mut text = String::new();
    for e in &profile.entries {
        let pair = e
            .pair
            .map(|(u, v)| format!("{} -> {}", g.display_label(u), g.display_label(v)))
            .unwrap_or_else(|| "-".into());
        text.push_str(&format!("length {}: {} ({pair})\n", e.length, e.max_count));
    }
    let value = json!({
        "entries": profile.entries.iter().map(|e| json!({
            "length": e.length,
            "max_count": e.max_count,
            "pair": e.pair.map(|(u, v)| [u, v]),
        })).collect::<Vec<_>>(),
    });
    Ok(render(args.format, text, value))
}

fn trust_for(loaded: &Loaded) -> Option<TrustRegion> {
    loaded
        .radius
        .and_then(|r| TrustRegion::for_ball(&loaded.graph, r))
}

fn delta(args: &DeltaArgs) -> Result<String, CliError> {
    let loaded = load_source(&args.source)?;
    let g = &loaded.graph;
    let trust = trust_for(&loaded);
    if !args.alt_edges.is_empty() {
        let probes: Vec<usize> = if args.alt_edges.iter().any(|e| e == "all") {
            (0..g.edge_count()).collect()
        } else {
            args.alt_edges
                .iter()
                .map(|e| {
                    let id: usize = e
                        .parse()
                        .map_err(|_| CliError::Config(format!("bad edge id `{e}`")))?;
                    if id >= g.edge_count() {
                        return Err(CliError::Domain(format!("edge {id} does not exist")));
                    }
                    Ok(id)
                })
                .collect::<Result<_, _>>()?
        };
        let records = alt_hyperbolicity_delta(g, &probes, trust.as_ref(), args.search_radius)?;
        let mut text = String::new();
        for r in &records {
            match r.delta {
                Some(d) => text.push_str(&format!("edge {}: {d}\n", r.edge)),
                None => text.push_str(&format!(
                    "edge {}: no witness within radius {}\n",
                    r.edge, r.search_radius
                )),
            }
        }
        let value = json!({
            "alt": records.iter().map(|r| json!({
                "edge": r.edge,
                "delta": r.delta,
                "witness": r.witness,
                "search_radius": r.search_radius,
            })).collect::<Vec<_>>(),
        });
        return Ok(render(args.format, text, value));
    }
    let sample = if args.triangles.is_empty() {
        TriangleSample::Exhaustive
    } else {
        let mut triples = Vec::new();
        for t in &args.triangles {
            let parts: Vec<&str> = t.split(';').collect();
            if parts.len() != 3 {
                return Err(CliError::Config(format!("triangle `{t}` must be `x;y;z`")));
            }
            triples.push([
                resolve_vertex(g, parts[0])?,
                resolve_vertex(g, parts[1])?,
                resolve_vertex(g, parts[2])?,
            ]);
        }
        TriangleSample::Triples(triples)
    };
    let est = thin_triangle_delta(g, &sample, trust.as_ref())?;
    Ok(render(
        args.format,
        format!("{}\n", est.delta),
        json!({"delta": est.delta, "witness": est.witness, "triangles": est.triangles}),
    ))
}

fn hull_cmd(args: &HullArgs) -> Result<String, CliError> {
    let loaded = load_source(&args.source)?;
    let g = &loaded.graph;
    let set = resolve_all(g, &args.vertices)?;
    let trust = trust_for(&loaded);
    let h = hull(g, &set, trust.as_ref())?;
    if let Some(out) = &args.dot {
        let mut b = floydkit_core::graph::GraphBuilder::new(g.basis().clone());
        for &v in &h.vertices {
            b.add_vertex(g.label(v).clone());
        }
        let local = |v: VertexId| {
            h.vertices
                .binary_search(&v)
                .expect("hull edges join hull vertices")
        };
        for &e in &h.edges {
            let (u, v) = g.edge(e);
            b.add_edge(local(u), local(v))?;
        }
        write_file(out, &export_dot(&b.build(), None, &DotStyle::default()))?;
    }
    let mut text = format!("vertices: {}\nedges: {}\n", h.vertices.len(), h.edges.len());
    for &e in &h.edges {
        let (u, v) = g.edge(e);
        text.push_str(&format!(
            "  {} -- {}\n",
            g.display_label(u),
            g.display_label(v)
        ));
    }
    let value = json!({
        "vertices": h.vertices,
        "edges": h.edges.iter().map(|&e| { let (u, v) = g.edge(e); [u, v] }).collect::<Vec<_>>(),
    });
    Ok(render(args.format, text, value))
}

fn vis(args: &VisArgs) -> Result<String, CliError> {
    let loaded = load_source(&args.source)?;
    let g = &loaded.graph;
    let from = resolve_all(g, &args.from)?;
    let to = resolve_all(g, &args.to)?;
    let w = visibility_witness(g, &from, &to, args.cap)?;
    let rate = visibility_hit_rate(g, &from, &to, &w.edges, args.cap)?;
    let mut text = format!(
        "witness edges: {}\ngeodesics: {}\nhit rate: {rate}\n",
        w.edges.len(),
        w.geodesics
    );
    for &e in &w.edges {
        let (u, v) = g.edge(e);
        text.push_str(&format!(
            "  {} -- {}\n",
            g.display_label(u),
            g.display_label(v)
        ));
    }
    let value = json!({
        "edges": w.edges.iter().map(|&e| { let (u, v) = g.edge(e); [u, v] }).collect::<Vec<_>>(),
        "geodesics": w.geodesics,
        "hit_rate": rate,
    });
    Ok(render(args.format, text, value))
}

pub fn qc_report_json(r: &QcReport) -> Value {
    json!({
        "window": r.window,
        "verdict": r.verdict.as_str(),
        "records": r.records.iter().map(|q| json!({
            "radius": q.radius,
            "depth": q.depth,
            "shadow_size": q.shadow_size,
            "hull_vertices": q.hull_vertices,
            "hull_edges": q.hull_edges,
            "orbit_classes": q.orbit_classes,
            "max_inner_degree": q.max_inner_degree,
        })).collect::<Vec<_>>(),
    })
}

fn qc(args: &QcArgs) -> Result<String, CliError> {
    let config = args
        .config
        .as_deref()
        .map(ScenarioConfig::load)
        .transpose()?;
    let qc_section = config.as_ref().and_then(|c| c.qc.clone());
    let window = args
        .window
        .or(qc_section.as_ref().and_then(|q| q.window))
        .unwrap_or(DEFAULT_WINDOW);
    let grid_sizes = if !args.grid_sizes.is_empty() {
        args.grid_sizes.clone()
    } else {
        qc_section
            .as_ref()
            .and_then(|q| q.grid_sizes.clone())
            .unwrap_or_default()
    };
    let report = if !grid_sizes.is_empty() {
        if grid_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(
                "grid sizes must be strictly increasing".into(),
            ));
        }
        grid_sweep(&grid_sizes, window)?
    } else {
        let basis = match (args.rank, &config) {
            (Some(r), _) if r > 0 => Basis::standard(r),
            (Some(_), _) => return Err(CliError::Config("--rank must be positive".into())),
            (None, Some(c)) => c.basis()?,
            (None, None) => Basis::standard(2),
        };
        let subgroup = if !args.subgroup.is_empty() {
            Subgroup::parse(&basis, &args.subgroup).map_err(|e| CliError::Config(e.to_string()))?
        } else if let (Some(c), Some(name)) = (
            &config,
            qc_section.as_ref().and_then(|q| q.subgroup.clone()),
        ) {
            c.subgroup_named(&basis, &name)?
        } else {
            return Err(CliError::Config(
                "qc needs --subgroup, a config subgroup, or --grid-sizes".into(),
            ));
        };
        let radii = if !args.radii.is_empty() {
            args.radii.clone()
        } else {
            config.as_ref().map(|c| c.radii.clone()).unwrap_or_default()
        };
        if radii.is_empty() {
            return Err(CliError::Config("qc needs radii".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("radii must be strictly increasing".into()));
        }
        let mode = match args.shadow {
            ShadowArg::Trace => ShadowMode::OrbitTrace,
            ShadowArg::Floyd => ShadowMode::FloydClusters {
                scaling: match &config {
                    Some(c) => c.scaling()?,
                    None => ScalingFunction::geometric(1, 2).expect("1/2 is a valid ratio"),
                },
                eps: None,
            },
        };
        free_group_sweep(&basis, &subgroup, &radii, &mode, window)?
    };
    let text = to_pretty(&qc_report_json(&report));
    let out = args.out.clone().or_else(|| {
        config
            .as_ref()
            .and_then(|c| c.output.as_ref()?.report.clone().map(PathBuf::from))
    });
    if let Some(out) = out {
        write_file(&out, &text)?;
    }
    Ok(text)
}

fn words_json(basis: &Basis, ws: &[floydkit_core::Word]) -> Vec<String> {
    ws.iter().map(|w| basis.format(w)).collect()
}

pub fn freeinf_json(r: &FreeinfReport) -> Value {
    let tree = |t: &floydkit_core::quasiconvex::TreeSummary| {
        json!({
            "vertices": t.vertices,
            "edges": t.edges,
            "cones": t.cones,
            "connected": t.connected,
            "is_tree": t.is_tree,
        })
    };
    json!({
        "n": r.n,
        "m": r.m,
        "bounds": {
            "conj_bound": r.bounds.conj_bound,
            "word_bound": r.bounds.word_bound,
            "tree_radius": r.bounds.tree_radius,
        },
        "basis": r.basis.names(),
        "w": words_json(&r.basis, &r.w),
        "z": words_json(&r.basis, &r.z),
        "nielsen_round_trip": r.nielsen_round_trip,
        "retraction_matches": r.retraction_matches,
        "intersection": r.intersection.as_ref().map(|i| json!({
            "verdict": match i.verdict {
                IntersectionVerdict::Consistent => "CONSISTENT",
                IntersectionVerdict::WitnessFound => "WITNESS_FOUND",
            },
            "conjugators_checked": i.conjugators_checked,
            "subgroup_words_checked": i.subgroup_words_checked,
            "pairs_checked": i.pairs_checked,
            "witness_count": i.witness_count,
            "witnesses": i.witnesses.iter().map(|w| json!({
                "conjugator": r.basis.format(&w.conjugator),
                "subgroup_element": r.basis.format(&w.subgroup_element),
                "conjugate": r.basis.format(&w.conjugate),
            })).collect::<Vec<_>>(),
        })),
        "r": r.r.subgroups().iter().map(|s| words_json(&r.basis, s.generators())).collect::<Vec<_>>(),
        "tree_p": tree(&r.tree_p),
        "tree_q": tree(&r.tree_q),
        "verdict": r.verdict.as_str(),
        "narrative": r.narrative,
    })
}

fn freeinf_text(r: &FreeinfReport) -> String {
    let mut s = format!("n = {}, m = {}\n", r.n, r.m);
    for (k, (w, z)) in r.w.iter().zip(&r.z).enumerate() {
        s.push_str(&format!(
            "w{} = {}    z{} = {}\n",
            k + 1,
            r.basis.format(w),
            k + 1,
            r.basis.format(z)
        ));
    }
    for line in &r.narrative {
        s.push_str(line);
        s.push('\n');
    }
    if let Some(i) = &r.intersection {
        s.push_str(&format!(
            "pairs checked: {}\nwitnesses: {}\n",
            i.pairs_checked, i.witness_count
        ));
    }
    if r.r.is_empty() {
        s.push_str("R = ∅\n");
    } else {
        let parts: Vec<String> =
            r.r.subgroups()
                .iter()
                .map(|h| format!("⟨{}⟩", words_json(&r.basis, h.generators()).join(", ")))
                .collect();
        s.push_str(&format!("R = {{{}}}\n", parts.join(", ")));
    }
    s.push_str(&format!("verdict: {}\n", r.verdict.as_str()));
    s
}

fn freeinf(args: &FreeinfArgs) -> Result<String, CliError> {
    let config = args
        .config
        .as_deref()
        .map(ScenarioConfig::load)
        .transpose()?;
    let section = config.as_ref().and_then(|c| c.freeinf.clone());
    let cfg_bounds = config
        .as_ref()
        .map(|c| c.bounds.clone())
        .unwrap_or_default();
    let n = args.n.or(section.as_ref().map(|s| s.n)).unwrap_or(2);
    let m = args.m.or(section.as_ref().map(|s| s.m)).unwrap_or(3);
    let d = FreeinfBounds::default();
    let bounds = FreeinfBounds {
        conj_bound: args
            .conj_bound
            .or(cfg_bounds.conj_bound)
            .unwrap_or(d.conj_bound),
        word_bound: args
            .word_bound
            .or(cfg_bounds.word_bound)
            .unwrap_or(d.word_bound),
        tree_radius: args
            .tree_radius
            .or(cfg_bounds.tree_radius)
            .unwrap_or(d.tree_radius),
    };
    if bounds.word_bound == 0 {
        return Err(CliError::Config("word bound must be positive".into()));
    }
    let report = freeinf_scenario(n, m, bounds)?;
    if let Some(out) = &args.out {
        write_file(out, &to_pretty(&freeinf_json(&report)))?;
    }
    Ok(render(
        args.format,
        freeinf_text(&report),
        freeinf_json(&report),
    ))
}

fn export_dot_cmd(args: &ExportDotArgs) -> Result<String, CliError> {
    let loaded = load_source(&args.source)?;
    let style = DotStyle {
        name: args.name.clone(),
        labels: !args.ids,
    };
    let dot = export_dot(&loaded.graph, loaded.provenance.as_deref(), &style);
    match &args.out {
        Some(out) => {
            write_file(out, &dot)?;
            Ok(String::new())
        }
        None => Ok(dot),
    }
}

/// Runs one parsed command and returns what it prints on stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Cayley(a) => cayley(a),
        Command::Coned(a) => coned(a),
        Command::Floyd(a) => floyd(a),
        Command::Fine(a) => fine(a),
        Command::Delta(a) => delta(a),
        Command::Hull(a) => hull_cmd(a),
        Command::Vis(a) => vis(a),
        Command::Qc(a) => qc(a),
        Command::Freeinf(a) => freeinf(a),
        Command::ExportDot(a) => export_dot_cmd(a),
    }
}

/// Parses `argv` (program name first) and runs it. Argument errors map to
/// the config exit code.
pub fn run<I, T>(argv: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Config(e.to_string()))?;
    execute(&cli)
}
