//! Peripheral structures, their intersections, and coned-off graphs built on
//! top of a Cayley ball.
//!
//! A coned graph keeps the ball, adds one cone vertex per coset `gR` of each
//! peripheral subgroup `R` that meets the ball, and tags every edge with the
//! layer it came from:
//!
//! * [`EdgeProvenance::Cone`]: cone vertex to coset element,
//! * [`EdgeProvenance::Hyperbolic`]: inner edges of a subgroup in hyperbolic mode,
//! * [`EdgeProvenance::Parabolic`]: inner edges of a subgroup in parabolic mode,
//! * [`EdgeProvenance::NonHorospherical`]: the remaining Cayley edges.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{EdgeId, GraphBuilder, GraphError, LabeledGraph, VertexId, VertexLabel};
use crate::words::{
    reduced_words, verify_trivial_intersection, Basis, Endomorphism, IntersectionReport,
    IntersectionVerdict, Letter, Subgroup, Word, WordError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConedError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unsupported subgroup: {0}")]
    UnsupportedSubgroup(String),
    #[error("peripheral subgroups {0} and {1} coincide")]
    DuplicatePeripheral(usize, usize),
    #[error("vertex {0} of the input is not a group element")]
    NotACayleyBall(VertexId),
    #[error("inner edge word for peripheral {0} does not lie in that subgroup")]
    InnerEdgeOutsideSubgroup(usize),
    #[error(
        "one block per peripheral subgroup is required ({expected} subgroups, {found} blocks)"
    )]
    BlockMismatch { expected: usize, found: usize },
    #[error("coned graph is disconnected: {components} components")]
    DisconnectedResult { components: usize },
    #[error("nontrivial intersection found for a free-factor pair: {0}")]
    InvariantViolated(String),
}

/// A list of pairwise distinct infinite subgroups, one per conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeripheralStructure {
    subgroups: Vec<Subgroup>,
}

impl PeripheralStructure {
    /// Rejects repeated subgroups. For free factors distinctness of the basis
    /// subsets is exactly non-conjugacy.
    pub fn new(subgroups: Vec<Subgroup>) -> Result<Self, ConedError> {
        for i in 0..subgroups.len() {
            for j in 0..i {
                let same = match (subgroups[i].basis_subset(), subgroups[j].basis_subset()) {
                    (Some(a), Some(b)) => a == b,
                    _ => subgroups[i] == subgroups[j],
                };
                if same {
                    return Err(ConedError::DuplicatePeripheral(j, i));
                }
            }
        }
        Ok(PeripheralStructure { subgroups })
    }

    pub fn empty() -> Self {
        PeripheralStructure::default()
    }

    /// Free factors given by basis index sets.
    pub fn free_factors(sets: &[Vec<usize>]) -> Result<Self, ConedError> {
        Self::new(
            sets.iter()
                .map(|s| Subgroup::free_factor(s))
                .collect::<Result<_, _>>()?,
        )
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    fn check_rank(&self, rank: usize) -> Result<(), ConedError> {
        for s in &self.subgroups {
            for g in s.generators() {
                if let Some(l) = g.letters().iter().find(|l| l.generator() >= rank) {
                    return Err(WordError::GeneratorOutOfRange {
                        index: l.generator(),
                        rank,
                    }
                    .into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntersectionBounds {
    /// Maximum length of the conjugators `g` in `P ∩ g⁻¹Qg`.
    pub conj_bound: usize,
    /// Maximum length, in subgroup generators, of sampled `Q` elements.
    pub word_bound: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairCheck {
    /// Two free factors: the intersection is the common basis subset; the
    /// nontrivial double-coset conjugators up to the bound were sampled.
    FreeFactors {
        common: Vec<usize>,
        conjugators_checked: usize,
    },
    /// A free factor against another subgroup, settled by a retraction that
    /// kills the free factor.
    Retraction(IntersectionReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub p_index: usize,
    pub q_index: usize,
    pub check: PairCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionOutcome {
    /// The infinite intersections, deduplicated.
    pub structure: PeripheralStructure,
    pub pairs: Vec<PairRecord>,
}

fn retraction_killing(rank: usize, killed: &[usize]) -> Endomorphism {
    let mut r = Endomorphism::identity(rank);
    for &i in killed {
        r.set(i, Word::identity());
    }
    r
}

/// The shortest element of a double coset `P w Q` of free factors neither
/// starts with a `P` letter nor ends with a `Q` letter.
fn is_double_coset_minimal(w: &Word, p: &[usize], q: &[usize]) -> bool {
    let first_ok = w.first().is_none_or(|l| !p.contains(&l.generator()));
    let last_ok = w.last().is_none_or(|l| !q.contains(&l.generator()));
    first_ok && last_ok
}

/// Computes `R = {P ∩ Q : P ∈ 𝒫, Q ∈ 𝒬, |P ∩ Q| = ∞}`.
///
/// Free-factor pairs intersect in the factor on their common basis letters;
/// conjugating by a nontrivial minimal double-coset representative leaves a
/// trivial intersection, which is spot-checked up to the bounds. A free
/// factor against a non-free-factor subgroup is settled with
/// [`verify_trivial_intersection`] under the retraction killing the factor;
/// any surviving witness makes the pair unsupported.
pub fn peripheral_intersections(
    basis: &Basis,
    p: &PeripheralStructure,
    q: &PeripheralStructure,
    bounds: IntersectionBounds,
) -> Result<IntersectionOutcome, ConedError> {
    let rank = basis.rank();
    p.check_rank(rank)?;
    q.check_rank(rank)?;
    let conjugators = reduced_words(rank, bounds.conj_bound);
    let mut found: Vec<Subgroup> = Vec::new();
    let mut pairs = Vec::new();
    for (i, ps) in p.subgroups().iter().enumerate() {
        for (j, qs) in q.subgroups().iter().enumerate() {
            let check = match (ps.basis_subset(), qs.basis_subset()) {
                (Some(a), Some(b)) => {
                    let common: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
                    let reps: Vec<&Word> = conjugators
                        .iter()
                        .filter(|g| !g.is_identity() && is_double_coset_minimal(g, &a, &b))
                        .collect();
                    let q_samples =
                        crate::words::subgroup_words(qs.generators(), bounds.word_bound);
                    for g in &reps {
                        for (_, x) in &q_samples {
                            let c = x.conjugate_by(g);
                            if !c.is_identity() && c.uses_only(&a) {
                                return Err(ConedError::InvariantViolated(format!(
                                    "conjugator {}",
                                    basis.format(g)
                                )));
                            }
                        }
                    }
                    if !common.is_empty() {
                        let s = Subgroup::free_factor(&common)?;
                        if !found.iter().any(|f| f.basis_subset() == s.basis_subset()) {
                            found.push(s);
                        }
                    }
                    PairCheck::FreeFactors {
                        common,
                        conjugators_checked: reps.len(),
                    }
                }
                (Some(a), None) | (None, Some(a)) => {
                    let (killed, other) = if ps.basis_subset().is_some() {
                        (ps, qs)
                    } else {
                        (qs, ps)
                    };
                    let report = verify_trivial_intersection(
                        killed.generators(),
                        other.generators(),
                        &retraction_killing(rank, &a),
                        &conjugators,
                        bounds.word_bound,
                    )?;
                    if report.verdict != IntersectionVerdict::Consistent {
                        return Err(ConedError::UnsupportedSubgroup(format!(
                            "pair ({i}, {j}) has {} retraction witnesses",
                            report.witness_count
                        )));
                    }
                    PairCheck::Retraction(report)
                }
                (None, None) => {
                    return Err(ConedError::UnsupportedSubgroup(format!(
                        "pair ({i}, {j}): neither subgroup is a free factor"
                    )))
                }
            };
            pairs.push(PairRecord {
                p_index: i,
                q_index: j,
                check,
            });
        }
    }
    Ok(IntersectionOutcome {
        structure: PeripheralStructure::new(found)?,
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeProvenance {
    Cone,
    Hyperbolic,
    Parabolic,
    NonHorospherical,
}

impl EdgeProvenance {
    pub const ALL: [EdgeProvenance; 4] = [
        EdgeProvenance::Cone,
        EdgeProvenance::Hyperbolic,
        EdgeProvenance::Parabolic,
        EdgeProvenance::NonHorospherical,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            EdgeProvenance::Cone => "cone",
            EdgeProvenance::Hyperbolic => "hyperbolic",
            EdgeProvenance::Parabolic => "parabolic",
            EdgeProvenance::NonHorospherical => "non-horospherical",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.tag() == tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeripheralMode {
    Hyperbolic,
    Parabolic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InnerEdges {
    /// `{g, g·s}` for each generator `s` of the subgroup.
    Cayley,
    /// `{g, g·w}` for each listed word, which must lie in the subgroup.
    Words(Vec<Word>),
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeripheralBlock {
    pub mode: PeripheralMode,
    pub inner: InnerEdges,
}

impl PeripheralBlock {
    pub fn hyperbolic() -> Self {
        PeripheralBlock {
            mode: PeripheralMode::Hyperbolic,
            inner: InnerEdges::Cayley,
        }
    }

    pub fn parabolic(inner: InnerEdges) -> Self {
        PeripheralBlock {
            mode: PeripheralMode::Parabolic,
            inner,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeInfo {
    pub vertex: VertexId,
    pub peripheral: usize,
    pub representative: Word,
    /// Coset elements inside the ball.
    pub degree: usize,
}

/// A coned-off graph together with the provenance of every edge.
#[derive(Debug, Clone)]
pub struct ConedGraphBundle {
    pub graph: LabeledGraph,
    provenance: Vec<EdgeProvenance>,
    cones: Vec<ConeInfo>,
    /// Ball vertices keep their ids; cone vertices follow.
    ball_vertices: usize,
    structure: PeripheralStructure,
    pub diagnostics: Vec<String>,
}

/// Shortest element of the coset `w·R` for the free factor on `subset`:
/// strip trailing letters of the factor.
pub fn coset_representative(w: &Word, subset: &[usize]) -> Word {
    let letters = w.letters();
    let keep = letters
        .iter()
        .rposition(|l| !subset.contains(&l.generator()))
        .map_or(0, |p| p + 1);
    Word::reduced_from(letters[..keep].iter().copied())
}

fn ball_words(ball: &LabeledGraph) -> Result<Vec<Word>, ConedError> {
    ball.labels()
        .iter()
        .enumerate()
        .map(|(v, l)| l.as_element().cloned().ok_or(ConedError::NotACayleyBall(v)))
        .collect()
}

fn free_factor_sets(structure: &PeripheralStructure) -> Result<Vec<Vec<usize>>, ConedError> {
    structure
        .subgroups()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.basis_subset().ok_or_else(|| {
                ConedError::UnsupportedSubgroup(format!("peripheral {i} is not a free factor"))
            })
        })
        .collect()
}

struct Assembly {
    builder: GraphBuilder,
    tags: BTreeMap<(VertexId, VertexId), EdgeProvenance>,
    cones: Vec<ConeInfo>,
}

impl Assembly {
    fn new(ball: &LabeledGraph, words: &[Word]) -> Self {
        let mut builder = GraphBuilder::new(ball.basis().clone());
        for w in words {
            builder.add_vertex(VertexLabel::Element(w.clone()));
        }
        Assembly {
            builder,
            tags: BTreeMap::new(),
            cones: Vec::new(),
        }
    }

    /// Keeps the earliest layer when an edge arises more than once.
    fn tag(&mut self, u: VertexId, v: VertexId, p: EdgeProvenance) {
        let key = (u.min(v), u.max(v));
        let slot = self.tags.entry(key).or_insert(p);
        *slot = (*slot).min(p);
    }

    fn add_cones(&mut self, words: &[Word], index: usize, subset: &[usize]) {
        let mut cosets: BTreeMap<Word, Vec<VertexId>> = BTreeMap::new();
        for (v, w) in words.iter().enumerate() {
            cosets
                .entry(coset_representative(w, subset))
                .or_default()
                .push(v);
        }
        for (rep, members) in cosets {
            let c = self.builder.add_vertex(VertexLabel::Cone {
                representative: rep.clone(),
                peripheral: index,
            });
            for &m in &members {
                self.tag(c, m, EdgeProvenance::Cone);
            }
            self.cones.push(ConeInfo {
                vertex: c,
                peripheral: index,
                representative: rep,
                degree: members.len(),
            });
        }
    }

    fn finish(
        mut self,
        ball_vertices: usize,
        structure: PeripheralStructure,
        diagnostics: Vec<String>,
    ) -> Result<ConedGraphBundle, ConedError> {
        for &(u, v) in self.tags.keys() {
            self.builder.add_edge(u, v)?;
        }
        let graph = self.builder.build();
        let provenance = graph.edges().iter().map(|e| self.tags[e]).collect();
        let bundle = ConedGraphBundle {
            graph,
            provenance,
            cones: self.cones,
            ball_vertices,
            structure,
            diagnostics,
        };
        let components = bundle.component_count();
        if components > 1 {
            return Err(ConedError::DisconnectedResult { components });
        }
        Ok(bundle)
    }
}

/// Cones the ball over each subgroup of `r_sharp` and adds the inner edges of
/// each block; `blocks[i]` configures `r_sharp.subgroups()[i]`.
///
/// Cone vertices carry the shortlex-least coset representative and are
/// numbered after the ball vertices, grouped by subgroup and ordered by
/// representative. Fails with [`ConedError::DisconnectedResult`] if the
/// result is not connected.
pub fn build_coned_graph(
    ball: &LabeledGraph,
    r_sharp: &PeripheralStructure,
    blocks: &[PeripheralBlock],
) -> Result<ConedGraphBundle, ConedError> {
    if blocks.len() != r_sharp.len() {
        return Err(ConedError::BlockMismatch {
            expected: r_sharp.len(),
            found: blocks.len(),
        });
    }
    r_sharp.check_rank(ball.basis().rank())?;
    let words = ball_words(ball)?;
    let sets = free_factor_sets(r_sharp)?;
    let mut asm = Assembly::new(ball, &words);
    let mut diagnostics = Vec::new();

    for (i, subset) in sets.iter().enumerate() {
        asm.add_cones(&words, i, subset);
    }
    for (i, (subset, block)) in sets.iter().zip(blocks).enumerate() {
        let tag = match block.mode {
            PeripheralMode::Hyperbolic => EdgeProvenance::Hyperbolic,
            PeripheralMode::Parabolic => EdgeProvenance::Parabolic,
        };
        let steps: Vec<Word> = match &block.inner {
            InnerEdges::Cayley => subset
                .iter()
                .map(|&s| Word::letter(Letter::new(s, false)))
                .collect(),
            InnerEdges::Words(ws) => {
                if ws.iter().any(|w| w.is_identity() || !w.uses_only(subset)) {
                    return Err(ConedError::InnerEdgeOutsideSubgroup(i));
                }
                ws.clone()
            }
            InnerEdges::None => Vec::new(),
        };
        let mut inner_edges = Vec::new();
        for (v, w) in words.iter().enumerate() {
            for s in &steps {
                if let Some(u) = ball.find_element(&w.product(s)) {
                    inner_edges.push((v, u));
                }
            }
        }
        for &(u, v) in &inner_edges {
            asm.tag(u, v, tag);
        }
        if block.mode == PeripheralMode::Hyperbolic {
            if let Some(note) = identity_coset_gap(ball, &words, subset, &inner_edges) {
                diagnostics.push(format!("peripheral {i} (hyperbolic mode): {note}"));
            }
        }
    }
    for &(u, v) in ball.edges() {
        asm.tag(u, v, EdgeProvenance::NonHorospherical);
    }
    asm.finish(ball.vertex_count(), r_sharp.clone(), diagnostics)
}

/// Hyperbolic mode asks for inner edges that connect the subgroup; checked on
/// the part of the subgroup inside the ball.
fn identity_coset_gap(
    ball: &LabeledGraph,
    words: &[Word],
    subset: &[usize],
    inner: &[(VertexId, VertexId)],
) -> Option<String> {
    let members: Vec<VertexId> = (0..words.len())
        .filter(|&v| words[v].uses_only(subset))
        .collect();
    let mut parent: Vec<VertexId> = (0..ball.vertex_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(u, v) in inner {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a.max(b)] = a.min(b);
    }
    let roots: std::collections::BTreeSet<usize> =
        members.iter().map(|&m| find(&mut parent, m)).collect();
    (roots.len() > 1).then(|| {
        format!(
            "inner edges leave the subgroup in {} pieces inside the ball",
            roots.len()
        )
    })
}

/// The ball with the Cayley edges of every subgroup removed and a cone over
/// each coset added. For a free product `A * P` coned over `P` the result is
/// a tree.
pub fn coned_tree(
    ball: &LabeledGraph,
    structure: &PeripheralStructure,
) -> Result<ConedGraphBundle, ConedError> {
    structure.check_rank(ball.basis().rank())?;
    let words = ball_words(ball)?;
    let sets = free_factor_sets(structure)?;
    let coned: Vec<usize> = sets.iter().flatten().copied().collect();
    let mut asm = Assembly::new(ball, &words);
    for (i, subset) in sets.iter().enumerate() {
        asm.add_cones(&words, i, subset);
    }
    for &(u, v) in ball.edges() {
        // in a Cayley ball the longer endpoint ends in the edge letter
        let longer = if words[u].len() > words[v].len() {
            u
        } else {
            v
        };
        let letter = words[longer].last().expect("nonidentity endpoint");
        if !coned.contains(&letter.generator()) {
            asm.tag(u, v, EdgeProvenance::NonHorospherical);
        }
    }
    asm.finish(ball.vertex_count(), structure.clone(), Vec::new())
}

/// Edges that fail to carry over under left translation by a basis letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceViolation {
    pub edge: EdgeId,
    pub letter: Letter,
    pub reason: &'static str,
}

impl ConedGraphBundle {
    pub fn provenance(&self, e: EdgeId) -> EdgeProvenance {
        self.provenance[e]
    }

    pub fn provenances(&self) -> &[EdgeProvenance] {
        &self.provenance
    }

    pub fn cones(&self) -> &[ConeInfo] {
        &self.cones
    }

    pub fn structure(&self) -> &PeripheralStructure {
        &self.structure
    }

    pub fn ball_vertex_count(&self) -> usize {
        self.ball_vertices
    }

    pub fn count(&self, p: EdgeProvenance) -> usize {
        self.provenance.iter().filter(|&&q| q == p).count()
    }

    pub fn cone_vertex(&self, peripheral: usize, representative: &Word) -> Option<VertexId> {
        self.graph.find(&VertexLabel::Cone {
            representative: representative.clone(),
            peripheral,
        })
    }

    fn component_count(&self) -> usize {
        let g = &self.graph;
        let mut seen = vec![false; g.vertex_count()];
        let mut count = 0;
        for s in 0..g.vertex_count() {
            if seen[s] {
                continue;
            }
            count += 1;
            let d = g.bfs(s);
            for (v, &x) in d.iter().enumerate() {
                if x != crate::graph::UNREACHED {
                    seen[v] = true;
                }
            }
        }
        count
    }

    /// Re-checks the edge partition against `ball`: one tag per edge, cone
    /// edges join a cone vertex to a member of its coset, and removing the
    /// cone and inner layers leaves only edges of `ball`. Returns a
    /// description of the first problem found.
    pub fn partition_problem(&self, ball: &LabeledGraph) -> Option<String> {
        if self.provenance.len() != self.graph.edge_count() {
            return Some("provenance list does not match the edge list".into());
        }
        for (e, &(u, v)) in self.graph.edges().iter().enumerate() {
            let p = self.provenance[e];
            let (lu, lv) = (self.graph.label(u), self.graph.label(v));
            match p {
                EdgeProvenance::Cone => {
                    let (cone, elem) = match (lu, lv) {
                        (VertexLabel::Cone { .. }, VertexLabel::Element(w)) => (lu, w),
                        (VertexLabel::Element(w), VertexLabel::Cone { .. }) => (lv, w),
                        _ => {
                            return Some(format!(
                                "cone edge {e} does not join a cone to an element"
                            ))
                        }
                    };
                    let VertexLabel::Cone {
                        representative,
                        peripheral,
                    } = cone
                    else {
                        unreachable!()
                    };
                    let subset = self.structure.subgroups()[*peripheral]
                        .basis_subset()
                        .expect("validated at construction");
                    if coset_representative(elem, &subset) != *representative {
                        return Some(format!("cone edge {e} leaves its coset"));
                    }
                }
                EdgeProvenance::NonHorospherical => {
                    if u >= self.ball_vertices || v >= self.ball_vertices || !ball.has_edge(u, v) {
                        return Some(format!(
                            "edge {e} is tagged non-horospherical but is not a ball edge"
                        ));
                    }
                }
                EdgeProvenance::Hyperbolic | EdgeProvenance::Parabolic => {
                    if lu.is_cone() || lv.is_cone() {
                        return Some(format!("inner edge {e} touches a cone vertex"));
                    }
                }
            }
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        self.graph.is_connected()
    }

    /// Left translation of a vertex by a letter, if the image is in the graph.
    pub fn translate(&self, v: VertexId, s: Letter) -> Option<VertexId> {
        let shift = Word::letter(s);
        match self.graph.label(v) {
            VertexLabel::Element(w) => self.graph.find_element(&shift.product(w)),
            VertexLabel::Cone {
                representative,
                peripheral,
            } => {
                let subset = self.structure.subgroups()[*peripheral].basis_subset()?;
                let rep = coset_representative(&shift.product(representative), &subset);
                self.cone_vertex(*peripheral, &rep)
            }
            _ => None,
        }
    }

    /// For every basis letter `s` (and inverse) and every edge whose translate
    /// has both endpoints in the graph, the translate must be an edge with the
    /// same provenance. Cone translates are only checked when the coset
    /// element on the edge stays in the ball.
    pub fn equivariance_violations(&self) -> Vec<EquivarianceViolation> {
        let rank = self.graph.basis().rank();
        let mut out = Vec::new();
        for g in 0..rank {
            for s in [Letter::new(g, false), Letter::new(g, true)] {
                for (e, &(u, v)) in self.graph.edges().iter().enumerate() {
                    let (Some(su), Some(sv)) = (self.translate(u, s), self.translate(v, s)) else {
                        continue;
                    };
                    match self.graph.edge_id(su, sv) {
                        None => out.push(EquivarianceViolation {
                            edge: e,
                            letter: s,
                            reason: "translate is not an edge",
                        }),
                        Some(f) if self.provenance[f] != self.provenance[e] => {
                            out.push(EquivarianceViolation {
                                edge: e,
                                letter: s,
                                reason: "translate has a different provenance",
                            })
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        out
    }
}
