//! JSON graph files.
//!
//! ```json
//! {
//!   "basis": [["a", "b"]],
//!   "vertices": [{"id": 0, "kind": "element", "label": "1"}, ...],
//!   "edges": [[0, 1], ...],
//!   "provenance": ["cone", ...]
//! }
//! ```
//!
//! Cone vertices also carry `"peripheral"`; `"provenance"` is present only for
//! coned graphs and lists one tag per edge, in edge order.

use floydkit_core::{Basis, EdgeProvenance, LabeledGraph, VertexLabel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: usize,
    pub kind: String,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub peripheral: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub basis: Vec<Vec<String>>,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Vec<String>>,
}

fn word_text(basis: &Basis, w: &floydkit_core::Word) -> String {
    if w.is_identity() {
        "1".into()
    } else {
        basis.format(w)
    }
}

impl GraphFile {
    pub fn from_graph(g: &LabeledGraph, provenance: Option<&[EdgeProvenance]>) -> Self {
        let basis = g.basis();
        let vertices = g
            .labels()
            .iter()
            .enumerate()
            .map(|(id, l)| {
                let (label, peripheral) = match l {
                    VertexLabel::Element(w) => (word_text(basis, w), None),
                    VertexLabel::Cone {
                        representative,
                        peripheral,
                    } => (word_text(basis, representative), Some(*peripheral)),
                    VertexLabel::Parabolic(i) => (i.to_string(), None),
                    VertexLabel::Named(s) => (s.clone(), None),
                };
                VertexRecord {
                    id,
                    kind: l.kind().to_string(),
                    label,
                    peripheral,
                }
            })
            .collect();
        GraphFile {
            basis: basis.factors().to_vec(),
            vertices,
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            provenance: provenance.map(|p| p.iter().map(|t| t.tag().to_string()).collect()),
        }
    }

    pub fn to_graph(&self) -> Result<(LabeledGraph, Option<Vec<EdgeProvenance>>), CliError> {
        let domain = |m: String| CliError::Domain(format!("graph file: {m}"));
        let basis = Basis::free_product(&self.basis).map_err(|e| domain(e.to_string()))?;
        let mut labels = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return Err(domain(format!(
                    "vertex ids must be 0..n in order (found {} at {i})",
                    v.id
                )));
            }
            let label =
                match v.kind.as_str() {
                    "element" => VertexLabel::Element(
                        basis.parse(&v.label).map_err(|e| domain(e.to_string()))?,
                    ),
                    "cone" => VertexLabel::Cone {
                        representative: basis.parse(&v.label).map_err(|e| domain(e.to_string()))?,
                        peripheral: v.peripheral.ok_or_else(|| {
                            domain(format!("cone vertex {i} has no peripheral index"))
                        })?,
                    },
                    "parabolic" => VertexLabel::Parabolic(v.label.parse().map_err(|_| {
                        domain(format!("parabolic vertex {i} needs a numeric label"))
                    })?),
                    "named" => VertexLabel::Named(v.label.clone()),
                    other => return Err(domain(format!("unknown vertex kind `{other}`"))),
                };
            labels.push(label);
        }
        let n = labels.len();
        if let Some(&[u, v]) = self.edges.iter().find(|e| e[0] >= n || e[1] >= n) {
            return Err(domain(format!(
                "edge ({u}, {v}) references a missing vertex"
            )));
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = LabeledGraph::from_parts(basis, labels, &edges)?;
        let provenance = match &self.provenance {
            None => None,
            Some(tags) => {
                if tags.len() != self.edges.len() {
                    return Err(domain("provenance needs one tag per edge".into()));
                }
                // tags follow the file's edge order; map them onto the graph's
                let mut out = vec![EdgeProvenance::NonHorospherical; g.edge_count()];
                for (e, tag) in self.edges.iter().zip(tags) {
                    let p = EdgeProvenance::from_tag(tag)
                        .ok_or_else(|| domain(format!("unknown provenance `{tag}`")))?;
                    let id = g.edge_id(e[0], e[1]).expect("edge was added");
                    out[id] = p;
                }
                Some(out)
            }
        };
        Ok((g, provenance))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph files always serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Domain(format!("graph file: {e}")))
    }
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}
