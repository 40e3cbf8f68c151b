//! Graphviz output. Cone vertices are filled boxes; cone edges are dashed and
//! inner edges are coloured by mode.

use std::fmt::Write;

use floydkit_core::{EdgeProvenance, LabeledGraph, VertexLabel};

#[derive(Debug, Clone)]
pub struct DotStyle {
    pub name: String,
    /// Print vertex labels instead of ids.
    pub labels: bool,
}

impl Default for DotStyle {
    fn default() -> Self {
        DotStyle {
            name: "G".into(),
            labels: true,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn edge_attrs(p: EdgeProvenance) -> &'static str {
    match p {
        EdgeProvenance::Cone => " [style=dashed]",
        EdgeProvenance::Hyperbolic => " [color=blue]",
        EdgeProvenance::Parabolic => " [color=darkgreen]",
        EdgeProvenance::NonHorospherical => "",
    }
}

pub fn export_dot(
    g: &LabeledGraph,
    provenance: Option<&[EdgeProvenance]>,
    style: &DotStyle,
) -> String {
    let mut out = String::new();
    writeln!(out, "graph \"{}\" {{", escape(&style.name)).unwrap();
    for v in 0..g.vertex_count() {
        let text = if style.labels {
            g.display_label(v)
        } else {
            v.to_string()
        };
        let shape = match g.label(v) {
            VertexLabel::Cone { .. } => ", shape=box, style=filled, fillcolor=lightgray",
            VertexLabel::Parabolic(_) => ", shape=diamond",
            _ => "",
        };
        writeln!(out, "  {v} [label=\"{}\"{shape}];", escape(&text)).unwrap();
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let attrs = provenance.map_or("", |p| edge_attrs(p[e]));
        writeln!(out, "  {u} -- {v}{attrs};").unwrap();
    }
    out.push_str("}\n");
    out
}
