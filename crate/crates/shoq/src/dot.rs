//! Graphviz export of a tableau graph.
//!
//! States are boxes and non-states ellipses; complex nodes get a double
//! border. Fill colour follows the status. Edges carry their label triple.

use std::fmt::Write;

use shoq_core::graph::{Graph, Node, NodeType, SType, Status};

fn fill(status: &Status) -> &'static str {
    match status {
        Status::Closed => "lightcoral",
        Status::Open => "palegreen",
        Status::ClosedWrt(_) => "lightsalmon",
        Status::Blocked => "lightblue",
        Status::FExpanded | Status::PExpanded => "lightyellow",
        Status::Unexpanded => "white",
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn node_text(n: &Node) -> String {
    let mut s = format!("v{} [{}]\\n", n.id, n.status);
    let fmls: Vec<String> = n.label.iter().map(|f| escape(&f.to_string())).collect();
    s.push_str(&fmls.join(", "));
    if !n.rfmls.is_empty() {
        let r: Vec<String> = n.rfmls.iter().map(|f| escape(&f.to_string())).collect();
        let _ = write!(s, "\\nRFmls: {}", r.join(", "));
    }
    s
}

pub fn to_dot(g: &Graph) -> String {
    let mut out = String::from("digraph tableau {\n  node [style=filled, fontsize=10];\n");
    for n in g.nodes() {
        let shape = match n.ty {
            NodeType::State => "box",
            NodeType::NonState => "ellipse",
        };
        let peripheries = if n.stype == SType::Complex { 2 } else { 1 };
        let _ = writeln!(
            out,
            "  v{} [shape={shape}, peripheries={peripheries}, fillcolor={}, label=\"{}\"];",
            n.id,
            fill(&n.status),
            node_text(n)
        );
    }
    for n in g.nodes() {
        for &w in n.successors() {
            let labels: Vec<String> = g.elabels(n.id, w).map(|e| escape(&e.to_string())).collect();
            if labels.is_empty() {
                let _ = writeln!(out, "  v{} -> v{w};", n.id);
            } else {
                let _ = writeln!(out, "  v{} -> v{w} [label=\"{}\"];", n.id, labels.join("\\n"));
            }
        }
    }
    out.push_str("}\n");
    out
}
