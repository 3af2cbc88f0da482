//! Graphviz export for typed nets, classical nets and labelled transition systems.

use std::fmt::Write;

use crate::jackson::ClassicalNet;
use crate::lts::Lts;
use crate::model::Net;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Places are circles labelled with their type, transitions are boxes, arcs carry inscriptions.
pub fn net_to_dot(net: &Net) -> String {
    let mut out = String::from("digraph net {\n  rankdir=LR;\n");
    for (p, ty) in &net.places {
        let label = format!("{p}\n{ty}");
        writeln!(out, "  {} [shape=circle, label={}];", quote(p), quote(&label)).expect("write to string");
    }
    for t in &net.transitions {
        writeln!(out, "  {} [shape=box];", quote(t)).expect("write to string");
    }
    for ((a, b), ins) in &net.arcs {
        let label: Vec<String> = ins.vectors().iter().map(|v| format!("⟨{}⟩", v.join(","))).collect();
        writeln!(out, "  {} -> {} [label={}];", quote(a), quote(b), quote(&label.join(" + "))).expect("write to string");
    }
    out.push_str("}\n");
    out
}

pub fn classical_to_dot(net: &ClassicalNet) -> String {
    let mut out = String::from("digraph net {\n  rankdir=LR;\n");
    for p in &net.places {
        writeln!(out, "  {} [shape=circle];", quote(p)).expect("write to string");
    }
    for t in &net.transitions {
        writeln!(out, "  {} [shape=box];", quote(t)).expect("write to string");
    }
    for (a, b) in &net.arcs {
        writeln!(out, "  {} -> {};", quote(a), quote(b)).expect("write to string");
    }
    out.push_str("}\n");
    out
}

/// States are labelled with their names; the initial state is drawn doubled.
pub fn lts_to_dot(lts: &Lts) -> String {
    let mut out = String::from("digraph lts {\n");
    for (i, name) in lts.names.iter().enumerate() {
        let shape = if i == lts.initial { "doublecircle" } else { "circle" };
        writeln!(out, "  s{i} [shape={shape}, label={}];", quote(name)).expect("write to string");
    }
    for e in &lts.edges {
        writeln!(out, "  s{} -> s{} [label={}];", e.src, e.tgt, quote(&e.label.to_string())).expect("write to string");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn net_export_lists_every_node_and_arc() {
        let n = fixtures::fig4();
        let dot = net_to_dot(&n);
        assert!(dot.starts_with("digraph net {"));
        assert_eq!(dot.matches("shape=circle").count(), n.places.len());
        assert_eq!(dot.matches("shape=box").count(), n.transitions.len());
        assert_eq!(dot.matches(" -> ").count(), n.arcs.len());
        assert!(dot.contains("⟨x,y⟩"));
    }

    #[test]
    fn lts_export_marks_the_initial_state() {
        let l = Lts::from_triples(2, 0, &[(0, "a", 1), (1, "tau", 0)]);
        let dot = lts_to_dot(&l);
        assert!(dot.contains("s0 [shape=doublecircle"));
        assert!(dot.contains("label=\"τ\""));
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
