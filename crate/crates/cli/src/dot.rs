//! Graphviz export. One graph node per tree node, labeled by its sequence,
//! with edges from each node to its children.

use std::fmt::Write;
use treeloc_core::{FiniteTree, Seq};

fn node_id(s: &Seq) -> String {
    let mut id = String::from("n");
    for letter in s.letters() {
        let _ = write!(id, "_{letter}");
    }
    id
}

fn node_label(s: &Seq) -> String {
    let inner: Vec<String> = s.letters().iter().map(|l| l.to_string()).collect();
    format!("<{}>", inner.join(","))
}

pub fn tree_to_dot(name: &str, tree: &FiniteTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    for node in tree.nodes() {
        let _ = writeln!(out, "  {} [label=\"{}\"];", node_id(node), node_label(node));
    }
    for node in tree.nodes() {
        if let Some(parent) = node.parent() {
            let _ = writeln!(out, "  {} -> {};", node_id(&parent), node_id(node));
        }
    }
    out.push_str("}\n");
    out
}

pub fn trees_to_dot(names: &[(String, &FiniteTree)]) -> String {
    let mut out = String::new();
    for (name, tree) in names {
        out.push_str(&tree_to_dot(name, tree));
    }
    out
}
