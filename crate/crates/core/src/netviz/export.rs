//! DOT, GraphML and JSON renderings of a [`Network`].

use super::{modularity, Edge, Network};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt::Write;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dot,
    GraphMl,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("unknown graph format {0:?} (expected dot, graphml or json)")]
    UnknownFormat(String),
    #[error("graph json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph json: {0}")]
    Invalid(String),
}

impl FromStr for Format {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(Format::Dot),
            "graphml" => Ok(Format::GraphMl),
            "json" => Ok(Format::Json),
            _ => Err(ExportError::UnknownFormat(s.into())),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    id: String,
    community: u32,
    label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    a: String,
    b: String,
    w: u32,
}

fn node_label(net: &Network, i: usize) -> String {
    net.labels
        .get(net.communities[i] as usize)
        .map(|l| l.join(" "))
        .unwrap_or_default()
}

pub fn export(net: &Network, format: Format) -> String {
    match format {
        Format::Dot => dot(net),
        Format::GraphMl => graphml(net),
        Format::Json => json(net),
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn dot(net: &Network) -> String {
    let mut out = String::from("graph network {\n");
    for (i, id) in net.nodes.iter().enumerate() {
        writeln!(
            out,
            "  {} [community={}, label={}];",
            dot_quote(id),
            net.communities[i],
            dot_quote(&node_label(net, i))
        )
        .unwrap();
    }
    for e in &net.edges {
        writeln!(
            out,
            "  {} -- {} [weight={}];",
            dot_quote(&net.nodes[e.a as usize]),
            dot_quote(&net.nodes[e.b as usize]),
            e.w
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn graphml(net: &Network) -> String {
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
        "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n",
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n",
        "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n",
        "  <graph id=\"network\" edgedefault=\"undirected\">\n",
    ));
    for (i, id) in net.nodes.iter().enumerate() {
        writeln!(
            out,
            "    <node id=\"{}\"><data key=\"community\">{}</data><data key=\"label\">{}</data></node>",
            xml_escape(id),
            net.communities[i],
            xml_escape(&node_label(net, i))
        )
        .unwrap();
    }
    for e in &net.edges {
        writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
            xml_escape(&net.nodes[e.a as usize]),
            xml_escape(&net.nodes[e.b as usize]),
            e.w
        )
        .unwrap();
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn json(net: &Network) -> String {
    let doc = JsonGraph {
        nodes: net
            .nodes
            .iter()
            .enumerate()
            .map(|(i, id)| JsonNode {
                id: id.clone(),
                community: net.communities[i],
                label: node_label(net, i),
            })
            .collect(),
        edges: net
            .edges
            .iter()
            .map(|e| JsonEdge {
                a: net.nodes[e.a as usize].clone(),
                b: net.nodes[e.b as usize].clone(),
                w: e.w,
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("graph serializes")
}

/// Reads the JSON rendering back. Modularity is recomputed from the
/// partition.
pub fn from_json(text: &str) -> Result<Network, ExportError> {
    let doc: JsonGraph = serde_json::from_str(text)?;
    let invalid = |m: String| Err(ExportError::Invalid(m));
    let mut index = HashMap::new();
    for (i, n) in doc.nodes.iter().enumerate() {
        if index.insert(n.id.as_str(), i as u32).is_some() {
            return invalid(format!("duplicate node {:?}", n.id));
        }
    }
    let k = doc.nodes.iter().map(|n| n.community as usize + 1).max().unwrap_or(0);
    let mut labels: Vec<Option<&str>> = vec![None; k];
    for n in &doc.nodes {
        match labels[n.community as usize] {
            None => labels[n.community as usize] = Some(&n.label),
            Some(l) if l != n.label => return invalid(format!("community {} has conflicting labels", n.community)),
            Some(_) => {}
        }
    }
    if labels.iter().any(Option::is_none) {
        return invalid("community ids are not dense".into());
    }
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        let (Some(&a), Some(&b)) = (index.get(e.a.as_str()), index.get(e.b.as_str())) else {
            return invalid(format!("edge {:?}-{:?} references an unknown node", e.a, e.b));
        };
        if a == b || e.w == 0 {
            return invalid(format!("bad edge {:?}-{:?}", e.a, e.b));
        }
        let (a, b) = (a.min(b), a.max(b));
        if !seen.insert((a, b)) {
            return invalid(format!("duplicate edge {:?}-{:?}", e.a, e.b));
        }
        edges.push(Edge { a, b, w: e.w });
    }
    edges.sort_by_key(|e| (e.a, e.b));
    let mut net = Network {
        nodes: doc.nodes.iter().map(|n| n.id.clone()).collect(),
        edges,
        communities: doc.nodes.iter().map(|n| n.community).collect(),
        modularity: 0.0,
        labels: labels
            .into_iter()
            .map(|l| l.unwrap().split_whitespace().map(String::from).collect())
            .collect(),
    };
    net.modularity = modularity(&net.weighted_graph(), &net.communities, 1.0);
    Ok(net)
}
