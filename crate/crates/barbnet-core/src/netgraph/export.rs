//! Serializing bipartite graphs for external viewers.
//!
//! All three formats emit nodes and edges in sorted order so the same graph
//! always produces identical bytes. Node ids carry a kind prefix ("s:" for
//! subreddits, "a:" for authors) so they stay unique in one namespace.

use super::bipartite::BipartiteGraph;
use super::NetgraphError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    GraphMl,
    NodeLinkJson,
}

impl FromStr for GraphFormat {
    type Err = NetgraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(Self::Dot),
            "graphml" => Ok(Self::GraphMl),
            "json" => Ok(Self::NodeLinkJson),
            other => Err(NetgraphError::UnknownFormat(other.to_string())),
        }
    }
}

/// Renders `graph` in the requested format. The graph is validated first so
/// a corrupt structure cannot produce a plausible-looking file.
pub fn export_graph(graph: &BipartiteGraph, format: GraphFormat) -> Result<Vec<u8>, NetgraphError> {
    graph.validate()?;
    let out = match format {
        GraphFormat::Dot => render_dot(graph),
        GraphFormat::GraphMl => render_graphml(graph),
        GraphFormat::NodeLinkJson => render_node_link(graph),
    };
    Ok(out.into_bytes())
}

fn subreddit_id(name: &str) -> String {
    format!("s:{name}")
}

fn author_id(name: &str) -> String {
    format!("a:{name}")
}

fn dot_quote(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

fn render_dot(graph: &BipartiteGraph) -> String {
    let mut out = String::from("graph barbnet {\n");
    let mut nodes: Vec<(String, &'static str, &'static str, u64)> = graph
        .authors()
        .iter()
        .map(|(name, w)| (author_id(name), "author", "pink", *w))
        .chain(
            graph
                .subreddits()
                .iter()
                .map(|(name, w)| (subreddit_id(name), "subreddit", "green", *w)),
        )
        .collect();
    nodes.sort();
    for (id, kind, color, weight) in nodes {
        let _ = writeln!(
            out,
            "  {} [kind={kind}, weight={weight}, color=\"{color}\"];",
            dot_quote(&id)
        );
    }
    for ((author, subreddit), weight) in graph.edges() {
        let _ = writeln!(
            out,
            "  {} -- {} [weight={weight}];",
            dot_quote(&author_id(author)),
            dot_quote(&subreddit_id(subreddit))
        );
    }
    out.push_str("}\n");
    out
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn render_graphml(graph: &BipartiteGraph) -> String {
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
        "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n",
        "  <key id=\"weight\" for=\"node\" attr.name=\"weight\" attr.type=\"long\"/>\n",
        "  <key id=\"color\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n",
        "  <key id=\"eweight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n",
        "  <graph id=\"barbnet\" edgedefault=\"undirected\">\n",
    ));
    let mut nodes: Vec<(String, &'static str, &'static str, u64)> = graph
        .authors()
        .iter()
        .map(|(name, w)| (author_id(name), "author", "pink", *w))
        .chain(
            graph
                .subreddits()
                .iter()
                .map(|(name, w)| (subreddit_id(name), "subreddit", "green", *w)),
        )
        .collect();
    nodes.sort();
    for (id, kind, color, weight) in nodes {
        let _ = writeln!(out, "    <node id=\"{}\">", xml_escape(&id));
        let _ = writeln!(out, "      <data key=\"kind\">{kind}</data>");
        let _ = writeln!(out, "      <data key=\"weight\">{weight}</data>");
        let _ = writeln!(out, "      <data key=\"color\">{color}</data>");
        out.push_str("    </node>\n");
    }
    for ((author, subreddit), weight) in graph.edges() {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\">",
            xml_escape(&author_id(author)),
            xml_escape(&subreddit_id(subreddit))
        );
        let _ = writeln!(out, "      <data key=\"eweight\">{weight}</data>");
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRepr {
    id: String,
    kind: String,
    weight: u64,
    color: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkRepr {
    source: String,
    target: String,
    weight: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeLinkRepr {
    directed: bool,
    nodes: Vec<NodeRepr>,
    links: Vec<LinkRepr>,
}

fn render_node_link(graph: &BipartiteGraph) -> String {
    let mut nodes: Vec<NodeRepr> = graph
        .authors()
        .iter()
        .map(|(name, w)| NodeRepr {
            id: author_id(name),
            kind: "author".to_string(),
            weight: *w,
            color: "pink".to_string(),
        })
        .chain(graph.subreddits().iter().map(|(name, w)| NodeRepr {
            id: subreddit_id(name),
            kind: "subreddit".to_string(),
            weight: *w,
            color: "green".to_string(),
        }))
        .collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let links: Vec<LinkRepr> = graph
        .edges()
        .iter()
        .map(|((author, subreddit), weight)| LinkRepr {
            source: author_id(author),
            target: subreddit_id(subreddit),
            weight: *weight,
        })
        .collect();
    let repr = NodeLinkRepr { directed: false, nodes, links };
    let mut out = serde_json::to_string_pretty(&repr).expect("graph serializes");
    out.push('\n');
    out
}

/// Rebuilds a graph from node-link JSON bytes produced by `export_graph`.
/// The result is re-validated, so tampered weights are rejected.
pub fn parse_node_link(bytes: &[u8]) -> Result<BipartiteGraph, NetgraphError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| NetgraphError::Unparseable(format!("not utf-8: {e}")))?;
    let repr: NodeLinkRepr =
        serde_json::from_str(text).map_err(|e| NetgraphError::Unparseable(e.to_string()))?;
    if repr.directed {
        return Err(NetgraphError::InvalidGraph("graph must be undirected".to_string()));
    }
    let mut subreddits: BTreeMap<String, u64> = BTreeMap::new();
    let mut authors: BTreeMap<String, u64> = BTreeMap::new();
    for node in repr.nodes {
        let (prefix, kind) = match node.kind.as_str() {
            "subreddit" => ("s:", &mut subreddits),
            "author" => ("a:", &mut authors),
            other => {
                return Err(NetgraphError::InvalidGraph(format!("unknown node kind '{other}'")))
            }
        };
        let name = node.id.strip_prefix(prefix).ok_or_else(|| {
            NetgraphError::InvalidGraph(format!(
                "node '{}' missing '{prefix}' prefix for kind {}",
                node.id, node.kind
            ))
        })?;
        if kind.insert(name.to_string(), node.weight).is_some() {
            return Err(NetgraphError::InvalidGraph(format!("duplicate node '{}'", node.id)));
        }
    }
    let mut edges: BTreeMap<(String, String), u64> = BTreeMap::new();
    for link in repr.links {
        // Accept either orientation; normalize to (author, subreddit).
        let (author, subreddit) =
            match (link.source.strip_prefix("a:"), link.target.strip_prefix("s:")) {
                (Some(a), Some(s)) => (a, s),
                _ => match (link.source.strip_prefix("s:"), link.target.strip_prefix("a:")) {
                    (Some(s), Some(a)) => (a, s),
                    _ => {
                        return Err(NetgraphError::InvalidGraph(format!(
                            "link {} -- {} does not join an author to a subreddit",
                            link.source, link.target
                        )))
                    }
                },
            };
        if edges.insert((author.to_string(), subreddit.to_string()), link.weight).is_some() {
            return Err(NetgraphError::InvalidGraph(format!(
                "duplicate link {} -- {}",
                link.source, link.target
            )));
        }
    }
    let graph = BipartiteGraph::from_parts(subreddits, authors, edges);
    graph.validate()?;
    Ok(graph)
}
