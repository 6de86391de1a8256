//! Bipartite author–subreddit graphs weighted by document counts.

use super::NetgraphError;
use crate::pipeline::{Quadrant, Verdict};
use std::collections::BTreeMap;

/// An undirected bipartite graph. Node weights count quadrant-matching
/// documents, so by construction each side's node weights and the edge
/// weights all sum to the same verdict count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipartiteGraph {
    subreddits: BTreeMap<String, u64>,
    authors: BTreeMap<String, u64>,
    /// (author, subreddit) -> document count.
    edges: BTreeMap<(String, String), u64>,
}

impl BipartiteGraph {
    pub(crate) fn insert_document(&mut self, author: &str, subreddit: &str) {
        *self.subreddits.entry(subreddit.to_string()).or_insert(0) += 1;
        *self.authors.entry(author.to_string()).or_insert(0) += 1;
        *self.edges.entry((author.to_string(), subreddit.to_string())).or_insert(0) += 1;
    }

    pub(crate) fn from_parts(
        subreddits: BTreeMap<String, u64>,
        authors: BTreeMap<String, u64>,
        edges: BTreeMap<(String, String), u64>,
    ) -> Self {
        Self { subreddits, authors, edges }
    }

    pub fn subreddits(&self) -> &BTreeMap<String, u64> {
        &self.subreddits
    }

    pub fn authors(&self) -> &BTreeMap<String, u64> {
        &self.authors
    }

    pub fn edges(&self) -> &BTreeMap<(String, String), u64> {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.subreddits.is_empty() && self.authors.is_empty()
    }

    /// Total edge weight, which equals the number of documents represented.
    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Check the structural invariants: edge endpoints exist and each node's
    /// weight equals the sum of its incident edge weights.
    pub fn validate(&self) -> Result<(), NetgraphError> {
        let mut author_sums: BTreeMap<&str, u64> = BTreeMap::new();
        let mut subreddit_sums: BTreeMap<&str, u64> = BTreeMap::new();
        for ((author, subreddit), weight) in &self.edges {
            if !self.authors.contains_key(author) {
                return Err(NetgraphError::InvalidGraph(format!(
                    "edge references missing author '{author}'"
                )));
            }
            if !self.subreddits.contains_key(subreddit) {
                return Err(NetgraphError::InvalidGraph(format!(
                    "edge references missing subreddit '{subreddit}'"
                )));
            }
            *author_sums.entry(author).or_insert(0) += weight;
            *subreddit_sums.entry(subreddit).or_insert(0) += weight;
        }
        for (author, weight) in &self.authors {
            let incident = author_sums.get(author.as_str()).copied().unwrap_or(0);
            if incident != *weight {
                return Err(NetgraphError::InvalidGraph(format!(
                    "author '{author}' weight {weight} != incident edge sum {incident}"
                )));
            }
        }
        for (subreddit, weight) in &self.subreddits {
            let incident = subreddit_sums.get(subreddit.as_str()).copied().unwrap_or(0);
            if incident != *weight {
                return Err(NetgraphError::InvalidGraph(format!(
                    "subreddit '{subreddit}' weight {weight} != incident edge sum {incident}"
                )));
            }
        }
        Ok(())
    }
}

/// Build the bipartite graph for one quadrant of a verdict list.
pub fn build_bipartite(verdicts: &[Verdict], quadrant: Quadrant) -> BipartiteGraph {
    let mut graph = BipartiteGraph::default();
    for v in verdicts {
        if v.quadrant == quadrant {
            graph.insert_document(&v.author, &v.subreddit);
        }
    }
    graph
}
