//! Network construction over pipeline verdicts.
//!
//! Two graph families come out of this module: bipartite author–subreddit
//! graphs weighted by quadrant-matching document counts, and an author
//! coordination graph built from three pairwise signals (co-engagement,
//! shared language, target overlap) combined into a single score. Clusters
//! are connected components of the thresholded coordination graph.

mod bipartite;
mod coordination;
mod export;
mod minhash;
mod signals;

pub use bipartite::{build_bipartite, BipartiteGraph};
pub use coordination::{
    coordination_scores, detect_clusters, render_cluster_report, CoordinationCluster,
    CoordinationEdge, ScoreWeights,
};
pub use export::{export_graph, parse_node_link, GraphFormat};
pub use minhash::{estimate_jaccard, minhash_signature, MinHashSignature};
pub use signals::{co_engagement, language_similarity, target_overlap, LanguageConfig};

use std::collections::BTreeMap;

/// Unordered author-pair map; keys are stored lexicographically sorted.
pub type PairMap = BTreeMap<(String, String), f64>;

/// Canonical key for an unordered author pair.
pub fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Errors from graph construction and export.
#[derive(Debug, thiserror::Error)]
pub enum NetgraphError {
    #[error(
        "minhash signatures disagree: ({a_perms} perms, seed {a_seed}) vs \
         ({b_perms} perms, seed {b_seed})"
    )]
    MismatchedSignatures { a_perms: usize, a_seed: u64, b_perms: usize, b_seed: u64 },
    #[error("score weights must be non-negative and sum to 1, got sum {sum}")]
    BadWeights { sum: f64 },
    #[error("unknown graph format '{0}' (expected dot, graphml, or json)")]
    UnknownFormat(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unreadable node-link document: {0}")]
    Unparseable(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_key_sorts_its_arguments() {
        assert_eq!(pair_key("zoe", "amy"), ("amy".to_string(), "zoe".to_string()));
        assert_eq!(pair_key("amy", "zoe"), ("amy".to_string(), "zoe".to_string()));
    }
}
