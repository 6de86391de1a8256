//! Combining pairwise signals into coordination scores and clusters.

use super::{NetgraphError, PairMap};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Relative weights of the three signals. Must be non-negative and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub co_engagement: f64,
    pub language_similarity: f64,
    pub target_overlap: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self { co_engagement: 1.0 / 3.0, language_similarity: 1.0 / 3.0, target_overlap: 1.0 / 3.0 }
    }
}

impl ScoreWeights {
    fn validate(&self) -> Result<(), NetgraphError> {
        let parts = [self.co_engagement, self.language_similarity, self.target_overlap];
        let sum: f64 = parts.iter().sum();
        if parts.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(NetgraphError::BadWeights { sum });
        }
        Ok(())
    }
}

/// One scored author pair. `author_a < author_b` lexicographically; every
/// component and the combined score lie in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinationEdge {
    pub author_a: String,
    pub author_b: String,
    pub co_engagement: f64,
    pub language_similarity: f64,
    pub target_overlap: f64,
    pub score: f64,
}

/// Blends the three signal maps into one edge list. A pair present in any
/// map gets an edge; components missing from the other maps contribute 0.
/// Edges come back sorted by score descending, then by pair ascending.
pub fn coordination_scores(
    co_engagement: &PairMap,
    language_similarity: &PairMap,
    target_overlap: &PairMap,
    weights: &ScoreWeights,
) -> Result<Vec<CoordinationEdge>, NetgraphError> {
    weights.validate()?;
    let mut pairs: BTreeSet<&(String, String)> = BTreeSet::new();
    pairs.extend(co_engagement.keys());
    pairs.extend(language_similarity.keys());
    pairs.extend(target_overlap.keys());

    let mut edges: Vec<CoordinationEdge> = pairs
        .into_iter()
        .map(|pair| {
            let i = co_engagement.get(pair).copied().unwrap_or(0.0);
            let l = language_similarity.get(pair).copied().unwrap_or(0.0);
            let t = target_overlap.get(pair).copied().unwrap_or(0.0);
            CoordinationEdge {
                author_a: pair.0.clone(),
                author_b: pair.1.clone(),
                co_engagement: i,
                language_similarity: l,
                target_overlap: t,
                score: weights.co_engagement * i
                    + weights.language_similarity * l
                    + weights.target_overlap * t,
            }
        })
        .collect();
    edges.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then_with(|| (&a.author_a, &a.author_b).cmp(&(&b.author_a, &b.author_b)))
    });
    Ok(edges)
}

/// A connected component of the thresholded coordination graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinationCluster {
    pub members: BTreeSet<String>,
    pub mean_edge_score: f64,
    /// The edges with score >= tau induced on `members`.
    pub edges: Vec<CoordinationEdge>,
}

/// Finds connected components among edges with score >= `tau`. Isolated
/// authors are not reported. Clusters come back ordered by mean edge score
/// descending, ties broken by smallest member name.
pub fn detect_clusters(edges: &[CoordinationEdge], tau: f64) -> Vec<CoordinationCluster> {
    assert!((0.0..=1.0).contains(&tau), "tau must lie in [0, 1]");
    let strong: Vec<&CoordinationEdge> = edges.iter().filter(|e| e.score >= tau).collect();

    let mut adjacency: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in &strong {
        adjacency.entry(&e.author_a).or_default().insert(&e.author_b);
        adjacency.entry(&e.author_b).or_default().insert(&e.author_a);
    }

    let mut visited: BTreeSet<&str> = BTreeSet::new();
    let mut clusters = Vec::new();
    for start in adjacency.keys() {
        if visited.contains(start) {
            continue;
        }
        let mut members: BTreeSet<String> = BTreeSet::new();
        let mut queue = VecDeque::from([*start]);
        visited.insert(start);
        while let Some(node) = queue.pop_front() {
            members.insert(node.to_string());
            for next in &adjacency[node] {
                if visited.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        let induced: Vec<CoordinationEdge> =
            strong.iter().filter(|e| members.contains(&e.author_a)).map(|e| (*e).clone()).collect();
        let mean = induced.iter().map(|e| e.score).sum::<f64>() / induced.len() as f64;
        clusters.push(CoordinationCluster { members, mean_edge_score: mean, edges: induced });
    }
    clusters.sort_by(|a, b| {
        b.mean_edge_score
            .partial_cmp(&a.mean_edge_score)
            .expect("means are finite")
            .then_with(|| a.members.iter().next().cmp(&b.members.iter().next()))
    });
    clusters
}

#[derive(Serialize)]
struct ClusterReport<'a> {
    tau: f64,
    weights: &'a ScoreWeights,
    cluster_count: usize,
    clusters: &'a [CoordinationCluster],
}

/// Pretty-printed JSON report of a clustering run.
pub fn render_cluster_report(
    clusters: &[CoordinationCluster],
    tau: f64,
    weights: &ScoreWeights,
) -> String {
    let report = ClusterReport { tau, weights, cluster_count: clusters.len(), clusters };
    let mut out = serde_json::to_string_pretty(&report).expect("report serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::pair_key;

    fn map(entries: &[(&str, &str, f64)]) -> PairMap {
        entries.iter().map(|(a, b, v)| (pair_key(a, b), *v)).collect()
    }

    #[test]
    fn components_blend_with_missing_defaults() {
        let i = map(&[("amy", "bob", 0.9)]);
        let l = map(&[("amy", "bob", 0.6), ("bob", "cal", 0.3)]);
        let t = PairMap::new();
        let edges = coordination_scores(&i, &l, &t, &ScoreWeights::default()).unwrap();
        assert_eq!(edges.len(), 2);
        let ab = &edges[0];
        assert_eq!((ab.author_a.as_str(), ab.author_b.as_str()), ("amy", "bob"));
        assert!((ab.score - 0.5).abs() < 1e-12);
        assert_eq!(ab.target_overlap, 0.0);
        let bc = &edges[1];
        assert!((bc.score - 0.1).abs() < 1e-12);
        assert_eq!(bc.co_engagement, 0.0);
    }

    #[test]
    fn equal_scores_sort_by_pair() {
        let i = map(&[("x", "y", 0.5), ("a", "b", 0.5)]);
        let edges =
            coordination_scores(&i, &PairMap::new(), &PairMap::new(), &ScoreWeights::default())
                .unwrap();
        assert_eq!(edges[0].author_a, "a");
        assert_eq!(edges[1].author_a, "x");
    }

    #[test]
    fn bad_weight_sums_are_rejected() {
        let w = ScoreWeights { co_engagement: 0.5, language_similarity: 0.5, target_overlap: 0.5 };
        let err =
            coordination_scores(&PairMap::new(), &PairMap::new(), &PairMap::new(), &w).unwrap_err();
        assert!(matches!(err, NetgraphError::BadWeights { sum } if (sum - 1.5).abs() < 1e-12));
        let neg =
            ScoreWeights { co_engagement: -0.2, language_similarity: 0.6, target_overlap: 0.6 };
        assert!(
            coordination_scores(&PairMap::new(), &PairMap::new(), &PairMap::new(), &neg).is_err()
        );
    }

    #[test]
    fn weight_tolerance_admits_thirds() {
        let w = ScoreWeights::default();
        assert!(coordination_scores(&PairMap::new(), &PairMap::new(), &PairMap::new(), &w).is_ok());
    }

    fn edge(a: &str, b: &str, s: f64) -> CoordinationEdge {
        CoordinationEdge {
            author_a: a.to_string(),
            author_b: b.to_string(),
            co_engagement: s,
            language_similarity: s,
            target_overlap: s,
            score: s,
        }
    }

    #[test]
    fn two_triangles_and_noise_form_two_clusters() {
        let edges = vec![
            edge("a1", "a2", 0.9),
            edge("a2", "a3", 0.8),
            edge("a1", "a3", 0.85),
            edge("b1", "b2", 0.7),
            edge("b2", "b3", 0.75),
            edge("a3", "b1", 0.2),
            edge("c1", "c2", 0.1),
        ];
        let clusters = detect_clusters(&edges, 0.5);
        assert_eq!(clusters.len(), 2);
        let first: Vec<&str> = clusters[0].members.iter().map(String::as_str).collect();
        assert_eq!(first, vec!["a1", "a2", "a3"]);
        assert!((clusters[0].mean_edge_score - 0.85).abs() < 1e-12);
        let second: Vec<&str> = clusters[1].members.iter().map(String::as_str).collect();
        assert_eq!(second, vec!["b1", "b2", "b3"]);
        assert!((clusters[1].mean_edge_score - 0.725).abs() < 1e-12);
        assert_eq!(clusters[0].edges.len(), 3);
        assert_eq!(clusters[1].edges.len(), 2);
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        let edges = vec![edge("a", "b", 0.5)];
        assert_eq!(detect_clusters(&edges, 0.5).len(), 1);
        assert!(detect_clusters(&edges, 0.5000001).is_empty());
    }

    #[test]
    fn singleton_authors_never_appear() {
        let edges = vec![edge("a", "b", 0.9), edge("c", "d", 0.1)];
        let clusters = detect_clusters(&edges, 0.5);
        assert_eq!(clusters.len(), 1);
        let all: BTreeSet<&str> =
            clusters.iter().flat_map(|c| c.members.iter().map(String::as_str)).collect();
        assert!(!all.contains("c") && !all.contains("d"));
    }

    #[test]
    fn report_contains_every_cluster() {
        let edges = vec![edge("a", "b", 0.9)];
        let clusters = detect_clusters(&edges, 0.5);
        let text = render_cluster_report(&clusters, 0.5, &ScoreWeights::default());
        assert!(text.contains("\"cluster_count\": 1"));
        assert!(text.contains("\"a\""));
        assert!(text.ends_with('\n'));
    }
}
