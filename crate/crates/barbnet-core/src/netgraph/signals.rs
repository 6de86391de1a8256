//! The three pairwise coordination signals.
//!
//! All three produce sparse pair maps: a pair that cannot have a nonzero
//! signal is simply absent, and the score combiner treats absence as 0.

use super::minhash::{estimate_jaccard, minhash_signature};
use super::{pair_key, PairMap};
use crate::corpus::{Document, RawComment};
use crate::features::shingles;
use crate::par;
use crate::pipeline::Verdict;
use std::collections::{BTreeMap, BTreeSet};

/// Co-engagement I: per author pair, the fraction of their shared posts on
/// which they commented within `window_secs` of each other, normalized by
/// the smaller of the two authors' distinct commented-post counts. Only
/// authors present in `verdicts` are considered; pairs that share no post
/// are omitted.
pub fn co_engagement(verdicts: &[Verdict], comments: &[RawComment], window_secs: i64) -> PairMap {
    assert!(window_secs > 0, "window must be positive");
    let eligible: BTreeSet<&str> = verdicts.iter().map(|v| v.author.as_str()).collect();

    // author -> distinct posts commented; post -> author -> timestamps.
    let mut posts_by_author: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut by_post: BTreeMap<&str, BTreeMap<&str, Vec<i64>>> = BTreeMap::new();
    for c in comments {
        if !eligible.contains(c.author.as_str()) {
            continue;
        }
        posts_by_author.entry(c.author.as_str()).or_default().insert(c.post_id.as_str());
        by_post
            .entry(c.post_id.as_str())
            .or_default()
            .entry(c.author.as_str())
            .or_default()
            .push(c.created_ts);
    }

    let mut shared: BTreeMap<(String, String), (u64, u64)> = BTreeMap::new();
    for authors in by_post.values() {
        let names: Vec<&str> = authors.keys().copied().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                let close = authors[a]
                    .iter()
                    .any(|ta| authors[b].iter().any(|tb| (ta - tb).abs() <= window_secs));
                let entry = shared.entry(pair_key(a, b)).or_insert((0, 0));
                entry.0 += 1;
                entry.1 += u64::from(close);
            }
        }
    }

    shared
        .into_iter()
        .map(|(pair, (_, close))| {
            let denom = posts_by_author[pair.0.as_str()]
                .len()
                .min(posts_by_author[pair.1.as_str()].len()) as f64;
            (pair, close as f64 / denom)
        })
        .collect()
}

/// Target overlap T: Jaccard similarity of the distinct reply-target sets of
/// each author's bullying-positive documents. Pairs with an empty target set
/// on either side, or with no common target, are omitted.
pub fn target_overlap(verdicts: &[Verdict]) -> PairMap {
    let mut targets: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for v in verdicts {
        if v.bullying {
            if let Some(target) = &v.target_author {
                targets.entry(v.author.as_str()).or_default().insert(target.as_str());
            }
        }
    }

    // Invert target -> authors so only intersecting pairs are enumerated.
    let mut by_target: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (author, set) in &targets {
        for target in set {
            by_target.entry(target).or_default().insert(author);
        }
    }
    let mut candidates: BTreeSet<(String, String)> = BTreeSet::new();
    for authors in by_target.values() {
        let names: Vec<&str> = authors.iter().copied().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                candidates.insert(pair_key(a, b));
            }
        }
    }

    candidates
        .into_iter()
        .map(|pair| {
            let a = &targets[pair.0.as_str()];
            let b = &targets[pair.1.as_str()];
            let inter = a.intersection(b).count() as f64;
            let union = a.union(b).count() as f64;
            (pair, inter / union)
        })
        .collect()
}

/// Settings for shared-language similarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageConfig {
    /// Shingle width in tokens.
    pub shingle_k: usize,
    /// At or below this many authors, Jaccard is computed exactly; above it,
    /// minhash estimation keeps per-pair cost independent of text volume.
    pub exact_author_cutoff: usize,
    pub num_perms: usize,
    pub seed: u64,
}

impl Default for LanguageConfig {
    fn default() -> Self {
        Self { shingle_k: 3, exact_author_cutoff: 10_000, num_perms: 256, seed: 42 }
    }
}

/// Language similarity L: Jaccard over each author's aggregated shingle set,
/// built from the documents that produced `verdicts`. Pairs with similarity
/// 0 (or an empty shingle set on either side) are omitted.
pub fn language_similarity(
    docs: &[Document],
    verdicts: &[Verdict],
    config: &LanguageConfig,
) -> PairMap {
    let verdict_ids: BTreeSet<&str> = verdicts.iter().map(|v| v.doc_id.as_str()).collect();
    let mut sets: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for doc in docs {
        if verdict_ids.contains(doc.doc_id.as_str()) {
            sets.entry(doc.author.as_str())
                .or_default()
                .extend(shingles(&doc.text, config.shingle_k));
        }
    }
    sets.retain(|_, set| !set.is_empty());
    let authors: Vec<&str> = sets.keys().copied().collect();

    if authors.len() <= config.exact_author_cutoff {
        // Exact path: enumerate only pairs that share a shingle.
        let mut by_shingle: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (author, set) in &sets {
            for shingle in set {
                by_shingle.entry(shingle).or_default().push(author);
            }
        }
        let mut candidates: BTreeSet<(String, String)> = BTreeSet::new();
        for authors in by_shingle.values() {
            for (i, a) in authors.iter().enumerate() {
                for b in &authors[i + 1..] {
                    candidates.insert(pair_key(a, b));
                }
            }
        }
        let candidates: Vec<(String, String)> = candidates.into_iter().collect();
        let scores = par::map_slice(&candidates, |pair| {
            let a = &sets[pair.0.as_str()];
            let b = &sets[pair.1.as_str()];
            let inter = a.intersection(b).count() as f64;
            let union = a.union(b).count() as f64;
            inter / union
        });
        return candidates.into_iter().zip(scores).collect();
    }

    let signatures = par::map_slice(&authors, |author| {
        minhash_signature(&sets[author], config.num_perms, config.seed)
    });
    let pairs: Vec<(usize, usize)> =
        (0..authors.len()).flat_map(|i| ((i + 1)..authors.len()).map(move |j| (i, j))).collect();
    let estimates = par::map_slice(&pairs, |&(i, j)| {
        estimate_jaccard(&signatures[i], &signatures[j]).expect("same parameters")
    });
    pairs
        .into_iter()
        .zip(estimates)
        .filter(|(_, l)| *l > 0.0)
        .map(|((i, j), l)| (pair_key(authors[i], authors[j]), l))
        .collect()
}
