//! MinHash signatures for Jaccard estimation over shingle sets.
//!
//! Each permutation is simulated by mixing a per-permutation key into a
//! 64-bit hash of the element; the signature stores the per-permutation
//! minimum. The estimator is the fraction of matching slots, unbiased with
//! variance J(1-J)/num_perms.

use super::NetgraphError;
use std::collections::BTreeSet;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn element_hash(element: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in element.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Per-permutation minima for one set.
///
/// The empty set gets a sentinel signature (flagged, minima saturated) so
/// the estimator can follow the stated convention: empty vs nonempty is 0,
/// empty vs empty is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinHashSignature {
    num_perms: usize,
    seed: u64,
    values: Vec<u64>,
    empty: bool,
}

impl MinHashSignature {
    pub fn num_perms(&self) -> usize {
        self.num_perms
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn is_empty_set(&self) -> bool {
        self.empty
    }
}

/// Signature of `set` under `num_perms` simulated permutations.
pub fn minhash_signature(set: &BTreeSet<String>, num_perms: usize, seed: u64) -> MinHashSignature {
    assert!(num_perms >= 1, "need at least one permutation");
    if set.is_empty() {
        return MinHashSignature {
            num_perms,
            seed,
            values: vec![u64::MAX; num_perms],
            empty: true,
        };
    }
    let hashes: Vec<u64> = set.iter().map(|e| element_hash(e)).collect();
    let values = (0..num_perms)
        .map(|i| {
            let perm_key = splitmix64(seed.wrapping_add((i as u64).wrapping_mul(GOLDEN)));
            hashes.iter().map(|&h| splitmix64(h ^ perm_key)).min().expect("nonempty")
        })
        .collect();
    MinHashSignature { num_perms, seed, values, empty: false }
}

/// Estimated Jaccard similarity: the fraction of matching signature slots.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64, NetgraphError> {
    if a.num_perms != b.num_perms || a.seed != b.seed {
        return Err(NetgraphError::MismatchedSignatures {
            a_perms: a.num_perms,
            a_seed: a.seed,
            b_perms: b.num_perms,
            b_seed: b.seed,
        });
    }
    match (a.empty, b.empty) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        (false, false) => {}
    }
    let matching = a.values.iter().zip(&b.values).filter(|(x, y)| x == y).count();
    Ok(matching as f64 / a.num_perms as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn exact_jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
        if a.is_empty() && b.is_empty() {
            return 1.0;
        }
        let inter = a.intersection(b).count() as f64;
        let union = a.union(b).count() as f64;
        inter / union
    }

    #[test]
    fn identical_nonempty_sets_estimate_one() {
        let s = set(&["a b c", "b c d", "c d e"]);
        let sig_a = minhash_signature(&s, 64, 42);
        let sig_b = minhash_signature(&s, 64, 42);
        assert_eq!(estimate_jaccard(&sig_a, &sig_b).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_sets_estimate_zero() {
        let a = minhash_signature(&set(&["x1", "x2", "x3"]), 128, 7);
        let b = minhash_signature(&set(&["y1", "y2", "y3"]), 128, 7);
        // 64-bit minima collide with negligible probability.
        assert_eq!(estimate_jaccard(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn empty_set_conventions() {
        let empty = minhash_signature(&BTreeSet::new(), 32, 1);
        let full = minhash_signature(&set(&["a"]), 32, 1);
        assert_eq!(estimate_jaccard(&empty, &full).unwrap(), 0.0);
        assert_eq!(estimate_jaccard(&full, &empty).unwrap(), 0.0);
        let empty2 = minhash_signature(&BTreeSet::new(), 32, 1);
        assert_eq!(estimate_jaccard(&empty, &empty2).unwrap(), 1.0);
        assert!(empty.is_empty_set());
    }

    #[test]
    fn mismatched_parameters_error() {
        let a = minhash_signature(&set(&["a"]), 32, 1);
        let b = minhash_signature(&set(&["a"]), 64, 1);
        assert!(matches!(
            estimate_jaccard(&a, &b),
            Err(NetgraphError::MismatchedSignatures { .. })
        ));
        let c = minhash_signature(&set(&["a"]), 32, 2);
        assert!(estimate_jaccard(&a, &c).is_err());
    }

    #[test]
    fn signatures_are_deterministic_and_seed_sensitive() {
        let s = set(&["one", "two", "three"]);
        assert_eq!(minhash_signature(&s, 16, 9).values(), minhash_signature(&s, 16, 9).values());
        assert_ne!(minhash_signature(&s, 16, 9).values(), minhash_signature(&s, 16, 10).values());
    }

    #[test]
    fn estimates_track_exact_jaccard_on_random_pairs() {
        // Smoke-level statistical check; the full 1,000-pair version runs in
        // the acceptance suite.
        let mut worst: f64 = 0.0;
        for trial in 0..50u64 {
            let shared = (trial % 20) as usize;
            let a: BTreeSet<String> = (0..20)
                .map(|i| format!("s{i}"))
                .chain((0..(20 - shared)).map(|i| format!("a{trial}_{i}")))
                .take(20)
                .collect();
            let b: BTreeSet<String> = (0..shared)
                .map(|i| format!("s{i}"))
                .chain((0..(20 - shared)).map(|i| format!("b{trial}_{i}")))
                .collect();
            let sig_a = minhash_signature(&a, 256, 42);
            let sig_b = minhash_signature(&b, 256, 42);
            let err = (estimate_jaccard(&sig_a, &sig_b).unwrap() - exact_jaccard(&a, &b)).abs();
            worst = worst.max(err);
        }
        assert!(worst <= 0.12, "worst deviation {worst}");
    }
}
