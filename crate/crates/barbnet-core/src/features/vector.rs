//! Sparse vectors and the three vectorization routes.

use super::Vocabulary;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A sparse feature vector: entries sorted by index, strictly increasing,
/// all indices < `dim`, all values finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Construct from pre-sorted entries. Panics if the invariants fail;
    /// callers in this crate only hand over sorted, in-range, finite data.
    pub fn from_sorted(dim: usize, entries: Vec<(u32, f64)>) -> Self {
        for pair in entries.windows(2) {
            assert!(pair[0].0 < pair[1].0, "entries out of order");
        }
        if let Some(&(last, _)) = entries.last() {
            assert!((last as usize) < dim, "index {last} out of range for dim {dim}");
        }
        assert!(entries.iter().all(|&(_, v)| v.is_finite()));
        Self { dim, entries }
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Value at `idx`, zero when absent.
    pub fn get(&self, idx: u32) -> f64 {
        match self.entries.binary_search_by_key(&idx, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Dot product against a dense weight row of length `dim`.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        debug_assert_eq!(dense.len(), self.dim);
        self.entries.iter().map(|&(i, v)| v * dense[i as usize]).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Scale every entry in place by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for entry in &mut self.entries {
            entry.1 *= factor;
        }
    }
}

fn from_accumulated(dim: usize, acc: BTreeMap<u32, f64>) -> SparseVector {
    let entries: Vec<(u32, f64)> = acc.into_iter().filter(|&(_, v)| v != 0.0).collect();
    SparseVector::from_sorted(dim, entries)
}

/// TF-IDF vector for one tokenized document: per-term count times idf, then
/// L2-normalized. Out-of-vocabulary tokens are dropped; a document with no
/// in-vocabulary tokens comes back as the zero vector.
pub fn vectorize(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
    for token in tokens {
        if let Some(idx) = vocab.term_index(token) {
            *acc.entry(idx).or_insert(0.0) += vocab.idf(idx);
        }
    }
    let mut vector = from_accumulated(vocab.len(), acc);
    let norm = vector.l2_norm();
    if norm > 0.0 {
        vector.scale(1.0 / norm);
    }
    vector
}

/// Raw count vector over the vocabulary, no weighting or normalization.
/// This is the representation multinomial Naive Bayes trains on.
pub fn count_vectorize(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
    for token in tokens {
        if let Some(idx) = vocab.term_index(token) {
            *acc.entry(idx).or_insert(0.0) += 1.0;
        }
    }
    from_accumulated(vocab.len(), acc)
}

/// FNV-1a over the token bytes with the seed folded into the offset basis,
/// then a splitmix64-style finalizer so low bits are usable for power-of-two
/// bucket counts. No platform-dependent hashing anywhere in this path.
fn stable_hash(token: &str, seed: u64) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = FNV_OFFSET ^ seed.wrapping_mul(FNV_PRIME);
    for &b in token.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Signed feature hashing: each token maps to bucket `h % dims` with sign
/// taken from an independent hash bit, counts accumulate with that sign, and
/// the result is L2-normalized. Exact cancellations drop out of the vector.
pub fn hash_vectorize(tokens: &[String], dims: usize, seed: u64) -> SparseVector {
    assert!(dims >= 2, "hashing needs at least two buckets");
    const SIGN_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
    for token in tokens {
        let idx = (stable_hash(token, seed) % dims as u64) as u32;
        let sign = if stable_hash(token, seed ^ SIGN_SALT) & 1 == 0 { 1.0 } else { -1.0 };
        *acc.entry(idx).or_insert(0.0) += sign;
    }
    let mut vector = from_accumulated(dims, acc);
    let norm = vector.l2_norm();
    if norm > 0.0 {
        vector.scale(1.0 / norm);
    }
    vector
}
