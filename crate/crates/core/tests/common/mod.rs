//! Test-only oracles, written independently of the library's index code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A corpus of raw token lists with ids.
pub struct RandomCorpus {
    pub ids: Vec<String>,
    pub docs: Vec<Vec<String>>,
    pub queries: Vec<Vec<String>>,
    pub k1: f64,
    pub b: f64,
}

/// Up to 30 documents over a vocabulary of at most 10 terms, with random
/// BM25 parameters and a few queries (which may contain unseen terms).
pub fn random_corpus(seed: u64) -> RandomCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_docs = rng.random_range(1..=30);
    let vocab = rng.random_range(1..=10);
    let mut order: Vec<usize> = (0..n_docs).collect();
    for i in (1..n_docs).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let ids = order.iter().map(|i| format!("doc{i:02}")).collect();
    let docs = (0..n_docs)
        .map(|_| (0..rng.random_range(0..=8)).map(|_| format!("t{}", rng.random_range(0..vocab))).collect())
        .collect();
    let queries = (0..5)
        .map(|_| {
            (0..rng.random_range(1..=4))
                .map(|_| {
                    let t = rng.random_range(0..=vocab);
                    if t == vocab {
                        "unseen".to_string()
                    } else {
                        format!("t{t}")
                    }
                })
                .collect()
        })
        .collect();
    RandomCorpus { ids, docs, queries, k1: rng.random_range(0.5..=2.0), b: rng.random_range(0.0..=1.0) }
}

/// Direct evaluation of the BM25 similarity sum over distinct query terms.
/// Contributions are added smallest first, so the sum does not depend on
/// which query term produced which contribution.
pub fn bm25_brute_force(docs: &[Vec<String>], query: &[String], doc: usize, k1: f64, b: f64) -> f64 {
    let n = docs.len() as f64;
    let avgdl = docs.iter().map(|d| d.len() as f64).sum::<f64>() / n;
    let dl = docs[doc].len() as f64;
    let distinct: BTreeSet<&String> = query.iter().collect();
    let mut parts = Vec::new();
    for q in distinct {
        let f = docs[doc].iter().filter(|t| *t == q).count() as f64;
        if f == 0.0 {
            continue;
        }
        let n_q = docs.iter().filter(|d| d.contains(q)).count() as f64;
        let idf = ((n - n_q + 0.5) / (n_q + 0.5) + 1.0).ln();
        parts.push(idf * (f * (k1 + 1.0)) / (f + k1 * (1.0 - b + b * dl / avgdl)));
    }
    parts.sort_by(|x: &f64, y| x.partial_cmp(y).unwrap());
    parts.into_iter().sum()
}

/// Ids of documents with positive oracle score, sorted by score descending
/// then id ascending, cut to `k`.
pub fn oracle_ranking(c: &RandomCorpus, query: &[String], k: usize) -> Vec<(String, f64)> {
    let mut scored: Vec<(String, f64)> = (0..c.docs.len())
        .map(|d| (c.ids[d].clone(), bm25_brute_force(&c.docs, query, d, c.k1, c.b)))
        .filter(|(_, s)| *s > 0.0)
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}
