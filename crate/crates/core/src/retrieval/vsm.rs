use serde::{Deserialize, Serialize};

use super::{build_vocabulary, ordered_sum, rank_top_k, RankedResult, RetrievalError, Vocabulary};
use crate::textproc::BagOfWords;

/// Sparse vector as `(term id, weight)` pairs sorted by term id.
pub type SparseVector = Vec<(u32, f64)>;

/// tf-idf vector space model with cosine similarity. Weights are
/// `ln(1 + tf) * ln(N / df)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VsmIndex {
    vocabulary: Vocabulary,
    vectors: Vec<SparseVector>,
    norms: Vec<f64>,
    doc_ids: Vec<String>,
}

fn weight(tf: u32, df: u32, n_docs: usize) -> f64 {
    (1.0 + tf as f64).ln() * (n_docs as f64 / df as f64).ln()
}

fn norm(v: &[(u32, f64)]) -> f64 {
    ordered_sum(v.iter().map(|(_, w)| w * w)).sqrt()
}

fn dot(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let (mut i, mut j, mut products) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                products.push(a[i].1 * b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    ordered_sum(products)
}

/// Cosine similarity of two sparse vectors; zero when either has zero norm.
pub fn cosine(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let denom = norm(a) * norm(b);
    if denom == 0.0 {
        0.0
    } else {
        dot(a, b) / denom
    }
}

impl VsmIndex {
    pub fn build(doc_ids: Vec<String>, bags: &[BagOfWords]) -> Result<Self, RetrievalError> {
        if doc_ids.len() != bags.len() {
            return Err(RetrievalError::LengthMismatch { ids: doc_ids.len(), bags: bags.len() });
        }
        let vocabulary = build_vocabulary(bags);
        let vectors: Vec<SparseVector> = bags.iter().map(|b| vectorize(&vocabulary, b)).collect();
        let norms = vectors.iter().map(|v| norm(v)).collect();
        Ok(VsmIndex { vocabulary, vectors, norms, doc_ids })
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn vector(&self, doc: usize) -> &[(u32, f64)] {
        &self.vectors[doc]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Weight vector of `query` under this corpus's statistics; terms the
    /// corpus has never seen are dropped.
    pub fn query_vector(&self, query: &BagOfWords) -> SparseVector {
        vectorize(&self.vocabulary, query)
    }

    pub fn scores(&self, query: &BagOfWords) -> Vec<f64> {
        let q = self.query_vector(query);
        let q_norm = norm(&q);
        self.vectors
            .iter()
            .zip(&self.norms)
            .map(|(d, &d_norm)| if q_norm == 0.0 || d_norm == 0.0 { 0.0 } else { dot(&q, d) / (q_norm * d_norm) })
            .collect()
    }

    pub fn search(&self, query: &BagOfWords, k: usize) -> Vec<RankedResult> {
        if query.is_empty() || k == 0 {
            return Vec::new();
        }
        rank_top_k(&self.doc_ids, &self.scores(query), k)
    }
}

fn vectorize(vocabulary: &Vocabulary, bag: &BagOfWords) -> SparseVector {
    let n = vocabulary.n_docs();
    let mut v: SparseVector =
        bag.iter().filter_map(|(term, tf)| vocabulary.get(term).map(|e| (e.id, weight(tf, e.df, n)))).collect();
    v.sort_by_key(|(id, _)| *id);
    v
}
