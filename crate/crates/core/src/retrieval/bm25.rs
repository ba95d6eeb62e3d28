use serde::{Deserialize, Serialize};

use super::{build_vocabulary, ordered_sum, rank_top_k, RankedResult, RetrievalError, Vocabulary};
use crate::textproc::BagOfWords;

/// Term-frequency saturation `k1` and length normalization `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<(), RetrievalError> {
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(RetrievalError::InvalidParams(format!("k1 must be >= 0, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(RetrievalError::InvalidParams(format!("b must lie in [0, 1], got {}", self.b)));
        }
        Ok(())
    }
}

/// Non-negative Okapi IDF: `ln((N - n + 0.5) / (n + 0.5) + 1)`.
pub fn bm25_idf(n_docs: usize, df: u32) -> f64 {
    let n = n_docs as f64;
    let df = df as f64;
    ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// Inverted index for BM25. Postings are indexed by term id and sorted by
/// document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bm25Index {
    vocabulary: Vocabulary,
    postings: Vec<Vec<Posting>>,
    doc_lengths: Vec<u32>,
    avgdl: f64,
    params: Bm25Params,
    doc_ids: Vec<String>,
}

impl Bm25Index {
    pub fn build(doc_ids: Vec<String>, bags: &[BagOfWords], params: Bm25Params) -> Result<Self, RetrievalError> {
        params.validate()?;
        if doc_ids.len() != bags.len() {
            return Err(RetrievalError::LengthMismatch { ids: doc_ids.len(), bags: bags.len() });
        }
        let vocabulary = build_vocabulary(bags);
        let mut postings = vec![Vec::new(); vocabulary.len()];
        for (doc, bag) in bags.iter().enumerate() {
            for (term, tf) in bag.iter() {
                let entry = vocabulary.get(term).expect("term comes from this corpus");
                postings[entry.id as usize].push(Posting { doc: doc as u32, tf });
            }
        }
        let doc_lengths: Vec<u32> = bags.iter().map(BagOfWords::total_len).collect();
        let avgdl = if doc_lengths.is_empty() {
            0.0
        } else {
            doc_lengths.iter().map(|&l| l as f64).sum::<f64>() / doc_lengths.len() as f64
        };
        Ok(Bm25Index { vocabulary, postings, doc_lengths, avgdl, params, doc_ids })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn doc_lengths(&self) -> &[u32] {
        &self.doc_lengths
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    /// `f(term, doc)`.
    pub fn term_frequency(&self, term: &str, doc: usize) -> u32 {
        let Some(entry) = self.vocabulary.get(term) else { return 0 };
        let list = &self.postings[entry.id as usize];
        list.binary_search_by_key(&(doc as u32), |p| p.doc).map_or(0, |i| list[i].tf)
    }

    fn term_weight(&self, idf: f64, tf: u32, doc: usize) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let tf = tf as f64;
        let len_ratio = self.doc_lengths[doc] as f64 / self.avgdl;
        idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * len_ratio))
    }

    /// Similarity of document `doc` to `query`, summed over the query's
    /// distinct terms. Query-side counts do not contribute.
    ///
    /// Panics if `doc` is out of range.
    pub fn bm25_score(&self, query: &BagOfWords, doc: usize) -> f64 {
        assert!(doc < self.len(), "document index {doc} out of range");
        let n = self.vocabulary.n_docs();
        ordered_sum(query.terms().filter_map(|term| {
            let tf = self.term_frequency(term, doc);
            (tf > 0).then(|| self.term_weight(bm25_idf(n, self.vocabulary.df(term)), tf, doc))
        }))
    }

    /// Scores of all documents, collected term-at-a-time over postings.
    pub fn scores(&self, query: &BagOfWords) -> Vec<f64> {
        let n = self.vocabulary.n_docs();
        let mut parts: Vec<Vec<f64>> = vec![Vec::new(); self.len()];
        for term in query.terms() {
            let Some(entry) = self.vocabulary.get(term) else { continue };
            let idf = bm25_idf(n, entry.df);
            for p in &self.postings[entry.id as usize] {
                parts[p.doc as usize].push(self.term_weight(idf, p.tf, p.doc as usize));
            }
        }
        parts.into_iter().map(ordered_sum).collect()
    }

    pub fn search(&self, query: &BagOfWords, k: usize) -> Vec<RankedResult> {
        if query.is_empty() || k == 0 {
            return Vec::new();
        }
        rank_top_k(&self.doc_ids, &self.scores(query), k)
    }
}
