//! Ranking models over preprocessed practices: Okapi BM25 (the default),
//! a tf-idf vector space model and an LDA topic model.

mod bm25;
mod lda;
mod persist;
mod vsm;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Catalog;
use crate::textproc::{preprocess_document, preprocess_query, BagOfWords, PipelineConfig};

pub use bm25::{bm25_idf, Bm25Index, Bm25Params, Posting};
pub use lda::{LdaIndex, LdaParams, DEFAULT_SEED};
pub use persist::{load_index, save_index, PersistError, INDEX_FORMAT, INDEX_VERSION};
pub use vsm::{cosine, VsmIndex};

#[derive(Debug, Error, PartialEq)]
pub enum RetrievalError {
    #[error("{ids} document ids but {bags} bags")]
    LengthMismatch { ids: usize, bags: usize },
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("cannot train a topic model on an empty corpus")]
    EmptyCorpus,
    #[error("result count k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bm25,
    Vsm,
    Lda,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Bm25 => "bm25",
            ModelKind::Vsm => "vsm",
            ModelKind::Lda => "lda",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bm25" => Ok(ModelKind::Bm25),
            "vsm" => Ok(ModelKind::Vsm),
            "lda" => Ok(ModelKind::Lda),
            other => Err(format!("unknown model `{other}` (expected bm25, vsm or lda)")),
        }
    }
}

/// A model choice together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Bm25(Bm25Params),
    Vsm,
    Lda(LdaParams),
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Bm25(_) => ModelKind::Bm25,
            ModelSpec::Vsm => ModelKind::Vsm,
            ModelSpec::Lda(_) => ModelKind::Lda,
        }
    }
}

impl From<ModelKind> for ModelSpec {
    fn from(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Bm25 => ModelSpec::Bm25(Bm25Params::default()),
            ModelKind::Vsm => ModelSpec::Vsm,
            ModelKind::Lda => ModelSpec::Lda(LdaParams::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermEntry {
    pub id: u32,
    /// Number of documents containing the term.
    pub df: u32,
}

/// Term dictionary with document frequencies. Term ids follow lexicographic
/// term order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: BTreeMap<String, TermEntry>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn get(&self, term: &str) -> Option<TermEntry> {
        self.terms.get(term).copied()
    }

    /// Document frequency; zero for unseen terms.
    pub fn df(&self, term: &str) -> u32 {
        self.get(term).map_or(0, |e| e.df)
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, TermEntry)> + '_ {
        self.terms.iter().map(|(t, e)| (t.as_str(), *e))
    }
}

pub fn build_vocabulary(bags: &[BagOfWords]) -> Vocabulary {
    let mut df: BTreeMap<String, u32> = BTreeMap::new();
    for bag in bags {
        for term in bag.terms() {
            *df.entry(term.to_string()).or_insert(0) += 1;
        }
    }
    let terms = df.into_iter().enumerate().map(|(id, (term, df))| (term, TermEntry { id: id as u32, df })).collect();
    Vocabulary { terms, n_docs: bags.len() }
}

/// BM25 inverse document frequency of `term` in `vocabulary`.
pub fn idf(term: &str, vocabulary: &Vocabulary) -> f64 {
    bm25_idf(vocabulary.n_docs(), vocabulary.df(term))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub practice_id: String,
    pub score: f64,
    /// 1-based position.
    pub rank: usize,
}

/// Sum of `parts` taken in ascending order, so documents whose per-term
/// contributions are the same multiset get bit-identical scores regardless of
/// which terms produced them.
pub(crate) fn ordered_sum(parts: impl IntoIterator<Item = f64>) -> f64 {
    let mut parts: Vec<f64> = parts.into_iter().collect();
    parts.sort_by(f64::total_cmp);
    parts.iter().sum()
}

/// Keeps strictly positive scores, sorts by score descending then id
/// ascending, and truncates to `k`.
pub(crate) fn rank_top_k(doc_ids: &[String], scores: &[f64], k: usize) -> Vec<RankedResult> {
    let mut hits: Vec<(usize, f64)> =
        scores.iter().copied().enumerate().filter(|(_, s)| *s > 0.0 && s.is_finite()).collect();
    hits.sort_by(|a, b| match b.1.partial_cmp(&a.1) {
        Some(Ordering::Equal) | None => doc_ids[a.0].cmp(&doc_ids[b.0]),
        Some(o) => o,
    });
    hits.truncate(k);
    hits.into_iter()
        .enumerate()
        .map(|(i, (doc, score))| RankedResult { practice_id: doc_ids[doc].clone(), score, rank: i + 1 })
        .collect()
}

/// Any built model index.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelIndex {
    Bm25(Bm25Index),
    Vsm(VsmIndex),
    Lda(LdaIndex),
}

impl ModelIndex {
    /// Builds the index described by `spec` from bags aligned with `doc_ids`.
    pub fn build(doc_ids: Vec<String>, bags: &[BagOfWords], spec: &ModelSpec) -> Result<Self, RetrievalError> {
        Ok(match spec {
            ModelSpec::Bm25(p) => ModelIndex::Bm25(Bm25Index::build(doc_ids, bags, *p)?),
            ModelSpec::Vsm => ModelIndex::Vsm(VsmIndex::build(doc_ids, bags)?),
            ModelSpec::Lda(p) => ModelIndex::Lda(LdaIndex::train(doc_ids, bags, p)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelIndex::Bm25(_) => ModelKind::Bm25,
            ModelIndex::Vsm(_) => ModelKind::Vsm,
            ModelIndex::Lda(_) => ModelKind::Lda,
        }
    }

    pub fn doc_ids(&self) -> &[String] {
        match self {
            ModelIndex::Bm25(i) => i.doc_ids(),
            ModelIndex::Vsm(i) => i.doc_ids(),
            ModelIndex::Lda(i) => i.doc_ids(),
        }
    }

    /// Score of every document against a preprocessed query.
    pub fn scores(&self, query: &BagOfWords) -> Vec<f64> {
        match self {
            ModelIndex::Bm25(i) => i.scores(query),
            ModelIndex::Vsm(i) => i.scores(query),
            ModelIndex::Lda(i) => i.scores(query),
        }
    }

    pub fn search_bag(&self, query: &BagOfWords, k: usize) -> Result<Vec<RankedResult>, RetrievalError> {
        if k == 0 {
            return Err(RetrievalError::ZeroK);
        }
        if query.is_empty() {
            return Ok(Vec::new());
        }
        Ok(rank_top_k(self.doc_ids(), &self.scores(query), k))
    }
}

/// Preprocesses `query_text` and returns the top-`k` documents of `index`.
pub fn search(
    index: &ModelIndex,
    pipeline: &PipelineConfig,
    query_text: &str,
    k: usize,
) -> Result<Vec<RankedResult>, RetrievalError> {
    index.search_bag(&preprocess_query(query_text, pipeline), k)
}

/// Preprocessing configuration paired with an index built over a catalog.
#[derive(Debug, Clone)]
pub struct IrEngine {
    pipeline: PipelineConfig,
    index: ModelIndex,
}

impl IrEngine {
    pub fn build(catalog: &Catalog, pipeline: PipelineConfig, spec: &ModelSpec) -> Result<Self, RetrievalError> {
        let bags = document_bags(catalog, &pipeline);
        let ids = catalog.practices().iter().map(|p| p.id.clone()).collect();
        let index = ModelIndex::build(ids, &bags, spec)?;
        Ok(IrEngine { pipeline, index })
    }

    pub fn from_index(index: ModelIndex, pipeline: PipelineConfig) -> Self {
        IrEngine { pipeline, index }
    }

    pub fn index(&self) -> &ModelIndex {
        &self.index
    }

    pub fn pipeline(&self) -> &PipelineConfig {
        &self.pipeline
    }

    pub fn search(&self, query_text: &str, k: usize) -> Result<Vec<RankedResult>, RetrievalError> {
        search(&self.index, &self.pipeline, query_text, k)
    }
}

/// Bags for every practice of `catalog`, in catalog order.
pub fn document_bags(catalog: &Catalog, pipeline: &PipelineConfig) -> Vec<BagOfWords> {
    catalog.practices().iter().map(|p| preprocess_document(&p.indexable_text(), pipeline)).collect()
}
