//! Offline evaluation of ranking models: Precision@k and Recall@k over a
//! ground-truth query set, macro-averaged per model, with CSV export.

pub mod synthetic;

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Catalog;
use crate::retrieval::{IrEngine, ModelKind, ModelSpec, RetrievalError};
use crate::textproc::PipelineConfig;

pub const DEFAULT_K_MAX: usize = 10;
pub const CSV_HEADER: &str = "model,k,mean_precision,mean_recall";

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("recall is undefined for an empty relevant set")]
    EmptyRelevant,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error("ground truth for query `{query}` references unknown practice `{id}`")]
    MissingPractice { query: String, id: String },
    #[error("ground truth line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("ground truth line {line}: duplicate query `{query}`")]
    DuplicateQuery { line: usize, query: String },
    #[error("ground truth line {line}: query `{query}` has no relevant practices")]
    NoRelevant { line: usize, query: String },
    #[error("at least one model is required")]
    NoModels,
    #[error("failed to read ground truth: {0}")]
    Io(#[from] std::io::Error),
}

fn hits<S: AsRef<str>>(retrieved: &[S], relevant: &BTreeSet<String>, k: usize) -> usize {
    retrieved.iter().take(k).filter(|id| relevant.contains(id.as_ref())).count()
}

/// Relevant items in the top `k`, divided by `k`. Missing slots count as
/// misses when fewer than `k` items were retrieved.
pub fn precision_at_k<S: AsRef<str>>(
    retrieved: &[S],
    relevant: &BTreeSet<String>,
    k: usize,
) -> Result<f64, MetricError> {
    if k == 0 {
        return Err(MetricError::ZeroK);
    }
    Ok(hits(retrieved, relevant, k) as f64 / k as f64)
}

/// Relevant items in the top `k`, divided by the number of relevant items.
pub fn recall_at_k<S: AsRef<str>>(retrieved: &[S], relevant: &BTreeSet<String>, k: usize) -> Result<f64, MetricError> {
    if k == 0 {
        return Err(MetricError::ZeroK);
    }
    if relevant.is_empty() {
        return Err(MetricError::EmptyRelevant);
    }
    Ok(hits(retrieved, relevant, k) as f64 / relevant.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub query: String,
    pub relevant: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    judgments: Vec<Judgment>,
}

impl GroundTruth {
    pub fn new(judgments: Vec<Judgment>) -> Result<Self, EvalError> {
        let mut seen = HashSet::new();
        for (i, j) in judgments.iter().enumerate() {
            if j.relevant.is_empty() {
                return Err(EvalError::NoRelevant { line: i + 1, query: j.query.clone() });
            }
            if !seen.insert(j.query.as_str()) {
                return Err(EvalError::DuplicateQuery { line: i + 1, query: j.query.clone() });
            }
        }
        Ok(GroundTruth { judgments })
    }

    pub fn judgments(&self) -> &[Judgment] {
        &self.judgments
    }

    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    /// Fails on the first relevant id that is not in `ids`.
    pub fn check_ids<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<(), EvalError> {
        let known: HashSet<&str> = ids.into_iter().collect();
        for j in &self.judgments {
            if let Some(missing) = j.relevant.iter().find(|id| !known.contains(id.as_str())) {
                return Err(EvalError::MissingPractice { query: j.query.clone(), id: missing.clone() });
            }
        }
        Ok(())
    }
}

/// Reads `{"query": ..., "relevant": [...]}` lines.
pub fn load_ground_truth<R: BufRead>(reader: R) -> Result<GroundTruth, EvalError> {
    let mut judgments = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let j: Judgment =
            serde_json::from_str(&line).map_err(|e| EvalError::Malformed { line: line_no, message: e.to_string() })?;
        if j.relevant.is_empty() {
            return Err(EvalError::NoRelevant { line: line_no, query: j.query });
        }
        if !seen.insert(j.query.clone()) {
            return Err(EvalError::DuplicateQuery { line: line_no, query: j.query });
        }
        judgments.push(j);
    }
    Ok(GroundTruth { judgments })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEvaluation {
    pub query: String,
    pub retrieved: Vec<String>,
    /// `hits[k - 1]` relevant items among the top k.
    pub hits: Vec<usize>,
    pub relevant_count: usize,
    /// `precision[k - 1]` is P@k.
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEvaluation {
    pub model: ModelKind,
    pub mean_precision: Vec<f64>,
    pub mean_recall: Vec<f64>,
    pub per_query: Vec<QueryEvaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub k_max: usize,
    pub documents: usize,
    pub queries: usize,
    pub models: Vec<ModelEvaluation>,
}

impl EvalReport {
    pub fn model(&self, kind: ModelKind) -> Option<&ModelEvaluation> {
        self.models.iter().find(|m| m.model == kind)
    }
}

/// Exact macro-average of per-query ratios `hits / denominator`, rounded
/// once to `f64`.
fn exact_mean(ratios: impl Iterator<Item = (usize, usize)>) -> f64 {
    let mut count: u128 = 0;
    let mut sum = Ratio::<u128>::from_integer(0);
    for (hits, denom) in ratios {
        sum += Ratio::new(hits as u128, denom as u128);
        count += 1;
    }
    if count == 0 {
        return 0.0;
    }
    let mean = sum / count;
    *mean.numer() as f64 / *mean.denom() as f64
}

fn mean_curves(per_query: &[QueryEvaluation], k_max: usize) -> (Vec<f64>, Vec<f64>) {
    let precision = (1..=k_max).map(|k| exact_mean(per_query.iter().map(|q| (q.hits[k - 1], k)))).collect();
    let recall = (1..=k_max).map(|k| exact_mean(per_query.iter().map(|q| (q.hits[k - 1], q.relevant_count)))).collect();
    (precision, recall)
}

/// Macro-averaged P@k and R@k for `k = 1..=k_max`. Means are computed in
/// exact rational arithmetic. Queries run in parallel; results keep
/// ground-truth order.
pub fn evaluate_model(engine: &IrEngine, truth: &GroundTruth, k_max: usize) -> Result<ModelEvaluation, EvalError> {
    if k_max == 0 {
        return Err(MetricError::ZeroK.into());
    }
    truth.check_ids(engine.index().doc_ids().iter().map(String::as_str))?;
    let per_query = truth
        .judgments()
        .par_iter()
        .map(|j| {
            let retrieved: Vec<String> = engine.search(&j.query, k_max)?.into_iter().map(|r| r.practice_id).collect();
            let mut precision = Vec::with_capacity(k_max);
            let mut recall = Vec::with_capacity(k_max);
            for k in 1..=k_max {
                precision.push(precision_at_k(&retrieved, &j.relevant, k)?);
                recall.push(recall_at_k(&retrieved, &j.relevant, k)?);
            }
            let hits = (1..=k_max).map(|k| hits(&retrieved, &j.relevant, k)).collect();
            Ok(QueryEvaluation {
                query: j.query.clone(),
                retrieved,
                hits,
                relevant_count: j.relevant.len(),
                precision,
                recall,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let (mean_precision, mean_recall) = mean_curves(&per_query, k_max);
    Ok(ModelEvaluation { model: engine.index().kind(), mean_precision, mean_recall, per_query })
}

/// Builds each model over the same catalog and preprocessing and evaluates
/// it against `truth`.
pub fn compare_models(
    catalog: &Catalog,
    truth: &GroundTruth,
    models: &[ModelSpec],
    pipeline: &PipelineConfig,
    k_max: usize,
) -> Result<EvalReport, EvalError> {
    if models.is_empty() {
        return Err(EvalError::NoModels);
    }
    truth.check_ids(catalog.practices().iter().map(|p| p.id.as_str()))?;
    let models = models
        .iter()
        .map(|spec| {
            let engine = IrEngine::build(catalog, pipeline.clone(), spec)?;
            evaluate_model(&engine, truth, k_max)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvalReport { k_max, documents: catalog.len(), queries: truth.len(), models })
}

/// CSV with header `model,k,mean_precision,mean_recall`, rows ordered by model
/// then k, six-decimal fixed point, LF line endings.
pub fn export_report(report: &EvalReport) -> Vec<u8> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for m in &report.models {
        for (i, (p, r)) in m.mean_precision.iter().zip(&m.mean_recall).enumerate() {
            writeln!(out, "{},{},{:.6},{:.6}", m.model, i + 1, p, r).expect("writing to a String");
        }
    }
    out.into_bytes()
}
