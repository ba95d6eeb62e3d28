//! Latent Dirichlet allocation trained with collapsed Gibbs sampling.
//!
//! Queries are folded in against the trained topic-word distributions and
//! ranked by cosine similarity between topic mixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_vocabulary, rank_top_k, RankedResult, RetrievalError, Vocabulary};
use crate::textproc::BagOfWords;

pub const DEFAULT_SEED: u64 = 20_230_605;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    pub topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    pub iterations: usize,
    /// Gibbs sweeps used when folding in a query.
    pub inference_passes: usize,
    pub seed: u64,
}

impl Default for LdaParams {
    fn default() -> Self {
        Self::with_topics(20)
    }
}

impl LdaParams {
    /// Defaults with `alpha = 50 / topics`.
    pub fn with_topics(topics: usize) -> Self {
        LdaParams {
            topics,
            alpha: 50.0 / topics.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            inference_passes: 50,
            seed: DEFAULT_SEED,
        }
    }

    fn validate(&self) -> Result<(), RetrievalError> {
        if self.topics < 2 {
            return Err(RetrievalError::InvalidParams(format!("need at least 2 topics, got {}", self.topics)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(RetrievalError::InvalidParams(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(RetrievalError::InvalidParams(format!("beta must be > 0, got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaIndex {
    vocabulary: Vocabulary,
    /// Per-document topic distributions, `docs x topics`.
    theta: Vec<Vec<f64>>,
    /// Per-topic word distributions, `topics x terms`.
    phi: Vec<Vec<f64>>,
    params: LdaParams,
    doc_ids: Vec<String>,
}

/// Draws an index with probability proportional to `weights`.
fn sample(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

fn token_ids(vocabulary: &Vocabulary, bag: &BagOfWords) -> Vec<usize> {
    bag.iter()
        .filter_map(|(t, c)| vocabulary.get(t).map(|e| (e.id as usize, c)))
        .flat_map(|(id, c)| std::iter::repeat_n(id, c as usize))
        .collect()
}

impl LdaIndex {
    pub fn train(doc_ids: Vec<String>, bags: &[BagOfWords], params: &LdaParams) -> Result<Self, RetrievalError> {
        params.validate()?;
        if doc_ids.len() != bags.len() {
            return Err(RetrievalError::LengthMismatch { ids: doc_ids.len(), bags: bags.len() });
        }
        if bags.iter().all(BagOfWords::is_empty) {
            return Err(RetrievalError::EmptyCorpus);
        }
        let vocabulary = build_vocabulary(bags);
        let n_topics = params.topics;
        let n_terms = vocabulary.len();
        let (alpha, beta) = (params.alpha, params.beta);
        let v_beta = n_terms as f64 * beta;

        let docs: Vec<Vec<usize>> = bags.iter().map(|b| token_ids(&vocabulary, b)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

        let mut doc_topic = vec![vec![0u32; n_topics]; docs.len()];
        let mut topic_term = vec![vec![0u32; n_terms]; n_topics];
        let mut topic_total = vec![0u32; n_topics];
        let mut assignments: Vec<Vec<usize>> = Vec::with_capacity(docs.len());
        for (d, words) in docs.iter().enumerate() {
            let z: Vec<usize> = words.iter().map(|_| rng.random_range(0..n_topics)).collect();
            for (&w, &t) in words.iter().zip(&z) {
                doc_topic[d][t] += 1;
                topic_term[t][w] += 1;
                topic_total[t] += 1;
            }
            assignments.push(z);
        }

        let mut weights = vec![0.0; n_topics];
        for _ in 0..params.iterations {
            for (d, words) in docs.iter().enumerate() {
                for (i, &w) in words.iter().enumerate() {
                    let old = assignments[d][i];
                    doc_topic[d][old] -= 1;
                    topic_term[old][w] -= 1;
                    topic_total[old] -= 1;
                    for (t, p) in weights.iter_mut().enumerate() {
                        *p = (doc_topic[d][t] as f64 + alpha) * (topic_term[t][w] as f64 + beta)
                            / (topic_total[t] as f64 + v_beta);
                    }
                    let new = sample(&mut rng, &weights);
                    assignments[d][i] = new;
                    doc_topic[d][new] += 1;
                    topic_term[new][w] += 1;
                    topic_total[new] += 1;
                }
            }
        }

        let t_alpha = n_topics as f64 * alpha;
        let theta = docs
            .iter()
            .zip(&doc_topic)
            .map(|(words, counts)| {
                counts.iter().map(|&c| (c as f64 + alpha) / (words.len() as f64 + t_alpha)).collect()
            })
            .collect();
        let phi = topic_term
            .iter()
            .zip(&topic_total)
            .map(|(counts, &total)| counts.iter().map(|&c| (c as f64 + beta) / (total as f64 + v_beta)).collect())
            .collect();

        Ok(LdaIndex { vocabulary, theta, phi, params: params.clone(), doc_ids })
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn params(&self) -> &LdaParams {
        &self.params
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn theta(&self) -> &[Vec<f64>] {
        &self.theta
    }

    pub fn phi(&self) -> &[Vec<f64>] {
        &self.phi
    }

    /// Topic mixture of a query obtained by Gibbs sampling its topic
    /// assignments against fixed topic-word distributions. Every query starts
    /// from the index seed, so inference does not depend on query order.
    /// Returns `None` when no query term is in the vocabulary.
    pub fn infer(&self, query: &BagOfWords) -> Option<Vec<f64>> {
        let words = token_ids(&self.vocabulary, query);
        if words.is_empty() {
            return None;
        }
        let n_topics = self.params.topics;
        let alpha = self.params.alpha;
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        let mut counts = vec![0u32; n_topics];
        let mut z: Vec<usize> = words.iter().map(|_| rng.random_range(0..n_topics)).collect();
        for &t in &z {
            counts[t] += 1;
        }
        let mut weights = vec![0.0; n_topics];
        for _ in 0..self.params.inference_passes {
            for (i, &w) in words.iter().enumerate() {
                counts[z[i]] -= 1;
                for (t, p) in weights.iter_mut().enumerate() {
                    *p = (counts[t] as f64 + alpha) * self.phi[t][w];
                }
                z[i] = sample(&mut rng, &weights);
                counts[z[i]] += 1;
            }
        }
        let denom = words.len() as f64 + n_topics as f64 * alpha;
        Some(counts.iter().map(|&c| (c as f64 + alpha) / denom).collect())
    }

    pub fn scores(&self, query: &BagOfWords) -> Vec<f64> {
        let Some(q) = self.infer(query) else {
            return vec![0.0; self.theta.len()];
        };
        self.theta.iter().map(|theta| dense_cosine(&q, theta)).collect()
    }

    pub fn search(&self, query: &BagOfWords, k: usize) -> Vec<RankedResult> {
        if query.is_empty() || k == 0 {
            return Vec::new();
        }
        rank_top_k(&self.doc_ids, &self.scores(query), k)
    }
}

fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
