//! Generated benchmark with known relevance.
//!
//! Every document is a handful of words drawn from a small shared pool. Each
//! query owns one rare word that is planted in one to `max_relevant`
//! documents; those documents are exactly its relevant set. The query text is
//! the rare word plus one shared word as noise.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GroundTruth, Judgment};
use crate::corpus::{Catalog, Origin, Practice, Source, Stage};

const CONSONANTS: &[u8] = b"bdfgkmnprtvz";
const VOWELS: &[u8] = b"aiou";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub documents: usize,
    pub queries: usize,
    pub shared_words: usize,
    pub words_per_document: usize,
    pub max_relevant: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            documents: 150,
            queries: 85,
            shared_words: 40,
            words_per_document: 5,
            max_relevant: 3,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticBenchmark {
    pub catalog: Catalog,
    pub truth: GroundTruth,
    /// The rare word owned by each query, aligned with the ground truth.
    pub rare_words: Vec<String>,
}

/// Pronounceable word for `index`: three consonant-vowel syllables closed by
/// `k`, which no stemming rule touches.
pub fn pseudo_word(index: usize) -> String {
    let base = CONSONANTS.len() * VOWELS.len();
    let mut n = index;
    let mut w = String::with_capacity(7);
    for _ in 0..3 {
        let syl = n % base;
        n /= base;
        w.push(CONSONANTS[syl / VOWELS.len()] as char);
        w.push(VOWELS[syl % VOWELS.len()] as char);
    }
    assert!(n == 0, "pseudo word index {index} out of range");
    w.push('k');
    w
}

pub fn generate(config: &SyntheticConfig) -> SyntheticBenchmark {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let shared: Vec<String> = (0..config.shared_words).map(|i| pseudo_word(10_000 + i)).collect();
    let rare: Vec<String> = (0..config.queries).map(pseudo_word).collect();

    let mut texts: Vec<Vec<String>> = (0..config.documents)
        .map(|_| (0..config.words_per_document).map(|_| shared[rng.random_range(0..shared.len())].clone()).collect())
        .collect();

    let mut judgments = Vec::with_capacity(config.queries);
    for word in &rare {
        let count = rng.random_range(1..=config.max_relevant.min(config.documents));
        let docs = sample(&mut rng, config.documents, count);
        let mut relevant = BTreeSet::new();
        for d in docs {
            texts[d].push(word.clone());
            relevant.insert(doc_id(d));
        }
        let noise = &shared[rng.random_range(0..shared.len())];
        judgments.push(Judgment { query: format!("{word} {noise}"), relevant });
    }

    let practices = texts
        .into_iter()
        .enumerate()
        .map(|(d, words)| Practice {
            id: doc_id(d),
            title: words.join(" "),
            description: String::new(),
            stage: Stage::ALL[d % Stage::ALL.len()],
            task: "synthetic".to_string(),
            source: Source { origin: Origin::Other, url: None },
        })
        .collect();

    SyntheticBenchmark {
        catalog: Catalog::new(practices).expect("generated ids are unique"),
        truth: GroundTruth::new(judgments).expect("rare words are unique"),
        rare_words: rare,
    }
}

fn doc_id(d: usize) -> String {
    format!("s{:03}", d + 1)
}
