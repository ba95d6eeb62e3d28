//! Text preprocessing: normalization, tokenization, stopword removal,
//! synonym expansion and Porter stemming, composed into bags of words.

mod porter;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use porter::stem as stem_token;

/// Bundled 179-word English stopword list.
pub const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
/// Bundled noun/adjective synonym lexicon (`word<TAB>syn1,syn2`).
pub const BUNDLED_SYNONYMS: &str = include_str!("../../data/synonyms.tsv");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("synonyms line {line}: expected `word<TAB>synonym,...`")]
    MissingTab { line: usize },
    #[error("synonyms line {line}: `{word}` is not a lowercase ASCII word")]
    NotAWord { line: usize, word: String },
    #[error("synonyms line {line}: synonym `{word}` is a stopword")]
    StopwordSynonym { line: usize, word: String },
}

/// A multiset of processed terms. Terms iterate in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BagOfWords {
    counts: BTreeMap<String, u32>,
    total_len: u32,
}

impl BagOfWords {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut bag = Self::new();
        for t in tokens {
            bag.add(t, 1);
        }
        bag
    }

    /// Adds `count` occurrences of `term`. A zero count is a no-op.
    pub fn add(&mut self, term: impl Into<String>, count: u32) {
        if count == 0 {
            return;
        }
        *self.counts.entry(term.into()).or_insert(0) += count;
        self.total_len += count;
    }

    pub fn count(&self, term: &str) -> u32 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    /// Distinct terms with their counts, sorted by term.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.counts.iter().map(|(t, c)| (t.as_str(), *c))
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> + '_ {
        self.counts.keys().map(String::as_str)
    }

    pub fn distinct_terms(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all counts (document length).
    pub fn total_len(&self) -> u32 {
        self.total_len
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Stopword list, synonym lexicon and query expansion switch.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    stopword_list: Vec<String>,
    stopwords: HashSet<String>,
    synonyms: HashMap<String, Vec<String>>,
    pub expand_synonyms_on_query: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::bundled()
    }
}

impl PipelineConfig {
    /// Bundled stopwords and lexicon; queries are not expanded.
    pub fn bundled() -> Self {
        Self::from_sources(BUNDLED_STOPWORDS, BUNDLED_SYNONYMS).expect("bundled lexicon is valid")
    }

    /// Bundled stopwords with an empty synonym lexicon.
    pub fn without_synonyms() -> Self {
        Self::from_sources(BUNDLED_STOPWORDS, "").expect("bundled stopwords are valid")
    }

    pub fn from_sources(stopwords_txt: &str, synonyms_tsv: &str) -> Result<Self, LexiconError> {
        let stopword_list: Vec<String> =
            stopwords_txt.lines().map(str::trim).filter(|w| !w.is_empty()).map(str::to_string).collect();
        let stopwords: HashSet<String> = stopword_list.iter().cloned().collect();

        let mut synonyms = HashMap::new();
        for (i, line) in synonyms_tsv.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (word, syns) = line.split_once('\t').ok_or(LexiconError::MissingTab { line: line_no })?;
            check_word(word, line_no)?;
            let mut list = Vec::new();
            for syn in syns.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                check_word(syn, line_no)?;
                if stopwords.contains(syn) {
                    return Err(LexiconError::StopwordSynonym { line: line_no, word: syn.to_string() });
                }
                list.push(syn.to_string());
            }
            synonyms.insert(word.to_string(), list);
        }
        Ok(PipelineConfig { stopword_list, stopwords, synonyms, expand_synonyms_on_query: false })
    }

    pub fn with_query_expansion(mut self, on: bool) -> Self {
        self.expand_synonyms_on_query = on;
        self
    }

    pub fn stopword_list(&self) -> &[String] {
        &self.stopword_list
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn synonyms_of(&self, token: &str) -> Option<&[String]> {
        self.synonyms.get(token).map(Vec::as_slice)
    }
}

fn check_word(word: &str, line: usize) -> Result<(), LexiconError> {
    if word.is_empty() || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return Err(LexiconError::NotAWord { line, word: word.to_string() });
    }
    Ok(())
}

/// Drops non-ASCII code points, lowercases, turns punctuation, digits and
/// whitespace into spaces, then collapses space runs and trims.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars().filter(char::is_ascii) {
        if c.is_ascii_alphabetic() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c.to_ascii_lowercase());
        } else {
            pending_space = true;
        }
    }
    out
}

pub fn tokenize(cleaned: &str) -> Vec<String> {
    cleaned.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect()
}

pub fn remove_stopwords(tokens: Vec<String>, config: &PipelineConfig) -> Vec<String> {
    tokens.into_iter().filter(|t| !config.is_stopword(t)).collect()
}

/// Keeps every token and appends its lexicon synonyms right after it.
pub fn expand_synonyms(tokens: Vec<String>, config: &PipelineConfig) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    for t in tokens {
        let syns = config.synonyms_of(&t).map(<[String]>::to_vec);
        out.push(t);
        if let Some(syns) = syns {
            out.extend(syns);
        }
    }
    out
}

fn pipeline(text: &str, config: &PipelineConfig, expand: bool) -> BagOfWords {
    let tokens = remove_stopwords(tokenize(&normalize(text)), config);
    let tokens = if expand { expand_synonyms(tokens, config) } else { tokens };
    BagOfWords::from_tokens(tokens.iter().map(|t| stem_token(t)))
}

pub fn preprocess_document(text: &str, config: &PipelineConfig) -> BagOfWords {
    pipeline(text, config, true)
}

pub fn preprocess_query(text: &str, config: &PipelineConfig) -> BagOfWords {
    pipeline(text, config, config.expand_synonyms_on_query)
}
