//! One result shape for both answer back-ends.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Catalog;
use crate::glm::GeneratedPractice;
use crate::retrieval::RankedResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Ir,
    Glm,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Ir => "ir",
            Engine::Glm => "glm",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ir" => Ok(Engine::Ir),
            "glm" => Ok(Engine::Glm),
            other => Err(format!("unknown engine `{other}` (expected ir or glm)")),
        }
    }
}

/// A homogenized result. IR records carry the practice's task and score;
/// generated records have neither.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    /// Practice id for catalog results, title hash for generated ones.
    pub id: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub query: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    pub results: Vec<SearchRecord>,
}

impl SearchResponse {
    /// Removes every engine tag so the answering back-end is not disclosed.
    pub fn blind(mut self) -> Self {
        self.engine = None;
        for r in &mut self.results {
            r.engine = None;
        }
        self
    }
}

/// What a response is built from.
#[derive(Debug, Clone, Copy)]
pub enum AnswerSource<'a> {
    Ir { results: &'a [RankedResult], catalog: &'a Catalog },
    Glm(&'a [GeneratedPractice]),
}

/// Stable identifier of a generated practice, derived from its title.
pub fn title_hash(title: &str) -> String {
    let digest = Sha256::digest(title.as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("glm-{hex}")
}

/// Maps either back-end's output to the shared response shape, preserving
/// result order. Ranked ids unknown to the catalog are dropped.
pub fn homogenize(query: &str, source: AnswerSource<'_>) -> SearchResponse {
    let (engine, results) = match source {
        AnswerSource::Ir { results, catalog } => {
            let records = results
                .iter()
                .filter_map(|r| {
                    let p = catalog.get(&r.practice_id)?;
                    Some(SearchRecord {
                        id: p.id.clone(),
                        title: p.title.clone(),
                        description: (!p.description.is_empty()).then(|| p.description.clone()),
                        task: Some(p.task.clone()),
                        score: Some(r.score),
                        engine: Some(Engine::Ir),
                    })
                })
                .collect();
            (Engine::Ir, records)
        }
        AnswerSource::Glm(practices) => {
            let records = practices
                .iter()
                .map(|g| SearchRecord {
                    id: title_hash(&g.title),
                    title: g.title.clone(),
                    description: g.description.clone(),
                    task: None,
                    score: None,
                    engine: Some(Engine::Glm),
                })
                .collect();
            (Engine::Glm, records)
        }
    };
    SearchResponse { query: query.to_string(), engine: Some(engine), results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ir_records_are_fully_populated() {
        let catalog = Catalog::seed();
        let ranked = [RankedResult { practice_id: "p06".into(), score: 1.5, rank: 1 }];
        let resp = homogenize("missing", AnswerSource::Ir { results: &ranked, catalog: &catalog });
        assert_eq!(resp.engine, Some(Engine::Ir));
        let r = &resp.results[0];
        assert_eq!(r.id, "p06");
        assert!(r.description.is_some() && r.task.is_some());
        assert_eq!(r.score, Some(1.5));
    }

    #[test]
    fn glm_record_without_description_is_title_only() {
        let gen = [GeneratedPractice { title: "Use cross-validation".into(), description: None }];
        let resp = homogenize("q", AnswerSource::Glm(&gen));
        let json = serde_json::to_value(&resp.results[0]).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["engine", "id", "title"]);
    }

    #[test]
    fn empty_sources_give_empty_results() {
        let catalog = Catalog::seed();
        assert!(homogenize("q", AnswerSource::Glm(&[])).results.is_empty());
        assert!(homogenize("q", AnswerSource::Ir { results: &[], catalog: &catalog }).results.is_empty());
    }

    #[test]
    fn blind_strips_engine_everywhere() {
        let gen = [GeneratedPractice { title: "t".into(), description: Some("d".into()) }];
        let body = serde_json::to_string(&homogenize("q", AnswerSource::Glm(&gen)).blind()).unwrap();
        assert!(!body.contains("engine"));
    }

    proptest! {
        #[test]
        fn wire_round_trip(
            titles in prop::collection::vec("[A-Za-z ]{1,20}", 0..6),
            desc in prop::option::of("[a-z .]{0,30}"),
            blind in any::<bool>(),
        ) {
            let gen: Vec<_> = titles.iter().map(|t| GeneratedPractice { title: t.clone(), description: desc.clone() }).collect();
            let mut resp = homogenize("query", AnswerSource::Glm(&gen));
            if blind {
                resp = resp.blind();
            }
            let back: SearchResponse = serde_json::from_str(&serde_json::to_string(&resp).unwrap()).unwrap();
            prop_assert_eq!(back, resp);
        }
    }
}
