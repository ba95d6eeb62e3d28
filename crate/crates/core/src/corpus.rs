//! The practice catalog: schema, JSON-lines ingestion and the stage/task
//! taxonomy used for systematic browsing.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seed catalog bundled with the crate.
pub const SEED_PRACTICES: &str = include_str!("../data/seed_practices.jsonl");

/// A stage of the machine-learning workflow. The order of the variants is the
/// pipeline order used for grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    ModelRequirements,
    DataCollection,
    DataCleaning,
    FeatureEngineering,
    DataLabeling,
    ModelTraining,
    ModelEvaluation,
    ModelDeployment,
    ModelMonitoring,
    SupportTasks,
}

impl Stage {
    pub const ALL: [Stage; 10] = [
        Stage::ModelRequirements,
        Stage::DataCollection,
        Stage::DataCleaning,
        Stage::FeatureEngineering,
        Stage::DataLabeling,
        Stage::ModelTraining,
        Stage::ModelEvaluation,
        Stage::ModelDeployment,
        Stage::ModelMonitoring,
        Stage::SupportTasks,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::ModelRequirements => "ModelRequirements",
            Stage::DataCollection => "DataCollection",
            Stage::DataCleaning => "DataCleaning",
            Stage::FeatureEngineering => "FeatureEngineering",
            Stage::DataLabeling => "DataLabeling",
            Stage::ModelTraining => "ModelTraining",
            Stage::ModelEvaluation => "ModelEvaluation",
            Stage::ModelDeployment => "ModelDeployment",
            Stage::ModelMonitoring => "ModelMonitoring",
            Stage::SupportTasks => "SupportTasks",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown stage `{0}`")]
pub struct UnknownStage(pub String);

impl FromStr for Stage {
    type Err = UnknownStage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL.iter().copied().find(|stage| stage.as_str() == s).ok_or_else(|| UnknownStage(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    QaCoded,
    Guidebook,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Practice {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
    pub stage: Stage,
    pub task: String,
    pub source: Source,
}

impl Practice {
    /// Text fed to the indexer: title followed by the description.
    pub fn indexable_text(&self) -> String {
        if self.description.is_empty() {
            self.title.clone()
        } else {
            format!("{} {}", self.title, self.description)
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed practice record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: invalid stage `{value}`")]
    InvalidStage { line: usize, value: String },
    #[error("line {line}: duplicate practice id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: practice `{id}` has an empty title")]
    EmptyTitle { line: usize, id: String },
    #[error("line {line}: practice id must not be empty")]
    EmptyId { line: usize },
    #[error("failed to read corpus: {0}")]
    Io(#[from] std::io::Error),
}

/// Wire shape of one line; the stage is kept as a string so an unknown value
/// can be reported by name rather than as a generic serde error.
#[derive(Deserialize)]
struct RawPractice {
    id: String,
    title: String,
    #[serde(default)]
    description: String,
    stage: String,
    task: String,
    source: Source,
}

/// An immutable, ordered collection of practices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    practices: Vec<Practice>,
}

impl Catalog {
    pub fn new(practices: Vec<Practice>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for (i, p) in practices.iter().enumerate() {
            validate(p, i + 1, &mut seen)?;
        }
        Ok(Catalog { practices })
    }

    /// The seed catalog shipped with the crate.
    pub fn seed() -> Self {
        load_catalog(SEED_PRACTICES.as_bytes()).expect("bundled seed catalog is valid")
    }

    pub fn practices(&self) -> &[Practice] {
        &self.practices
    }

    pub fn len(&self) -> usize {
        self.practices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.practices.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Practice> {
        self.practices.iter().find(|p| p.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    /// Practices matching every provided filter, in catalog order.
    pub fn filter(&self, stage: Option<Stage>, task: Option<&str>) -> Vec<&Practice> {
        self.practices
            .iter()
            .filter(|p| stage.is_none_or(|s| p.stage == s))
            .filter(|p| task.is_none_or(|t| p.task == t))
            .collect()
    }

    /// Buckets keyed by every stage in pipeline order; empty stages map to
    /// empty lists.
    pub fn group_by_stage(&self) -> BTreeMap<Stage, Vec<&Practice>> {
        let mut groups: BTreeMap<Stage, Vec<&Practice>> = Stage::ALL.iter().map(|s| (*s, Vec::new())).collect();
        for p in &self.practices {
            groups.entry(p.stage).or_default().push(p);
        }
        groups
    }

    /// Distinct task labels of a stage, in first-appearance order.
    pub fn tasks(&self, stage: Stage) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.practices
            .iter()
            .filter(|p| p.stage == stage)
            .filter(|p| seen.insert(p.task.as_str()))
            .map(|p| p.task.as_str())
            .collect()
    }
}

fn validate<'a>(p: &'a Practice, line: usize, seen: &mut HashSet<&'a str>) -> Result<(), CorpusError> {
    if p.id.is_empty() {
        return Err(CorpusError::EmptyId { line });
    }
    if p.title.trim().is_empty() {
        return Err(CorpusError::EmptyTitle { line, id: p.id.clone() });
    }
    if !seen.insert(p.id.as_str()) {
        return Err(CorpusError::DuplicateId { line, id: p.id.clone() });
    }
    Ok(())
}

/// Reads a JSON-lines practice stream. Blank lines are skipped; line numbers
/// in errors are 1-based physical lines.
pub fn load_catalog<R: BufRead>(reader: R) -> Result<Catalog, CorpusError> {
    let mut practices = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawPractice = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        let stage = raw.stage.parse::<Stage>().map_err(|e| CorpusError::InvalidStage { line: line_no, value: e.0 })?;
        if raw.id.is_empty() {
            return Err(CorpusError::EmptyId { line: line_no });
        }
        if raw.title.trim().is_empty() {
            return Err(CorpusError::EmptyTitle { line: line_no, id: raw.id });
        }
        if !ids.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId { line: line_no, id: raw.id });
        }
        practices.push(Practice {
            id: raw.id,
            title: raw.title,
            description: raw.description,
            stage,
            task: raw.task,
            source: raw.source,
        });
    }
    Ok(Catalog { practices })
}

/// Free-function form of [`Catalog::filter`].
pub fn filter_practices<'a>(catalog: &'a Catalog, stage: Option<Stage>, task: Option<&str>) -> Vec<&'a Practice> {
    catalog.filter(stage, task)
}

/// Free-function form of [`Catalog::group_by_stage`].
pub fn group_by_stage(catalog: &Catalog) -> BTreeMap<Stage, Vec<&Practice>> {
    catalog.group_by_stage()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, stage: &str) -> String {
        format!(
            r#"{{"id":"{id}","title":"Title {id}","stage":"{stage}","task":"t","description":"","source":{{"origin":"guidebook"}}}}"#
        )
    }

    fn catalog(lines: &[String]) -> Catalog {
        load_catalog(lines.join("\n").as_bytes()).unwrap()
    }

    #[test]
    fn empty_stream_is_empty_catalog() {
        let c = load_catalog("".as_bytes()).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn single_line_from_schema() {
        let src = r#"{"id":"p1","title":"Use a validation split","stage":"ModelEvaluation","task":"validation","description":"...","source":{"origin":"guidebook"}}"#;
        let c = load_catalog(src.as_bytes()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.practices()[0].stage, Stage::ModelEvaluation);
        assert_eq!(c.practices()[0].source.origin, Origin::Guidebook);
    }

    #[test]
    fn duplicate_id_is_named() {
        let err =
            load_catalog([line("p1", "DataCleaning"), line("p1", "DataCleaning")].join("\n").as_bytes()).unwrap_err();
        match err {
            CorpusError::DuplicateId { id, line } => {
                assert_eq!(id, "p1");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(load_catalog([line("p1", "DataCleaning"), line("p1", "DataCleaning")].join("\n").as_bytes())
            .unwrap_err()
            .to_string()
            .contains("p1"));
    }

    #[test]
    fn malformed_line_carries_line_number() {
        let src = format!("{}\n{{not json\n", line("p1", "DataCleaning"));
        match load_catalog(src.as_bytes()).unwrap_err() {
            CorpusError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn invalid_stage_is_named() {
        let err = load_catalog(line("p1", "Bogus").as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::InvalidStage { ref value, .. } if value == "Bogus"));
        assert!(err.to_string().contains("Bogus"));
    }

    #[test]
    fn empty_title_rejected() {
        let src = r#"{"id":"p1","title":"  ","stage":"DataCleaning","task":"t","source":{"origin":"other"}}"#;
        assert!(matches!(load_catalog(src.as_bytes()), Err(CorpusError::EmptyTitle { .. })));
    }

    #[test]
    fn filter_by_stage_keeps_order() {
        let c = catalog(&[line("a", "DataCleaning"), line("b", "ModelTraining"), line("c", "DataCleaning")]);
        let ids: Vec<_> = c.filter(Some(Stage::DataCleaning), None).iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["a", "c"]);
        assert_eq!(c.filter(None, None).len(), 3);
        assert!(c.filter(Some(Stage::DataCleaning), Some("nonexistent")).is_empty());
    }

    #[test]
    fn grouping_has_all_stages() {
        let empty = Catalog::default();
        let groups = empty.group_by_stage();
        assert_eq!(groups.len(), 10);
        assert!(groups.values().all(|v| v.is_empty()));
        assert_eq!(groups.keys().copied().collect::<Vec<_>>(), Stage::ALL.to_vec());

        let c = catalog(&[line("a", "DataCleaning")]);
        let groups = c.group_by_stage();
        let non_empty: Vec<_> = groups.iter().filter(|(_, v)| !v.is_empty()).map(|(s, _)| *s).collect();
        assert_eq!(non_empty, [Stage::DataCleaning]);
    }

    #[test]
    fn stage_round_trips_through_strings() {
        for s in Stage::ALL {
            assert_eq!(s.as_str().parse::<Stage>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{s}\""));
        }
        assert!("dataCleaning".parse::<Stage>().is_err());
    }

    #[test]
    fn seed_covers_every_stage() {
        let seed = Catalog::seed();
        assert!(seed.len() >= 20);
        assert!(seed.group_by_stage().values().all(|v| !v.is_empty()));
    }
}
