//! Core of the ML best-practice catalog: practice corpus and stage taxonomy,
//! text preprocessing, BM25/VSM/LDA ranking, retrieval evaluation and the
//! bridge to a generative language model.

pub mod corpus;
pub mod evaluation;
pub mod glm;
pub mod response;
pub mod retrieval;
pub mod textproc;

pub use corpus::{Catalog, Practice, Stage};
pub use response::{homogenize, AnswerSource, Engine, SearchRecord, SearchResponse};
pub use retrieval::{IrEngine, ModelKind, ModelSpec, RankedResult};
pub use textproc::{BagOfWords, PipelineConfig};
