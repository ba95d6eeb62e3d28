use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mlpractice_core::retrieval::{Bm25Params, LdaParams, DEFAULT_SEED};
use mlpractice_core::{Engine, ModelKind, ModelSpec};

/// Search, browse and evaluate a catalog of machine-learning best practices.
#[derive(Debug, Parser)]
#[command(name = "mlpractice", version)]
pub struct Cli {
    /// TOML configuration file. MLPRACTICE_* environment variables override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Seed for randomized models (LDA).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a practices file and report counts per stage.
    Ingest(IngestArgs),
    /// Build a model index and write it to disk.
    Index(IndexArgs),
    /// Run one query against the IR engine or the generative back-end.
    Search(SearchArgs),
    /// Compare ranking models against a ground-truth query set.
    Evaluate(EvaluateArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Bm25,
    Vsm,
    Lda,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Bm25 => ModelKind::Bm25,
            ModelArg::Vsm => ModelKind::Vsm,
            ModelArg::Lda => ModelKind::Lda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Ir,
    Glm,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Ir => Engine::Ir,
            EngineArg::Glm => Engine::Glm,
        }
    }
}

/// Model hyperparameters shared by the commands that build indexes.
#[derive(Debug, Clone, Args)]
pub struct ModelParams {
    #[arg(long, default_value_t = 1.2)]
    pub k1: f64,
    #[arg(long, default_value_t = 0.75)]
    pub b: f64,
    /// LDA topic count.
    #[arg(long, default_value_t = 20)]
    pub topics: usize,
    /// LDA Gibbs sweeps over the corpus.
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
}

impl ModelParams {
    pub fn spec(&self, model: ModelKind, seed: u64) -> ModelSpec {
        match model {
            ModelKind::Bm25 => ModelSpec::Bm25(Bm25Params { k1: self.k1, b: self.b }),
            ModelKind::Vsm => ModelSpec::Vsm,
            ModelKind::Lda => {
                ModelSpec::Lda(LdaParams { iterations: self.iterations, seed, ..LdaParams::with_topics(self.topics) })
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Practices file (JSON lines). Defaults to the configured corpus, then the bundled seed.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bm25")]
    pub model: ModelArg,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[command(flatten)]
    pub params: ModelParams,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub q: String,
    #[arg(long, value_enum, default_value = "ir")]
    pub engine: EngineArg,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u16).range(1..=50))]
    pub k: u16,
    /// Print the SearchResponse as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    #[arg(long, value_enum, default_value = "bm25")]
    pub model: ModelArg,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Use a saved index instead of building one.
    #[arg(long, value_name = "PATH")]
    pub index: Option<PathBuf>,
    /// Answer generative queries from recorded fixtures instead of the endpoint.
    #[arg(long, value_name = "DIR")]
    pub glm_fixtures: Option<PathBuf>,
    #[command(flatten)]
    pub params: ModelParams,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, required_unless_present = "synthetic", conflicts_with = "synthetic")]
    pub corpus: Option<PathBuf>,
    #[arg(long, required_unless_present = "synthetic", conflicts_with = "synthetic")]
    pub truth: Option<PathBuf>,
    /// Use the generated 150-document, 85-query benchmark.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "bm25,vsm,lda")]
    pub models: Vec<ModelArg>,
    #[arg(long, default_value = "report.csv", value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u16).range(1..))]
    pub k_max: u16,
    #[command(flatten)]
    pub params: ModelParams,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub host: Option<std::net::IpAddr>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub feedback: Option<PathBuf>,
    /// Hide which back-end answered each search.
    #[arg(long)]
    pub blind: bool,
    #[arg(long)]
    pub glm_url: Option<String>,
    /// Answer generative queries from recorded fixtures instead of the endpoint.
    #[arg(long, value_name = "DIR")]
    pub glm_fixtures: Option<PathBuf>,
}
