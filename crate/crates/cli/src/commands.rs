use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use mlpractice_core::corpus::load_catalog;
use mlpractice_core::evaluation::synthetic::{generate, SyntheticConfig};
use mlpractice_core::evaluation::{compare_models, export_report, load_ground_truth, EvalReport};
use mlpractice_core::glm::{build_prompt, parse_practices, FixtureGenerator, FixtureSet, Generator, HttpGenerator};
use mlpractice_core::retrieval::{load_index, save_index};
use mlpractice_core::{homogenize, AnswerSource, Catalog, Engine, IrEngine, ModelKind, PipelineConfig, SearchResponse};
use mlpractice_service::ServiceConfig;

use crate::args::{EvaluateArgs, IndexArgs, IngestArgs, SearchArgs, ServeArgs};

fn read_catalog(path: &Path) -> Result<Catalog> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_catalog(BufReader::new(file)).with_context(|| format!("invalid corpus {}", path.display()))
}

/// The explicit path, else the configured corpus, else the bundled seed.
fn resolve_catalog(flag: Option<&Path>, config: &ServiceConfig) -> Result<Catalog> {
    match flag.or(config.corpus.as_deref()) {
        Some(path) => read_catalog(path),
        None => Ok(Catalog::seed()),
    }
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

pub fn ingest(args: &IngestArgs, config: &ServiceConfig, out: &mut impl Write) -> Result<()> {
    let catalog = resolve_catalog(args.corpus.as_deref(), config)?;
    writeln!(out, "{:<22} {:>9}", "stage", "practices")?;
    for (stage, practices) in catalog.group_by_stage() {
        writeln!(out, "{:<22} {:>9}", stage.as_str(), practices.len())?;
    }
    writeln!(out, "{:<22} {:>9}", "total", catalog.len())?;
    Ok(())
}

pub fn index(args: &IndexArgs, config: &ServiceConfig, seed: u64, out: &mut impl Write) -> Result<()> {
    let catalog = resolve_catalog(args.corpus.as_deref(), config)?;
    let kind = ModelKind::from(args.model);
    let engine = IrEngine::build(&catalog, PipelineConfig::bundled(), &args.params.spec(kind, seed))?;
    let file = File::create(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    save_index(engine.index(), BufWriter::new(file))?;
    writeln!(out, "wrote {kind} index over {} practices to {}", catalog.len(), args.out.display())?;
    Ok(())
}

fn generator(fixtures: Option<&Path>, config: &ServiceConfig) -> Result<Arc<dyn Generator>> {
    Ok(match fixtures {
        Some(dir) => Arc::new(FixtureGenerator::new(FixtureSet::load_dir(dir)?)),
        None => Arc::new(HttpGenerator::new(config.glm.clone())?),
    })
}

pub fn search(args: &SearchArgs, config: &ServiceConfig, seed: u64, out: &mut impl Write) -> Result<()> {
    if args.q.trim().is_empty() {
        bail!("--q must not be empty");
    }
    let catalog = resolve_catalog(args.corpus.as_deref(), config)?;
    let response = match Engine::from(args.engine) {
        Engine::Ir => {
            let pipeline = PipelineConfig::bundled();
            let engine = match args.index.as_deref().or(config.index.as_deref()) {
                Some(path) => {
                    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
                    IrEngine::from_index(load_index(BufReader::new(file))?, pipeline)
                }
                None => IrEngine::build(&catalog, pipeline, &args.params.spec(args.model.into(), seed))?,
            };
            let ranked = engine.search(&args.q, args.k.into())?;
            homogenize(&args.q, AnswerSource::Ir { results: &ranked, catalog: &catalog })
        }
        Engine::Glm => {
            let generator = generator(args.glm_fixtures.as_deref(), config)?;
            let prompt = build_prompt(&args.q)?;
            let completion = runtime()?.block_on(async { generator.generate(&prompt).await })?;
            let mut practices = parse_practices(&completion);
            practices.truncate(args.k.into());
            homogenize(&args.q, AnswerSource::Glm(&practices))
        }
    };
    let response = if config.blind_mode { response.blind() } else { response };
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &response)?;
        writeln!(out)?;
    } else {
        print_table(&response, out)?;
    }
    Ok(())
}

fn print_table(response: &SearchResponse, out: &mut impl Write) -> Result<()> {
    if response.results.is_empty() {
        writeln!(out, "no results for \"{}\"", response.query)?;
        return Ok(());
    }
    writeln!(out, "{:>3}  {:<20} {:>8}  {:<18} title", "#", "id", "score", "task")?;
    for (i, r) in response.results.iter().enumerate() {
        let score = r.score.map(|s| format!("{s:.4}")).unwrap_or_else(|| "-".into());
        let task = r.task.as_deref().unwrap_or("-");
        writeln!(out, "{:>3}  {:<20} {:>8}  {:<18} {}", i + 1, r.id, score, task, r.title)?;
        if let Some(d) = &r.description {
            writeln!(out, "{:>5}{d}", "")?;
        }
    }
    Ok(())
}

fn summarize(report: &EvalReport, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{} documents, {} queries", report.documents, report.queries)?;
    writeln!(out, "{:<6} {:>8} {:>8} {:>8} {:>8}", "model", "P@1", "R@1", "P@10", "R@10")?;
    for m in &report.models {
        let at = |v: &[f64], k: usize| v.get(k - 1).map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{:<6} {:>8} {:>8} {:>8} {:>8}",
            m.model.as_str(),
            at(&m.mean_precision, 1),
            at(&m.mean_recall, 1),
            at(&m.mean_precision, 10),
            at(&m.mean_recall, 10)
        )?;
    }
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs, seed: u64, out: &mut impl Write) -> Result<()> {
    let (catalog, truth) = if args.synthetic {
        let bench = generate(&SyntheticConfig::default());
        (bench.catalog, bench.truth)
    } else {
        let (Some(corpus), Some(truth)) = (&args.corpus, &args.truth) else {
            bail!("--corpus and --truth are required without --synthetic");
        };
        let file = File::open(truth).with_context(|| format!("cannot open {}", truth.display()))?;
        (read_catalog(corpus)?, load_ground_truth(BufReader::new(file))?)
    };
    let specs: Vec<_> = args.models.iter().map(|m| args.params.spec((*m).into(), seed)).collect();
    let report = compare_models(&catalog, &truth, &specs, &PipelineConfig::bundled(), args.k_max.into())?;
    std::fs::write(&args.out, export_report(&report))
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    summarize(&report, out)?;
    writeln!(out, "wrote {}", args.out.display())?;
    Ok(())
}

pub fn serve(args: &ServeArgs, mut config: ServiceConfig) -> Result<()> {
    if let Some(h) = args.host {
        config.host = h;
    }
    if let Some(p) = args.port {
        config.port = p;
    }
    if let Some(c) = &args.corpus {
        config.corpus = Some(c.clone());
    }
    if let Some(i) = &args.index {
        config.index = Some(i.clone());
    }
    if let Some(f) = &args.feedback {
        config.feedback = f.clone();
    }
    if let Some(u) = &args.glm_url {
        config.glm.url = u.clone();
    }
    config.blind_mode |= args.blind;
    let generator = match &args.glm_fixtures {
        Some(dir) => Some(generator(Some(dir), &config)?),
        None => None,
    };
    runtime()?.block_on(mlpractice_service::run(config, generator))?;
    Ok(())
}
