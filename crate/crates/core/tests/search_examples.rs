use mlpractice_core::corpus::{Catalog, Origin, Practice, Source, Stage};
use mlpractice_core::evaluation::synthetic::{generate, SyntheticConfig};
use mlpractice_core::evaluation::{compare_models, DEFAULT_K_MAX};
use mlpractice_core::retrieval::LdaParams;
use mlpractice_core::textproc::stem_token;
use mlpractice_core::{IrEngine, ModelKind, ModelSpec, PipelineConfig};

fn practice(id: &str, title: &str) -> Practice {
    Practice {
        id: id.into(),
        title: title.into(),
        description: String::new(),
        stage: Stage::DataCleaning,
        task: "t".into(),
        source: Source { origin: Origin::Other, url: None },
    }
}

fn bm25(catalog: &Catalog) -> IrEngine {
    IrEngine::build(catalog, PipelineConfig::bundled(), &ModelSpec::from(ModelKind::Bm25)).unwrap()
}

fn ids(engine: &IrEngine, q: &str) -> Vec<String> {
    engine.search(q, 10).unwrap().into_iter().map(|r| r.practice_id).collect()
}

#[test]
fn two_document_corpus() {
    let catalog =
        Catalog::new(vec![practice("d1", "cross validation"), practice("d2", "data cleaning missing values")]).unwrap();
    let engine = bm25(&catalog);
    assert_eq!(ids(&engine, "cross validation"), ["d1"]);
    assert!(ids(&engine, "zzzz unknown").is_empty());
}

#[test]
fn equal_scores_break_ties_by_id() {
    let catalog = Catalog::new(vec![practice("d2", "feature scaling"), practice("d1", "feature scaling")]).unwrap();
    assert_eq!(ids(&bm25(&catalog), "feature scaling"), ["d1", "d2"]);
}

#[test]
fn seed_query_top_hit_mentions_cleaning() {
    let catalog = Catalog::seed();
    let engine = bm25(&catalog);
    let results = engine.search("data cleaning", 10).unwrap();
    assert!(!results.is_empty());
    let top = catalog.get(&results[0].practice_id).unwrap();
    let clean = stem_token("clean");
    let top_stems: Vec<String> = top.title.split_whitespace().map(|w| stem_token(&w.to_lowercase())).collect();
    assert!(top_stems.contains(&clean), "{}", top.title);
}

#[test]
fn lda_search_is_repeatable() {
    let catalog = Catalog::seed();
    let spec = ModelSpec::Lda(LdaParams { iterations: 100, ..LdaParams::default() });
    let a = IrEngine::build(&catalog, PipelineConfig::bundled(), &spec).unwrap();
    let b = IrEngine::build(&catalog, PipelineConfig::bundled(), &spec).unwrap();
    for q in ["monitor drift", "hyperparameter tuning", "data cleaning"] {
        assert_eq!(a.search(q, 10).unwrap(), b.search(q, 10).unwrap());
        assert_eq!(a.search(q, 10).unwrap(), a.search(q, 10).unwrap());
    }
}

#[test]
fn synthetic_benchmark_orders_models() {
    let bench = generate(&SyntheticConfig::default());
    let specs = [ModelSpec::from(ModelKind::Bm25), ModelSpec::Vsm, ModelSpec::Lda(LdaParams::default())];
    let report =
        compare_models(&bench.catalog, &bench.truth, &specs, &PipelineConfig::bundled(), DEFAULT_K_MAX).unwrap();
    let at = |m: ModelKind, k: usize| {
        let e = report.model(m).unwrap();
        (e.mean_precision[k - 1], e.mean_recall[k - 1])
    };
    for k in [1, 10] {
        eprintln!(
            "k={k} bm25={:?} vsm={:?} lda={:?}",
            at(ModelKind::Bm25, k),
            at(ModelKind::Vsm, k),
            at(ModelKind::Lda, k)
        );
        assert!(at(ModelKind::Bm25, k).0 >= at(ModelKind::Lda, k).0);
        assert!(at(ModelKind::Vsm, k).0 >= at(ModelKind::Lda, k).0);
    }
}
