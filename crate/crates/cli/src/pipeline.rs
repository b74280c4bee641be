//! The experiment pipeline: split, language models, extraction,
//! standardization, selection, training, scoring and explanation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use basa::corpus::{load_corpus, Document, LabeledCorpus};
use basa::eval::{compute_metrics, stratified_split_indices, MetricsReport, MetricsRow};
use basa::explain::{explain_instance_z, fit_discretizer, Discretizer, ExplainConfig, LocalExplanation};
use basa::features::{
    extract_matrix, sentences_by_level, standardize, Family, FeatureRegistry, Resources,
    StandardizationStats,
};
use basa::interpret::{
    combine_rankings, cross_reference_top, linear_global_weights, rank_by_spearman,
    rf_global_importance, two_sample_ttest, Direction, FeatureRanking, RankedFeature,
    RankingSource, TTestResult,
};
use basa::lm::LevelLanguageModels;
use basa::models::{train, ModelKind, ModelParams, TrainedModel};
use basa::synth::{generate_corpus, SynthConfig};
use basa::{FeatureMatrix, Level};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SelectionMode};
use crate::error::{CliError, CliResult, StageExt};

pub const BUNDLE_VERSION: u32 = 1;

/// Everything `explain` needs to score a new document: the model, the
/// discretizer fitted on its training z-values and, when the model uses
/// perplexity features, the language models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub version: u32,
    pub model: TrainedModel,
    pub discretizer: Discretizer,
    pub language_models: Option<LevelLanguageModels>,
}

impl ModelBundle {
    pub fn save(&self, path: &Path) -> CliResult<()> {
        let json = serde_json::to_string(self)
            .map_err(basa::Error::from)
            .stage("save")?;
        fs::write(path, json).stage("save")
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read model {}: {e}", path.display())))?;
        let bundle: ModelBundle = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("model {} is not a valid bundle: {e}", path.display())))?;
        if bundle.version != BUNDLE_VERSION {
            return Err(CliError::Config(format!(
                "model bundle version {} is not supported",
                bundle.version
            )));
        }
        Ok(bundle)
    }
}

pub fn load_or_generate(cfg: &ExperimentConfig) -> CliResult<LabeledCorpus> {
    match &cfg.manifest {
        Some(path) => load_corpus(path).stage("ingest"),
        None => generate_corpus(&synth_config(cfg)).stage("synth"),
    }
}

pub fn synth_config(cfg: &ExperimentConfig) -> SynthConfig {
    SynthConfig {
        docs_per_level: cfg.docs_per_level,
        seed: cfg.corpus_seed,
        ..SynthConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub documents: usize,
    pub per_level: BTreeMap<Level, usize>,
    pub train: usize,
    pub test: usize,
}

/// Split corpus with raw and standardized feature matrices. Language models
/// and standardization are fitted on the training split only.
pub struct PreparedData {
    pub summary: CorpusSummary,
    pub train_docs: Vec<Document>,
    pub test_docs: Vec<Document>,
    pub registry: FeatureRegistry,
    pub language_models: Option<LevelLanguageModels>,
    pub train_raw: FeatureMatrix,
    pub test_raw: FeatureMatrix,
    pub train_z: FeatureMatrix,
    pub test_z: FeatureMatrix,
    pub stats: StandardizationStats,
}

fn log_warnings(stage: &str, warnings: &[String]) {
    for w in warnings {
        log::warn!("[{stage}] {w}");
    }
}

pub fn prepare(cfg: &ExperimentConfig, corpus: &LabeledCorpus) -> CliResult<PreparedData> {
    corpus.require_all_levels().stage("split")?;
    let (train_idx, test_idx) =
        stratified_split_indices(&corpus.labels(), cfg.test_fraction, cfg.split_seed()).stage("split")?;
    let train_docs = corpus.select(&train_idx).documents;
    let test_docs = corpus.select(&test_idx).documents;

    let registry = FeatureRegistry::with_families(&cfg.features);
    let language_models = if registry.contains_family(Family::Lm) {
        Some(LevelLanguageModels::train(&sentences_by_level(&train_docs), cfg.lm_alpha).stage("lm")?)
    } else {
        None
    };
    let resources = Resources::new(registry.clone(), language_models.clone());
    let (train_raw, w1) = if language_models.is_some() {
        extract_out_of_fold(&train_docs, &registry, cfg.lm_alpha)?
    } else {
        extract_matrix(&train_docs, &resources).stage("extract")?
    };
    let (test_raw, w2) = extract_matrix(&test_docs, &resources).stage("extract")?;
    log_warnings("extract", &w1);
    log_warnings("extract", &w2);

    let (train_values, stats) = standardize(&train_raw.names, &train_raw.values, None).stage("standardize")?;
    let (test_values, _) =
        standardize(&test_raw.names, &test_raw.values, Some(&stats)).stage("standardize")?;
    let train_z = train_raw.with_values(train_values).stage("standardize")?;
    let test_z = test_raw.with_values(test_values).stage("standardize")?;

    Ok(PreparedData {
        summary: CorpusSummary {
            documents: corpus.len(),
            per_level: corpus.level_counts.clone(),
            train: train_docs.len(),
            test: test_docs.len(),
        },
        train_docs,
        test_docs,
        registry,
        language_models,
        train_raw,
        test_raw,
        train_z,
        test_z,
        stats,
    })
}

/// Folds used for out-of-fold perplexity features of training documents.
pub const LM_FOLDS: usize = 5;

/// Extracts training documents so that no document is scored by a language
/// model that saw it: fold `f` (every `LM_FOLDS`-th document of each level)
/// is scored by models trained on the other folds.
pub fn extract_out_of_fold(
    docs: &[Document],
    registry: &FeatureRegistry,
    alpha: f64,
) -> CliResult<(FeatureMatrix, Vec<String>)> {
    let mut seen: BTreeMap<Level, usize> = BTreeMap::new();
    let fold_of: Vec<usize> = docs
        .iter()
        .map(|d| {
            let n = seen.entry(d.label).or_default();
            *n += 1;
            (*n - 1) % LM_FOLDS
        })
        .collect();
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; docs.len()];
    let mut warnings = Vec::new();
    for fold in 0..LM_FOLDS {
        let (inside, outside): (Vec<usize>, Vec<usize>) =
            (0..docs.len()).partition(|&i| fold_of[i] == fold);
        if inside.is_empty() {
            continue;
        }
        let fit: Vec<Document> = outside.iter().map(|&i| docs[i].clone()).collect();
        let scored: Vec<Document> = inside.iter().map(|&i| docs[i].clone()).collect();
        let lms = LevelLanguageModels::train(&sentences_by_level(&fit), alpha).stage("lm")?;
        let resources = Resources::new(registry.clone(), Some(lms));
        let (m, w) = extract_matrix(&scored, &resources).stage("extract")?;
        warnings.extend(w);
        for (r, &i) in inside.iter().enumerate() {
            rows[i] = Some(m.values.row(r).to_vec());
        }
    }
    let names = registry.names();
    let flat: Vec<f64> = rows.into_iter().flat_map(|r| r.unwrap_or_default()).collect();
    let values = ndarray::Array2::from_shape_vec((docs.len(), names.len()), flat)
        .map_err(|e| basa::Error::DimensionMismatch(e.to_string()))
        .stage("extract")?;
    let matrix = FeatureMatrix::new(
        docs.iter().map(|d| d.id.clone()).collect(),
        docs.iter().map(|d| d.label).collect(),
        names,
        values,
    )
    .stage("extract")?;
    Ok((matrix, warnings))
}

/// Trains on the standardized training columns `features` and attaches the
/// matching standardization so the model also accepts raw feature vectors.
pub fn train_on(
    data: &PreparedData,
    cfg: &ExperimentConfig,
    kind: ModelKind,
    features: &[String],
) -> CliResult<TrainedModel> {
    let x = data.train_z.select_columns(features).stage("train")?;
    let model = train(&x, &cfg.train_config(kind)).stage("train")?;
    model
        .with_standardization(data.stats.subset(features).stage("train")?)
        .stage("train")
}

/// A model's global view over all features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalView {
    pub kind: ModelKind,
    /// Ranking used for `global` selection.
    pub ranking: FeatureRanking,
    /// Per-class weight rankings (linear models only).
    pub per_class: Vec<FeatureRanking>,
    /// Features in every class's top k (linear models only).
    pub cross_reference: Option<Vec<String>>,
}

/// Linear models are ranked by mean absolute weight over classes; forests
/// by impurity importance with Spearman-signed direction.
pub fn global_view(
    model: &TrainedModel,
    data: &FeatureMatrix,
    k: usize,
) -> CliResult<GlobalView> {
    match &model.params {
        ModelParams::Forest { .. } => Ok(GlobalView {
            kind: model.kind,
            ranking: rf_global_importance(model, Some(data), k).stage("rank")?,
            per_class: Vec::new(),
            cross_reference: None,
        }),
        ModelParams::Linear(params) => {
            let per_class = linear_global_weights(model, k).stage("rank")?;
            let n_classes = params.weights.len() as f64;
            let mut entries: Vec<RankedFeature> = model
                .feature_names
                .iter()
                .enumerate()
                .map(|(j, name)| RankedFeature {
                    feature: name.clone(),
                    score: params.weights.iter().map(|w| w[j].abs()).sum::<f64>() / n_classes,
                    direction: Direction::Unsigned,
                })
                .collect();
            entries.sort_by(|a, b| b.score.total_cmp(&a.score));
            entries.truncate(k);
            let cross_reference = if per_class.iter().all(|r| !r.is_empty()) {
                Some(cross_reference_top(&per_class, k).stage("rank")?)
            } else {
                None
            };
            Ok(GlobalView {
                kind: model.kind,
                ranking: FeatureRanking {
                    entries,
                    source: RankingSource::LinearWeights,
                    class_context: None,
                    warnings: Vec::new(),
                },
                per_class,
                cross_reference,
            })
        }
    }
}

pub struct ModeOutcome {
    pub kind: ModelKind,
    pub mode: SelectionMode,
    pub features: Vec<String>,
    pub model: TrainedModel,
    pub predictions: Vec<Level>,
    pub metrics: MetricsReport,
}

impl ModeOutcome {
    pub fn label(&self) -> String {
        format!("{} + {}", self.kind.label(), self.mode.label())
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.kind, self.mode)
    }
}

pub struct Experiment {
    pub config: ExperimentConfig,
    pub data: PreparedData,
    pub spearman: FeatureRanking,
    pub globals: Vec<GlobalView>,
    pub outcomes: Vec<ModeOutcome>,
    pub word_count_ttest: Option<TTestResult>,
    pub explained: Option<usize>,
    pub explanations: Vec<LocalExplanation>,
}

/// Rankings of one run: Spearman over all features and each model's global
/// view, fitted on the training split.
pub fn rankings(cfg: &ExperimentConfig, data: &PreparedData) -> CliResult<(FeatureRanking, Vec<GlobalView>)> {
    let spearman = rank_by_spearman(&data.train_z, cfg.k).stage("rank")?;
    let all = data.train_z.names.clone();
    let mut globals = Vec::new();
    for kind in &cfg.models {
        let full = train_on(data, cfg, *kind, &all)?;
        globals.push(global_view(&full, &data.train_z, cfg.k)?);
    }
    Ok((spearman, globals))
}

fn selected_features(
    mode: SelectionMode,
    all: &[String],
    spearman: &FeatureRanking,
    global: &GlobalView,
) -> Vec<String> {
    match mode {
        SelectionMode::All => all.to_vec(),
        SelectionMode::Spearman => spearman.names(),
        SelectionMode::Global => global.ranking.names(),
        SelectionMode::Combined => combine_rankings(spearman, &global.ranking),
    }
}

fn word_count_ttest(data: &PreparedData) -> Option<TTestResult> {
    let j = data.train_raw.column_index("word_count").ok()?;
    let column = data.train_raw.column(j);
    let pick = |level: Level| -> Vec<f64> {
        data.train_raw
            .labels
            .iter()
            .zip(column.iter())
            .filter(|(l, _)| **l == level)
            .map(|(_, v)| *v)
            .collect()
    };
    two_sample_ttest(&pick(Level::L1), &pick(Level::L3)).ok()
}

/// Runs every (model, selection) pair; explains up to `explain_count` test
/// documents with the first model's combined (or last) variant.
pub fn run_experiment(cfg: &ExperimentConfig, corpus: &LabeledCorpus) -> CliResult<Experiment> {
    let data = prepare(cfg, corpus)?;
    let (spearman, globals) = rankings(cfg, &data)?;
    let all = data.train_z.names.clone();
    let golds = data.test_z.labels.clone();
    let mut outcomes = Vec::new();
    for global in &globals {
        for mode in &cfg.selections {
            let features = selected_features(*mode, &all, &spearman, global);
            if features.is_empty() {
                return Err(CliError::Stage {
                    stage: "select",
                    source: basa::Error::EmptyInput(format!("{mode} selection chose no features")),
                });
            }
            let model = train_on(&data, cfg, global.kind, &features)?;
            let test = data.test_z.select_columns(&features).stage("evaluate")?;
            let predictions = model.predict_matrix_z(&test).stage("evaluate")?;
            let metrics = compute_metrics(&golds, &predictions).stage("evaluate")?;
            log_warnings("evaluate", &metrics.warnings);
            outcomes.push(ModeOutcome {
                kind: global.kind,
                mode: *mode,
                features,
                model,
                predictions,
                metrics,
            });
        }
    }

    let explained = outcomes
        .iter()
        .position(|o| o.kind == cfg.models[0] && o.mode == SelectionMode::Combined)
        .or_else(|| outcomes.iter().rposition(|o| o.kind == cfg.models[0]));
    let mut explanations = Vec::new();
    if let Some(i) = explained {
        let outcome = &outcomes[i];
        let discretizer = discretizer_for(&data, &outcome.features)?;
        let test = data.test_z.select_columns(&outcome.features).stage("explain")?;
        for (n, row) in test.values.rows().into_iter().take(cfg.explain_count).enumerate() {
            let ecfg = explain_config(cfg, cfg.explain_seed().wrapping_add(n as u64));
            let target = outcome.predictions[n];
            explanations.push(
                explain_instance_z(&outcome.model, &test.doc_ids[n], row, &discretizer, target, &ecfg)
                    .stage("explain")?,
            );
        }
    }
    Ok(Experiment {
        config: cfg.clone(),
        word_count_ttest: word_count_ttest(&data),
        data,
        spearman,
        globals,
        outcomes,
        explained,
        explanations,
    })
}

pub fn explain_config(cfg: &ExperimentConfig, seed: u64) -> ExplainConfig {
    ExplainConfig {
        n_samples: cfg.explain_samples,
        kernel_width: cfg.kernel_width,
        top_k: cfg.explain_top_k,
        lambda: cfg.explain_lambda,
        seed,
    }
}

pub fn discretizer_for(data: &PreparedData, features: &[String]) -> CliResult<Discretizer> {
    let x = data.train_z.select_columns(features).stage("explain")?;
    fit_discretizer(&x.names, &x.values).stage("explain")
}

/// Model bundle for an outcome; language models are kept only when the model
/// reads perplexity features.
pub fn bundle_for(data: &PreparedData, outcome: &ModeOutcome) -> CliResult<ModelBundle> {
    let uses_lm = outcome
        .features
        .iter()
        .any(|f| data.registry.family_of(f) == Some(Family::Lm));
    Ok(ModelBundle {
        version: BUNDLE_VERSION,
        model: outcome.model.clone(),
        discretizer: discretizer_for(data, &outcome.features)?,
        language_models: if uses_lm { data.language_models.clone() } else { None },
    })
}

impl Experiment {
    pub fn metrics_rows(&self) -> Vec<MetricsRow> {
        self.outcomes
            .iter()
            .map(|o| MetricsRow {
                model: o.label(),
                report: o.metrics.clone(),
            })
            .collect()
    }

    /// Spearman ranking, then each model's global ranking and per-class
    /// rankings.
    pub fn all_rankings(&self) -> Vec<FeatureRanking> {
        let mut out = vec![self.spearman.clone()];
        for g in &self.globals {
            out.push(g.ranking.clone());
            out.extend(g.per_class.iter().cloned());
        }
        out
    }
}

pub fn ensure_dir(path: &Path) -> CliResult<PathBuf> {
    fs::create_dir_all(path).stage("output")?;
    Ok(path.to_path_buf())
}
