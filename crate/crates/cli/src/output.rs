//! Files written by the subcommands. Everything here is a pure function of
//! the experiment, so reruns with the same config produce the same bytes.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use basa::eval::{metrics_markdown, write_metrics_csv, MetricsRow};
use basa::explain::LocalExplanation;
use basa::features::FeatureRegistry;
use basa::interpret::{write_rankings_csv, FeatureRanking, TTestResult};
use basa::FeatureMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, StageExt};
use crate::pipeline::{bundle_for, ensure_dir, CorpusSummary, Experiment, GlobalView, PreparedData};

/// Features chosen by one (model, selection) variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub label: String,
    pub file_stem: String,
    pub features: Vec<String>,
}

/// Everything `report` needs, stored as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: String,
    pub corpus: CorpusSummary,
    pub metrics: Vec<MetricsRow>,
    pub variants: Vec<VariantSummary>,
    pub spearman: FeatureRanking,
    pub globals: Vec<GlobalView>,
    pub word_count_ttest: Option<TTestResult>,
    pub explained_by: Option<String>,
    pub explanations: Vec<LocalExplanation>,
}

impl RunSummary {
    pub fn from_experiment(exp: &Experiment) -> Self {
        RunSummary {
            config: exp.config.to_key_values(),
            corpus: exp.data.summary.clone(),
            metrics: exp.metrics_rows(),
            variants: exp
                .outcomes
                .iter()
                .map(|o| VariantSummary {
                    label: o.label(),
                    file_stem: o.file_stem(),
                    features: o.features.clone(),
                })
                .collect(),
            spearman: exp.spearman.clone(),
            globals: exp.globals.clone(),
            word_count_ttest: exp.word_count_ttest,
            explained_by: exp.explained.map(|i| exp.outcomes[i].label()),
            explanations: exp.explanations.clone(),
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{} is not a run summary: {e}", path.display())))
    }
}

fn create(path: &Path, stage: &'static str) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).stage(stage)?))
}

/// Keeps file names portable whatever the document id looks like.
pub fn safe_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn write_config(out: &Path, text: &str) -> CliResult<()> {
    fs::write(out.join("config.txt"), text).stage("output")
}

pub fn write_metrics(out: &Path, rows: &[MetricsRow]) -> CliResult<PathBuf> {
    let path = out.join("metrics.csv");
    write_metrics_csv(create(&path, "output")?, rows).stage("output")?;
    Ok(path)
}

pub fn write_rankings(out: &Path, rankings: &[FeatureRanking], registry: &FeatureRegistry) -> CliResult<PathBuf> {
    let path = out.join("rankings.csv");
    write_rankings_csv(create(&path, "output")?, rankings, registry).stage("output")?;
    Ok(path)
}

/// One line per model that has a cross-reference set.
pub fn write_cross_reference(out: &Path, globals: &[GlobalView]) -> CliResult<()> {
    let mut text = String::new();
    for g in globals {
        if let Some(set) = &g.cross_reference {
            let _ = writeln!(text, "{}: {}", g.kind, set.join(","));
        }
    }
    if !text.is_empty() {
        fs::write(out.join("cross_reference.txt"), text).stage("output")?;
    }
    Ok(())
}

/// Writes `<stem>.json` and `<stem>.txt` under `out/explanations`.
pub fn write_explanation(out: &Path, stem: &str, e: &LocalExplanation) -> CliResult<PathBuf> {
    let dir = ensure_dir(&out.join("explanations"))?;
    let json = dir.join(format!("{stem}.json"));
    fs::write(&json, e.to_json().stage("output")? + "\n").stage("output")?;
    fs::write(dir.join(format!("{stem}.txt")), e.to_text()).stage("output")?;
    Ok(json)
}

pub fn write_features(out: &Path, data: &PreparedData) -> CliResult<()> {
    write_matrix(&out.join("features_train.csv"), &data.train_raw)?;
    write_matrix(&out.join("features_test.csv"), &data.test_raw)?;
    let stats = serde_json::to_string_pretty(&data.stats)
        .map_err(basa::Error::from)
        .stage("output")?;
    fs::write(out.join("standardization.json"), stats + "\n").stage("output")
}

fn write_matrix(path: &Path, m: &FeatureMatrix) -> CliResult<()> {
    m.write_csv(create(path, "output")?).stage("output")
}

pub fn write_models(out: &Path, exp: &Experiment) -> CliResult<()> {
    let dir = ensure_dir(&out.join("models"))?;
    for outcome in &exp.outcomes {
        let bundle = bundle_for(&exp.data, outcome)?;
        bundle.save(&dir.join(format!("{}.json", outcome.file_stem())))?;
    }
    Ok(())
}

pub fn write_summary(out: &Path, summary: &RunSummary) -> CliResult<()> {
    let json = serde_json::to_string_pretty(summary)
        .map_err(basa::Error::from)
        .stage("output")?;
    fs::write(out.join("summary.json"), json + "\n").stage("output")
}

pub fn write_report(out: &Path, summary: &RunSummary) -> CliResult<PathBuf> {
    let path = out.join("report.md");
    fs::write(&path, render_report(summary)).stage("report")?;
    Ok(path)
}

/// Every output of `run`.
pub fn write_run(exp: &Experiment) -> CliResult<RunSummary> {
    let out = ensure_dir(&exp.config.out)?;
    write_config(&out, &exp.config.to_key_values())?;
    write_metrics(&out, &exp.metrics_rows())?;
    write_rankings(&out, &exp.all_rankings(), &exp.data.registry)?;
    write_cross_reference(&out, &exp.globals)?;
    write_models(&out, exp)?;
    for (i, e) in exp.explanations.iter().enumerate() {
        write_explanation(&out, &format!("{:02}_{}", i + 1, safe_stem(&e.doc_id)), e)?;
    }
    let summary = RunSummary::from_experiment(exp);
    write_summary(&out, &summary)?;
    write_report(&out, &summary)?;
    Ok(summary)
}

fn ranking_table(out: &mut String, ranking: &FeatureRanking) {
    out.push_str("| Rank | Feature | Score | Direction |\n|---|---|---|---|\n");
    for (i, e) in ranking.entries.iter().enumerate() {
        let _ = writeln!(out, "| {} | {} | {:.4} | {} |", i + 1, e.feature, e.score, e.direction);
    }
    if !ranking.warnings.is_empty() {
        out.push_str("\nWarnings:\n\n");
        for w in &ranking.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out.push('\n');
}

pub fn render_report(s: &RunSummary) -> String {
    let mut out = String::from("# Readability experiment report\n\n## Corpus\n\n");
    let levels: Vec<String> = s
        .corpus
        .per_level
        .iter()
        .map(|(l, n)| format!("{l}: {n}"))
        .collect();
    let _ = writeln!(
        out,
        "{} documents ({}); {} train, {} test.\n",
        s.corpus.documents,
        levels.join(", "),
        s.corpus.train,
        s.corpus.test
    );

    out.push_str("## Metrics\n\nWeighted precision, recall and F1 on the held-out split.\n\n");
    out.push_str(&metrics_markdown(&s.metrics));
    out.push('\n');

    out.push_str("## Selected features\n\n");
    for v in &s.variants {
        let _ = writeln!(out, "- {} ({}): {}", v.label, v.features.len(), v.features.join(", "));
    }

    out.push_str("\n## Spearman ranking\n\n");
    ranking_table(&mut out, &s.spearman);

    for g in &s.globals {
        let _ = writeln!(out, "## Global ranking: {}\n", g.kind.label());
        ranking_table(&mut out, &g.ranking);
        for r in &g.per_class {
            if let Some(level) = r.class_context {
                let _ = writeln!(out, "### {} weights for {level}\n", g.kind.label());
            }
            ranking_table(&mut out, r);
        }
        if let Some(set) = &g.cross_reference {
            let _ = writeln!(out, "Present in every class's top list: {}\n", set.join(", "));
        }
    }

    out.push_str("## Word count, L1 vs L3\n\n");
    match &s.word_count_ttest {
        Some(t) => {
            let _ = writeln!(
                out,
                "Welch t = {:.4}, df = {:.2}, p = {:.3e}\n",
                t.t_statistic, t.degrees_of_freedom, t.p_value
            );
        }
        None => out.push_str("not available\n\n"),
    }

    out.push_str("## Local explanations\n\n");
    match &s.explained_by {
        Some(label) if !s.explanations.is_empty() => {
            let _ = writeln!(out, "Model: {label}\n");
            for e in &s.explanations {
                let _ = writeln!(out, "```\n{}```\n", e.to_text());
            }
        }
        _ => out.push_str("none\n"),
    }
    out
}
