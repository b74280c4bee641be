//! Subcommand definitions and dispatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use basa::corpus::Document;
use basa::explain::explain_instance;
use basa::features::{extract_all, Resources};
use basa::synth::write_corpus;
use basa::Level;
use clap::{Arg, ArgMatches, Command};

use crate::config::{read_config_file, ExperimentConfig, KEYS};
use crate::error::{CliError, CliResult, StageExt};
use crate::output::{
    safe_stem, write_config, write_cross_reference, write_explanation, write_features,
    write_metrics, write_models, write_rankings, write_report, write_run, RunSummary,
};
use crate::pipeline::{
    ensure_dir, explain_config, load_or_generate, prepare, rankings, run_experiment, synth_config,
    ModelBundle,
};

fn with_config_flags(cmd: Command) -> Command {
    let cmd = cmd.arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("key = value configuration file"),
    );
    KEYS.iter().fold(cmd, |cmd, (key, help)| {
        cmd.arg(Arg::new(*key).long(*key).value_name("VALUE").help(*help))
    })
}

pub fn build_cli() -> Command {
    Command::new("basa")
        .about("Readability assessment experiments for Filipino texts")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(with_config_flags(Command::new("synth").about("Write a synthetic leveled corpus")))
        .subcommand(with_config_flags(
            Command::new("extract").about("Extract raw feature matrices for the train and test splits"),
        ))
        .subcommand(with_config_flags(
            Command::new("train").about("Train every model and selection variant and write metrics"),
        ))
        .subcommand(with_config_flags(
            Command::new("rank").about("Write Spearman and model-based feature rankings"),
        ))
        .subcommand(with_config_flags(
            Command::new("explain")
                .about("Explain one document with a saved model bundle")
                .arg(Arg::new("model_file").long("model_file").value_name("FILE").required(true))
                .arg(Arg::new("doc").long("doc").value_name("FILE").required(true))
                .arg(
                    Arg::new("class")
                        .long("class")
                        .value_name("LEVEL")
                        .help("class to explain; defaults to the predicted one"),
                ),
        ))
        .subcommand(with_config_flags(Command::new("run").about("Run the full experiment")))
        .subcommand(with_config_flags(
            Command::new("report").about("Render report.md from a previous run's summary.json"),
        ))
}

/// File values first, then flags of the same name on top.
fn config_from(m: &ArgMatches) -> CliResult<ExperimentConfig> {
    let mut values = match m.get_one::<String>("config") {
        Some(path) => read_config_file(Path::new(path))?,
        None => BTreeMap::new(),
    };
    for (key, _) in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            values.insert(key.to_string(), v.clone());
        }
    }
    ExperimentConfig::from_map(&values)
}

/// Parses `args` and runs the chosen subcommand.
pub fn run_cli<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = build_cli()
        .try_get_matches_from(args)
        .map_err(|e| CliError::Usage(e.render().to_string(), e.exit_code()))?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cfg = config_from(sub)?;
    match name {
        "synth" => cmd_synth(&cfg),
        "extract" => cmd_extract(&cfg),
        "train" => cmd_train(&cfg),
        "rank" => cmd_rank(&cfg),
        "explain" => {
            let model = PathBuf::from(sub.get_one::<String>("model_file").expect("required"));
            let doc = PathBuf::from(sub.get_one::<String>("doc").expect("required"));
            let class = sub
                .get_one::<String>("class")
                .map(|c| c.parse::<Level>().map_err(|e| CliError::Config(e.to_string())))
                .transpose()?;
            cmd_explain(&cfg, &model, &doc, class)
        }
        "run" => cmd_run(&cfg),
        "report" => cmd_report(&cfg),
        other => Err(CliError::Config(format!("unknown subcommand `{other}`"))),
    }
}

pub fn cmd_synth(cfg: &ExperimentConfig) -> CliResult<()> {
    let corpus = basa::synth::generate_corpus(&synth_config(cfg)).stage("synth")?;
    let manifest = write_corpus(&corpus, cfg.out.join("corpus")).stage("synth")?;
    println!("{}", manifest.display());
    Ok(())
}

pub fn cmd_extract(cfg: &ExperimentConfig) -> CliResult<()> {
    let corpus = load_or_generate(cfg)?;
    let data = prepare(cfg, &corpus)?;
    let out = ensure_dir(&cfg.out)?;
    write_features(&out, &data)?;
    println!("{}", out.join("features_train.csv").display());
    println!("{}", out.join("features_test.csv").display());
    Ok(())
}

pub fn cmd_train(cfg: &ExperimentConfig) -> CliResult<()> {
    let corpus = load_or_generate(cfg)?;
    let quiet = ExperimentConfig {
        explain_count: 0,
        ..cfg.clone()
    };
    let exp = run_experiment(&quiet, &corpus)?;
    let out = ensure_dir(&cfg.out)?;
    write_config(&out, &cfg.to_key_values())?;
    println!("{}", write_metrics(&out, &exp.metrics_rows())?.display());
    write_models(&out, &exp)?;
    println!("{}", out.join("models").display());
    Ok(())
}

pub fn cmd_rank(cfg: &ExperimentConfig) -> CliResult<()> {
    let corpus = load_or_generate(cfg)?;
    let data = prepare(cfg, &corpus)?;
    let (spearman, globals) = rankings(cfg, &data)?;
    let mut all = vec![spearman];
    for g in &globals {
        all.push(g.ranking.clone());
        all.extend(g.per_class.iter().cloned());
    }
    let out = ensure_dir(&cfg.out)?;
    println!("{}", write_rankings(&out, &all, &data.registry)?.display());
    write_cross_reference(&out, &globals)?;
    Ok(())
}

pub fn cmd_explain(cfg: &ExperimentConfig, model_file: &Path, doc: &Path, class: Option<Level>) -> CliResult<()> {
    let bundle = ModelBundle::load(model_file)?;
    let text = fs::read_to_string(doc)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", doc.display())))?;
    let id = doc
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "doc".into());
    // the label is not used by any extractor
    let document = Document::new(id.clone(), text, class.unwrap_or(Level::L1)).stage("explain")?;
    let registry = basa::features::FeatureRegistry::with_families(&basa::features::Family::ALL)
        .subset(&bundle.model.feature_names)
        .stage("explain")?;
    let resources = Resources::new(registry, bundle.language_models.clone());
    let vector = extract_all(&document, &resources).stage("explain")?;
    let target = match class {
        Some(c) => c,
        None => bundle.model.predict_label(&vector).stage("explain")?,
    };
    let ecfg = explain_config(cfg, cfg.explain_seed());
    let explanation = explain_instance(&bundle.model, &vector, &bundle.discretizer, target, &ecfg).stage("explain")?;
    let out = ensure_dir(&cfg.out)?;
    let path = write_explanation(&out, &safe_stem(&id), &explanation)?;
    print!("{}", explanation.to_text());
    println!("{}", path.display());
    Ok(())
}

pub fn cmd_run(cfg: &ExperimentConfig) -> CliResult<()> {
    let corpus = load_or_generate(cfg)?;
    let exp = run_experiment(cfg, &corpus)?;
    write_run(&exp)?;
    print!("{}", basa::eval::metrics_markdown(&exp.metrics_rows()));
    println!("{}", cfg.out.join("report.md").display());
    Ok(())
}

pub fn cmd_report(cfg: &ExperimentConfig) -> CliResult<()> {
    let summary = RunSummary::load(&cfg.out.join("summary.json"))?;
    println!("{}", write_report(&cfg.out, &summary)?.display());
    Ok(())
}
