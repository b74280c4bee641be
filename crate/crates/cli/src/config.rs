//! `key = value` experiment configuration. Every key can also be given as a
//! command-line flag of the same name, which takes precedence over the file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use basa::features::Family;
use basa::models::{FeaturesPerSplit, ModelKind, TrainConfig};

use crate::error::{CliError, CliResult};

/// Recognized keys with their help text.
pub const KEYS: &[(&str, &str)] = &[
    ("manifest", "corpus manifest CSV (path,label); a synthetic corpus is generated when unset"),
    ("docs_per_level", "synthetic documents per level"),
    ("corpus_seed", "seed of the synthetic corpus"),
    ("features", "feature families, e.g. trad,lex,syll,lm,morph"),
    ("model", "model kinds: logreg, svm, rf (comma-separated)"),
    ("selection", "selection modes: all, spearman, global, combined (comma-separated)"),
    ("k", "features kept per ranking"),
    ("test_fraction", "held-out share of each level"),
    ("seed", "master seed for splitting, training and explanation"),
    ("out", "output directory"),
    ("lm_alpha", "additive smoothing of the n-gram language models"),
    ("l2_lambda", "L2 penalty of the linear models"),
    ("learning_rate", "step size of the linear models"),
    ("epochs", "passes of the linear models"),
    ("n_trees", "random forest size"),
    ("max_depth", "maximum tree depth"),
    ("features_per_split", "features tried per split: sqrt or all"),
    ("bootstrap", "bootstrap sample per tree: true or false"),
    ("explain_count", "test documents explained by `run`"),
    ("explain_samples", "perturbations per explanation"),
    ("explain_top_k", "conditions kept per explanation"),
    ("explain_lambda", "ridge penalty of the local surrogate"),
    ("kernel_width", "proximity kernel width; `auto` is 0.75 * sqrt(n_features)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SelectionMode {
    All,
    Spearman,
    Global,
    Combined,
}

impl SelectionMode {
    /// Row label suffix used in result tables.
    pub fn label(self) -> &'static str {
        match self {
            SelectionMode::All => "All",
            SelectionMode::Spearman => "Corr",
            SelectionMode::Global => "Global",
            SelectionMode::Combined => "Combined",
        }
    }
}

impl FromStr for SelectionMode {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(SelectionMode::All),
            "spearman" | "spearman_topk" | "corr" => Ok(SelectionMode::Spearman),
            "global" | "global_topk" => Ok(SelectionMode::Global),
            "combined" => Ok(SelectionMode::Combined),
            other => Err(CliError::Config(format!("unknown selection mode `{other}`"))),
        }
    }
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionMode::All => "all",
            SelectionMode::Spearman => "spearman",
            SelectionMode::Global => "global",
            SelectionMode::Combined => "combined",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub manifest: Option<PathBuf>,
    pub docs_per_level: usize,
    pub corpus_seed: u64,
    pub features: Vec<Family>,
    pub models: Vec<ModelKind>,
    pub selections: Vec<SelectionMode>,
    pub k: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub lm_alpha: f64,
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub n_trees: usize,
    pub max_depth: usize,
    pub features_per_split: FeaturesPerSplit,
    pub bootstrap: bool,
    pub explain_count: usize,
    pub explain_samples: usize,
    pub explain_top_k: usize,
    pub explain_lambda: f64,
    pub kernel_width: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        ExperimentConfig {
            manifest: None,
            docs_per_level: 100,
            corpus_seed: 42,
            features: Family::ALL.to_vec(),
            models: vec![ModelKind::Rf],
            selections: vec![
                SelectionMode::Spearman,
                SelectionMode::Global,
                SelectionMode::Combined,
            ],
            k: 10,
            test_fraction: 0.3,
            seed: 42,
            out: PathBuf::from("out"),
            lm_alpha: 1.0,
            l2_lambda: t.l2_lambda,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            n_trees: t.n_trees,
            max_depth: t.max_depth,
            features_per_split: t.features_per_split,
            bootstrap: t.bootstrap,
            explain_count: 5,
            explain_samples: 5000,
            explain_top_k: 10,
            explain_lambda: 1.0,
            kernel_width: None,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim().to_string();
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Config(format!("line {}: unknown key `{key}`", i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_key_values(&text)
}

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("{key}: cannot parse `{value}`: {e}")))
}

fn list<T, F>(value: &str, f: F) -> CliResult<Vec<T>>
where
    T: PartialEq,
    F: Fn(&str) -> CliResult<T>,
{
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let item = f(part)?;
        if !out.contains(&item) {
            out.push(item);
        }
    }
    Ok(out)
}

fn config_err(e: basa::Error) -> CliError {
    CliError::Config(e.to_string())
}

impl ExperimentConfig {
    /// Applies `values` over the defaults and validates the result.
    pub fn from_map(values: &BTreeMap<String, String>) -> CliResult<Self> {
        let mut c = ExperimentConfig::default();
        for (key, value) in values {
            let v = value.as_str();
            match key.as_str() {
                "manifest" => c.manifest = (!v.is_empty()).then(|| PathBuf::from(v)),
                "docs_per_level" => c.docs_per_level = parse(key, v)?,
                "corpus_seed" => c.corpus_seed = parse(key, v)?,
                "features" => c.features = Family::parse_list(v).map_err(config_err)?,
                "model" => c.models = list(v, |p| p.parse::<ModelKind>().map_err(config_err))?,
                "selection" => c.selections = list(v, str::parse)?,
                "k" => c.k = parse(key, v)?,
                "test_fraction" => c.test_fraction = parse(key, v)?,
                "seed" => c.seed = parse(key, v)?,
                "out" => c.out = PathBuf::from(v),
                "lm_alpha" => c.lm_alpha = parse(key, v)?,
                "l2_lambda" => c.l2_lambda = parse(key, v)?,
                "learning_rate" => c.learning_rate = parse(key, v)?,
                "epochs" => c.epochs = parse(key, v)?,
                "n_trees" => c.n_trees = parse(key, v)?,
                "max_depth" => c.max_depth = parse(key, v)?,
                "features_per_split" => {
                    c.features_per_split = match v.to_ascii_lowercase().as_str() {
                        "sqrt" => FeaturesPerSplit::Sqrt,
                        "all" => FeaturesPerSplit::All,
                        _ => return Err(CliError::Config(format!("features_per_split: `{v}` is not sqrt or all"))),
                    }
                }
                "bootstrap" => c.bootstrap = parse(key, v)?,
                "explain_count" => c.explain_count = parse(key, v)?,
                "explain_samples" => c.explain_samples = parse(key, v)?,
                "explain_top_k" => c.explain_top_k = parse(key, v)?,
                "explain_lambda" => c.explain_lambda = parse(key, v)?,
                "kernel_width" => {
                    c.kernel_width = if v.eq_ignore_ascii_case("auto") {
                        None
                    } else {
                        Some(parse(key, v)?)
                    }
                }
                other => return Err(CliError::Config(format!("unknown key `{other}`"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        let fail = |m: &str| Err(CliError::Config(m.to_string()));
        if self.models.is_empty() {
            return fail("model list is empty");
        }
        if self.selections.is_empty() {
            return fail("selection list is empty");
        }
        if self.k == 0 {
            return fail("k must be at least 1");
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return fail("test_fraction must lie in (0, 1)");
        }
        if !(self.lm_alpha > 0.0 && self.lm_alpha.is_finite()) {
            return fail("lm_alpha must be positive");
        }
        if self.docs_per_level < 2 {
            return fail("docs_per_level must be at least 2");
        }
        if self.explain_samples < 10 {
            return fail("explain_samples must be at least 10");
        }
        if self.explain_top_k == 0 {
            return fail("explain_top_k must be at least 1");
        }
        if !(self.explain_lambda >= 0.0 && self.explain_lambda.is_finite()) {
            return fail("explain_lambda must be nonnegative");
        }
        if self.kernel_width.is_some_and(|w| !(w > 0.0 && w.is_finite())) {
            return fail("kernel_width must be positive");
        }
        if let Some(m) = &self.manifest {
            if !m.is_file() {
                return Err(CliError::Config(format!("manifest {} does not exist", m.display())));
            }
        }
        for kind in &self.models {
            self.train_config(*kind).validate().map_err(config_err)?;
        }
        Ok(())
    }

    /// Training settings for `kind`, seeded from the model stage seed.
    pub fn train_config(&self, kind: ModelKind) -> TrainConfig {
        TrainConfig {
            kind,
            l2_lambda: self.l2_lambda,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            n_trees: self.n_trees,
            max_depth: self.max_depth,
            features_per_split: self.features_per_split,
            bootstrap: self.bootstrap,
            seed: self.model_seed(),
        }
    }

    pub fn split_seed(&self) -> u64 {
        self.seed
    }

    pub fn model_seed(&self) -> u64 {
        self.seed.wrapping_add(1)
    }

    pub fn explain_seed(&self) -> u64 {
        self.seed.wrapping_add(2)
    }

    /// Canonical `key = value` rendering, one line per key.
    pub fn to_key_values(&self) -> String {
        let join = |items: Vec<String>| items.join(",");
        let mut lines = vec![
            format!("manifest = {}", self.manifest.as_ref().map(|p| p.display().to_string()).unwrap_or_default()),
            format!("docs_per_level = {}", self.docs_per_level),
            format!("corpus_seed = {}", self.corpus_seed),
            format!("features = {}", join(self.features.iter().map(|f| f.to_string().to_lowercase()).collect())),
            format!("model = {}", join(self.models.iter().map(|m| m.to_string()).collect())),
            format!("selection = {}", join(self.selections.iter().map(|s| s.to_string()).collect())),
            format!("k = {}", self.k),
            format!("test_fraction = {}", self.test_fraction),
            format!("seed = {}", self.seed),
            format!("out = {}", self.out.display()),
            format!("lm_alpha = {}", self.lm_alpha),
            format!("l2_lambda = {}", self.l2_lambda),
            format!("learning_rate = {}", self.learning_rate),
            format!("epochs = {}", self.epochs),
            format!("n_trees = {}", self.n_trees),
            format!("max_depth = {}", self.max_depth),
            format!(
                "features_per_split = {}",
                match self.features_per_split {
                    FeaturesPerSplit::Sqrt => "sqrt",
                    FeaturesPerSplit::All => "all",
                }
            ),
            format!("bootstrap = {}", self.bootstrap),
            format!("explain_count = {}", self.explain_count),
            format!("explain_samples = {}", self.explain_samples),
            format!("explain_top_k = {}", self.explain_top_k),
            format!("explain_lambda = {}", self.explain_lambda),
            format!(
                "kernel_width = {}",
                self.kernel_width.map_or("auto".to_string(), |w| w.to_string())
            ),
        ];
        lines.push(String::new());
        lines.join("\n")
    }
}
