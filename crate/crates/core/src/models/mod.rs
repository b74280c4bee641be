//! The three classifiers: multinomial logistic regression, one-vs-rest linear
//! SVM and a CART random forest. All train on standardized matrices and
//! predict a probability triple over grades 1 to 3.

mod forest;
mod linear;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, StandardizationStats};
use crate::{FeatureMatrix, Level};

pub use forest::{DecisionTree, Node};
pub use linear::{logreg_loss_and_gradient, LinearParams};

pub const N_CLASSES: usize = 3;
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logreg,
    Svm,
    Rf,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Logreg => "LogReg",
            ModelKind::Svm => "SVM",
            ModelKind::Rf => "RF",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "logreg" => Ok(ModelKind::Logreg),
            "svm" => Ok(ModelKind::Svm),
            "rf" => Ok(ModelKind::Rf),
            other => Err(Error::InvalidConfig(format!("unknown model kind `{other}`"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Logreg => "logreg",
            ModelKind::Svm => "svm",
            ModelKind::Rf => "rf",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeaturesPerSplit {
    Sqrt,
    All,
}

impl FromStr for FeaturesPerSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sqrt" => Ok(FeaturesPerSplit::Sqrt),
            "all" => Ok(FeaturesPerSplit::All),
            other => Err(Error::InvalidConfig(format!("unknown features_per_split `{other}`"))),
        }
    }
}

/// Hyperparameters for all three model kinds; only the fields relevant to
/// `kind` are validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub n_trees: usize,
    pub max_depth: usize,
    pub features_per_split: FeaturesPerSplit,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            kind: ModelKind::Rf,
            l2_lambda: 1e-3,
            learning_rate: 0.1,
            epochs: 500,
            n_trees: 100,
            max_depth: 12,
            features_per_split: FeaturesPerSplit::Sqrt,
            bootstrap: true,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn for_kind(kind: ModelKind) -> Self {
        TrainConfig {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ModelKind::Logreg | ModelKind::Svm => {
                if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
                    return Err(Error::InvalidConfig("l2_lambda must be nonnegative".into()));
                }
                if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
                    return Err(Error::InvalidConfig("learning_rate must be positive".into()));
                }
                if self.epochs == 0 {
                    return Err(Error::InvalidConfig("epochs must be positive".into()));
                }
            }
            ModelKind::Rf => {
                if self.n_trees == 0 {
                    return Err(Error::InvalidConfig("n_trees must be at least 1".into()));
                }
                if self.max_depth == 0 {
                    return Err(Error::InvalidConfig("max_depth must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModelParams {
    Linear(LinearParams),
    Forest { trees: Vec<DecisionTree> },
}

/// A trained classifier together with the feature subset and standardization
/// it expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub version: u32,
    pub kind: ModelKind,
    pub classes: Vec<Level>,
    pub feature_names: Vec<String>,
    pub standardization: StandardizationStats,
    pub params: ModelParams,
    pub config: TrainConfig,
}

fn check_training_data(x: &Array2<f64>, y: &[Level]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::EmptyInput("training matrix is empty".into()));
    }
    let first = y[0];
    if y.iter().all(|l| *l == first) {
        return Err(Error::Validation(
            "training labels contain a single class".into(),
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("training matrix has non-finite values".into()));
    }
    Ok(())
}

fn identity_stats(names: &[String]) -> StandardizationStats {
    StandardizationStats {
        names: names.to_vec(),
        means: vec![0.0; names.len()],
        stds: vec![1.0; names.len()],
    }
}

fn assemble(x: &FeatureMatrix, cfg: &TrainConfig, params: ModelParams) -> TrainedModel {
    TrainedModel {
        version: FORMAT_VERSION,
        kind: cfg.kind,
        classes: Level::ALL.to_vec(),
        feature_names: x.names.clone(),
        standardization: identity_stats(&x.names),
        params,
        config: cfg.clone(),
    }
}

#[cfg(test)]
pub(crate) fn train_linear_for_test(names: Vec<String>, params: LinearParams) -> TrainedModel {
    TrainedModel {
        version: FORMAT_VERSION,
        kind: ModelKind::Logreg,
        classes: Level::ALL.to_vec(),
        standardization: identity_stats(&names),
        feature_names: names,
        params: ModelParams::Linear(params),
        config: TrainConfig::for_kind(ModelKind::Logreg),
    }
}

/// Multinomial logistic regression with L2 penalty, full-batch gradient
/// descent from zero weights.
pub fn train_logreg(x: &FeatureMatrix, cfg: &TrainConfig) -> Result<TrainedModel> {
    let cfg = TrainConfig { kind: ModelKind::Logreg, ..cfg.clone() };
    cfg.validate()?;
    let params = linear::fit_logreg(&x.values, &x.labels, &cfg)?;
    Ok(assemble(x, &cfg, ModelParams::Linear(params)))
}

/// One-vs-rest linear SVM (hinge loss + L2) trained by seeded stochastic
/// subgradient descent.
pub fn train_svm(x: &FeatureMatrix, cfg: &TrainConfig) -> Result<TrainedModel> {
    let cfg = TrainConfig { kind: ModelKind::Svm, ..cfg.clone() };
    cfg.validate()?;
    let params = linear::fit_svm(&x.values, &x.labels, &cfg)?;
    Ok(assemble(x, &cfg, ModelParams::Linear(params)))
}

/// Random forest of Gini CART trees on bootstrap samples.
pub fn train_rf(x: &FeatureMatrix, cfg: &TrainConfig) -> Result<TrainedModel> {
    let cfg = TrainConfig { kind: ModelKind::Rf, ..cfg.clone() };
    cfg.validate()?;
    let trees = forest::fit_forest(&x.values, &x.labels, &cfg)?;
    Ok(assemble(x, &cfg, ModelParams::Forest { trees }))
}

/// Trains the model kind named in `cfg`.
pub fn train(x: &FeatureMatrix, cfg: &TrainConfig) -> Result<TrainedModel> {
    match cfg.kind {
        ModelKind::Logreg => train_logreg(x, cfg),
        ModelKind::Svm => train_svm(x, cfg),
        ModelKind::Rf => train_rf(x, cfg),
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Index of the largest component; ties resolve to the lowest index.
pub fn argmax_level(proba: &[f64; N_CLASSES]) -> Level {
    Level::ALL[argmax(proba)]
}

impl TrainedModel {
    /// Attaches the standardization fitted on the raw training features.
    pub fn with_standardization(mut self, stats: StandardizationStats) -> Result<Self> {
        if stats.names != self.feature_names {
            return Err(Error::Validation(
                "standardization stats do not match the model features".into(),
            ));
        }
        self.standardization = stats;
        Ok(self)
    }

    /// Class probabilities for an already standardized row.
    pub fn predict_proba_z(&self, z: ArrayView1<'_, f64>) -> Result<[f64; N_CLASSES]> {
        if z.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch(format!(
                "model expects {} features, got {}",
                self.feature_names.len(),
                z.len()
            )));
        }
        Ok(match &self.params {
            ModelParams::Linear(p) => p.proba(z),
            ModelParams::Forest { trees } => forest::vote_fractions(trees, z),
        })
    }

    pub fn predict_label_z(&self, z: ArrayView1<'_, f64>) -> Result<Level> {
        Ok(argmax_level(&self.predict_proba_z(z)?))
    }

    /// Standardized model inputs taken from a raw feature vector.
    pub fn standardize_vector(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        self.feature_names
            .iter()
            .enumerate()
            .map(|(i, name)| Ok(self.standardization.z(i, x.get(name)?)))
            .collect()
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<[f64; N_CLASSES]> {
        let z = self.standardize_vector(x)?;
        self.predict_proba_z(ArrayView1::from(&z))
    }

    pub fn predict_label(&self, x: &FeatureVector) -> Result<Level> {
        Ok(argmax_level(&self.predict_proba(x)?))
    }

    /// Predicted labels for every row of a standardized matrix whose columns
    /// are exactly the model's features.
    pub fn predict_matrix_z(&self, x: &FeatureMatrix) -> Result<Vec<Level>> {
        if x.names != self.feature_names {
            return Err(Error::Validation("matrix columns do not match model features".into()));
        }
        x.values.rows().into_iter().map(|row| self.predict_label_z(row)).collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Ingest {
            path: path.to_path_buf(),
            source,
        })?;
        let model: TrainedModel = serde_json::from_str(&text)?;
        if model.version != FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported model version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn toy() -> FeatureMatrix {
        FeatureMatrix::new(
            (0..6).map(|i| format!("d{i}")).collect(),
            vec![Level::L1, Level::L1, Level::L2, Level::L2, Level::L3, Level::L3],
            vec!["a".into(), "b".into()],
            array![[-2.0, 0.1], [-1.8, -0.1], [0.0, 0.2], [0.1, -0.2], [2.0, 0.0], [1.9, 0.1]],
        )
        .unwrap()
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax_level(&[0.2, 0.5, 0.3]), Level::L2);
        assert_eq!(argmax_level(&[0.4, 0.4, 0.2]), Level::L1);
    }

    #[test]
    fn missing_feature_is_named() {
        let model = train_logreg(&toy(), &TrainConfig::default()).unwrap();
        let mut values = indexmap::IndexMap::new();
        values.insert("a".to_string(), 1.0);
        let v = FeatureVector {
            doc_id: "x".into(),
            values,
            warnings: vec![],
        };
        match model.predict_label(&v) {
            Err(Error::MissingFeature(name)) => assert_eq!(name, "b"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = TrainConfig::for_kind(ModelKind::Rf);
        cfg.n_trees = 0;
        assert!(train_rf(&toy(), &cfg).is_err());
        let mut cfg = TrainConfig::for_kind(ModelKind::Logreg);
        cfg.learning_rate = 0.0;
        assert!(train_logreg(&toy(), &cfg).is_err());
        assert!("knn".parse::<ModelKind>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = TrainConfig {
            n_trees: 3,
            ..TrainConfig::default()
        };
        for model in [train_rf(&toy(), &cfg).unwrap(), train_svm(&toy(), &cfg).unwrap()] {
            let path = dir.path().join("m.json");
            model.save(&path).unwrap();
            assert_eq!(TrainedModel::load(&path).unwrap(), model);
        }
    }
}
