//! Global interpretation: correlation rankings, learned weights, impurity
//! importances, ranking set operations and the two-sample t-test.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::beta::checked_beta_reg;

use crate::error::{Error, Result};
use crate::features::FeatureRegistry;
use crate::matrix::format_float;
use crate::models::{ModelParams, TrainedModel};
use crate::{FeatureMatrix, Level};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Positive,
    Negative,
    Unsigned,
}

impl Direction {
    fn of(value: f64) -> Self {
        if value < 0.0 {
            Direction::Negative
        } else {
            Direction::Positive
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Positive => "positive",
            Direction::Negative => "negative",
            Direction::Unsigned => "unsigned",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingSource {
    Spearman,
    LinearWeights,
    RfImportance,
    Combined,
}

impl fmt::Display for RankingSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankingSource::Spearman => "spearman",
            RankingSource::LinearWeights => "linear_weights",
            RankingSource::RfImportance => "rf_importance",
            RankingSource::Combined => "combined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: String,
    pub score: f64,
    pub direction: Direction,
}

/// Features ordered by descending `|score|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub entries: Vec<RankedFeature>,
    pub source: RankingSource,
    pub class_context: Option<Level>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FeatureRanking {
    /// Sorts by `|score|` descending, keeping input order among ties, and
    /// truncates to `k`.
    fn build(
        mut entries: Vec<RankedFeature>,
        k: usize,
        source: RankingSource,
        class_context: Option<Level>,
        mut warnings: Vec<String>,
    ) -> Self {
        entries.sort_by(|a, b| b.score.abs().total_cmp(&a.score.abs()));
        if k > entries.len() {
            warnings.push(format!(
                "requested top {k} but only {} features are rankable",
                entries.len()
            ));
        }
        entries.truncate(k);
        for w in &warnings {
            log::warn!("{source} ranking: {w}");
        }
        FeatureRanking {
            entries,
            source,
            class_context,
            warnings,
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.feature.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top(&self, k: usize) -> &[RankedFeature] {
        &self.entries[..k.min(self.entries.len())]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
}

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "spearman inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::Undefined("spearman needs at least 3 pairs".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Validation("spearman input has non-finite values".into()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::Undefined("spearman input has zero variance".into()))
}

/// Top-`k` features by `|rho|` against the ordinal grade labels.
pub fn rank_by_spearman(x: &FeatureMatrix, k: usize) -> Result<FeatureRanking> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let labels = x.label_ordinals();
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for (j, name) in x.names.iter().enumerate() {
        let column = x.column(j).to_vec();
        match spearman_rho(&column, &labels) {
            Ok(rho) => entries.push(RankedFeature {
                feature: name.clone(),
                score: rho,
                direction: Direction::of(rho),
            }),
            Err(Error::Undefined(_)) => warnings.push(format!("skipped constant feature {name}")),
            Err(e) => return Err(e),
        }
    }
    Ok(FeatureRanking::build(entries, k, RankingSource::Spearman, None, warnings))
}

/// One ranking per class by `|weight|`, sign preserved; zero weights are
/// dropped.
pub fn linear_global_weights(model: &TrainedModel, k: usize) -> Result<Vec<FeatureRanking>> {
    let ModelParams::Linear(params) = &model.params else {
        return Err(Error::Validation(
            "global weights require a linear model".into(),
        ));
    };
    Ok(model
        .classes
        .iter()
        .zip(&params.weights)
        .map(|(class, weights)| {
            let entries: Vec<RankedFeature> = model
                .feature_names
                .iter()
                .zip(weights)
                .filter(|(_, w)| **w != 0.0)
                .map(|(name, w)| RankedFeature {
                    feature: name.clone(),
                    score: *w,
                    direction: Direction::of(*w),
                })
                .collect();
            let mut warnings = Vec::new();
            if entries.is_empty() {
                warnings.push(format!("all weights for {class} are zero"));
            }
            FeatureRanking::build(entries, k, RankingSource::LinearWeights, Some(*class), warnings)
        })
        .collect())
}

/// Normalized mean decrease in impurity for every model feature, in model
/// feature order. All zeros if no tree ever split.
pub fn mdi_importances(model: &TrainedModel) -> Result<Vec<f64>> {
    let ModelParams::Forest { trees } = &model.params else {
        return Err(Error::Validation(
            "impurity importance requires a random forest".into(),
        ));
    };
    let d = model.feature_names.len();
    let mut total = vec![0.0; d];
    for tree in trees {
        for (t, v) in total.iter_mut().zip(tree.impurity_decrease(d)) {
            *t += v;
        }
    }
    let n_trees = trees.len().max(1) as f64;
    for t in &mut total {
        *t = (*t / n_trees).max(0.0);
    }
    let sum: f64 = total.iter().sum();
    if sum > 0.0 {
        for t in &mut total {
            *t /= sum;
        }
    }
    Ok(total)
}

/// Impurity importances, with direction taken from each feature's Spearman
/// sign on `data` when given.
pub fn rf_global_importance(
    model: &TrainedModel,
    data: Option<&FeatureMatrix>,
    k: usize,
) -> Result<FeatureRanking> {
    let importances = mdi_importances(model)?;
    let mut warnings = Vec::new();
    if importances.iter().all(|v| *v == 0.0) {
        warnings.push("no tree contains a split".to_string());
    }
    let labels = data.map(|m| m.label_ordinals());
    let mut entries = Vec::with_capacity(importances.len());
    for (name, score) in model.feature_names.iter().zip(importances) {
        let direction = match (data, &labels) {
            (Some(m), Some(labels)) => {
                let column = m.column(m.column_index(name)?).to_vec();
                spearman_rho(&column, labels)
                    .map(Direction::of)
                    .unwrap_or(Direction::Unsigned)
            }
            _ => Direction::Unsigned,
        };
        entries.push(RankedFeature {
            feature: name.clone(),
            score,
            direction,
        });
    }
    Ok(FeatureRanking::build(entries, k, RankingSource::RfImportance, None, warnings))
}

/// Names present in the top `k` of every ranking, in the first ranking's order.
pub fn cross_reference_top(rankings: &[FeatureRanking], k: usize) -> Result<Vec<String>> {
    if rankings.len() < 2 {
        return Err(Error::Validation(
            "cross-referencing needs at least two rankings".into(),
        ));
    }
    if rankings.iter().any(|r| r.is_empty()) {
        return Err(Error::EmptyInput("cannot cross-reference an empty ranking".into()));
    }
    let sets: Vec<BTreeSet<&str>> = rankings[1..]
        .iter()
        .map(|r| r.top(k).iter().map(|e| e.feature.as_str()).collect())
        .collect();
    Ok(rankings[0]
        .top(k)
        .iter()
        .filter(|e| sets.iter().all(|s| s.contains(e.feature.as_str())))
        .map(|e| e.feature.clone())
        .collect())
}

/// Order-preserving union: all of `a`, then names of `b` not yet seen.
pub fn combine_rankings(a: &FeatureRanking, b: &FeatureRanking) -> Vec<String> {
    let mut seen = BTreeSet::new();
    a.entries
        .iter()
        .chain(&b.entries)
        .filter(|e| seen.insert(e.feature.as_str()))
        .map(|e| e.feature.clone())
        .collect()
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's unequal-variance t-test, two-tailed.
pub fn two_sample_ttest(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Undefined("t-test needs at least 2 values per sample".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Validation("t-test input has non-finite values".into()));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        return Err(Error::Undefined("both samples have zero variance".into()));
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let p = checked_beta_reg(df / 2.0, 0.5, df / (df + t * t))
        .map_err(|e| Error::Undefined(format!("t distribution tail: {e}")))?;
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: p.clamp(0.0, 1.0),
    })
}

/// Writes `rank,feature,family,score,direction,source,class` rows.
pub fn write_rankings_csv<W: Write>(
    writer: W,
    rankings: &[FeatureRanking],
    registry: &FeatureRegistry,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["rank", "feature", "family", "score", "direction", "source", "class"])?;
    for ranking in rankings {
        let class = ranking.class_context.map(|c| c.to_string()).unwrap_or_default();
        for (i, e) in ranking.entries.iter().enumerate() {
            let family = registry
                .family_of(&e.feature)
                .map(|f| f.to_string())
                .unwrap_or_default();
            w.write_record([
                (i + 1).to_string(),
                e.feature.clone(),
                family,
                format_float(e.score),
                e.direction.to_string(),
                ranking.source.to_string(),
                class.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
