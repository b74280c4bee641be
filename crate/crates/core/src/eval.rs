//! Train/test splitting and weighted classification metrics.

use std::fmt::Write as _;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};
use crate::Level;

/// Test indices drawn per level by a seeded shuffle; each level contributes
/// `round(n * fraction)` documents, clamped so both sides keep one. Both index
/// lists are sorted.
pub fn stratified_split_indices(
    labels: &[Level],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig("test_fraction must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for level in Level::ALL {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == level).collect();
        if idx.len() < 2 {
            return Err(Error::Validation(format!(
                "level {level} has {} documents; at least 2 are needed to split",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        let n_test = ((idx.len() as f64 * test_fraction).round() as usize).clamp(1, idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn stratified_split(
    corpus: &LabeledCorpus,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    let (train, test) = stratified_split_indices(&corpus.labels(), test_fraction, seed)?;
    Ok((corpus.select(&train), corpus.select(&test)))
}

/// Rows are gold levels, columns predicted levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 3]; 3],
}

impl ConfusionMatrix {
    pub fn from_pairs(golds: &[Level], preds: &[Level]) -> Result<Self> {
        if golds.len() != preds.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} golds but {} predictions",
                golds.len(),
                preds.len()
            )));
        }
        let mut m = ConfusionMatrix::default();
        for (g, p) in golds.iter().zip(preds) {
            m.counts[g.index()][p.index()] += 1;
        }
        Ok(m)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..3).map(|k| self.counts[k][k]).sum()
    }

    pub fn support(&self, k: usize) -> usize {
        self.counts[k].iter().sum()
    }

    pub fn predicted(&self, k: usize) -> usize {
        self.counts.iter().map(|row| row[k]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub level: Level,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Support-weighted precision, recall and F1. Undefined per-class ratios count
/// as 0 and are reported as warnings.
pub fn compute_metrics(golds: &[Level], preds: &[Level]) -> Result<MetricsReport> {
    if golds.is_empty() {
        return Err(Error::EmptyInput("no predictions to score".into()));
    }
    let cm = ConfusionMatrix::from_pairs(golds, preds)?;
    let n = cm.total();
    let mut warnings = Vec::new();
    let mut per_class = Vec::with_capacity(3);
    let (mut wp, mut wf) = (0.0, 0.0);
    for level in Level::ALL {
        let k = level.index();
        let support = cm.support(k);
        let tp = cm.counts[k][k];
        let precision = ratio(tp, cm.predicted(k)).unwrap_or_else(|| {
            if support > 0 {
                warnings.push(format!("precision for {level} is undefined (never predicted)"));
            }
            0.0
        });
        let recall = ratio(tp, support).unwrap_or(0.0);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let share = support as f64 / n as f64;
        wp += share * precision;
        wf += share * f1;
        per_class.push(ClassMetrics {
            level,
            precision,
            recall,
            f1,
            support,
        });
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let accuracy = cm.trace() as f64 / n as f64;
    Ok(MetricsReport {
        accuracy,
        weighted_precision: wp,
        // sum over classes of (support/n) * (tp/support) collapses to trace/n
        weighted_recall: accuracy,
        weighted_f1: wf,
        per_class,
        confusion: cm,
        warnings,
    })
}

/// One labelled row of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub model: String,
    pub report: MetricsReport,
}

pub fn write_metrics_csv<W: Write>(writer: W, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["model", "accuracy", "precision", "recall", "f1"])?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.model.clone(),
            format!("{:.4}", r.accuracy),
            format!("{:.4}", r.weighted_precision),
            format!("{:.4}", r.weighted_recall),
            format!("{:.4}", r.weighted_f1),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn metrics_markdown(rows: &[MetricsRow]) -> String {
    let mut out = String::from("| Model | Acc | Prec | Rec | F1 |\n|---|---|---|---|---|\n");
    for row in rows {
        let r = &row.report;
        let _ = writeln!(
            out,
            "| {} | {:.3} | {:.3} | {:.3} | {:.3} |",
            row.model, r.accuracy, r.weighted_precision, r.weighted_recall, r.weighted_f1
        );
    }
    out
}
