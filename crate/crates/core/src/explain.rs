//! Local surrogate explanations over quartile-discretized features.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::models::TrainedModel;
use crate::Level;

pub const N_BINS: usize = 4;

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-feature quartile cuts in z-space. A feature whose training column is
/// constant has no cuts and a single bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    pub names: Vec<String>,
    pub cuts: Vec<Option<[f64; 3]>>,
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

pub fn fit_discretizer(names: &[String], z: &Array2<f64>) -> Result<Discretizer> {
    if z.nrows() < 4 {
        return Err(Error::EmptyInput(format!(
            "discretizer needs at least 4 rows, got {}",
            z.nrows()
        )));
    }
    if names.len() != z.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} names for {} columns",
            names.len(),
            z.ncols()
        )));
    }
    let mut d = Discretizer {
        names: names.to_vec(),
        cuts: Vec::with_capacity(names.len()),
        mins: Vec::with_capacity(names.len()),
        maxs: Vec::with_capacity(names.len()),
    };
    for column in z.columns() {
        let mut sorted = column.to_vec();
        if sorted.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("discretizer input has non-finite values".into()));
        }
        sorted.sort_by(f64::total_cmp);
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        d.mins.push(min);
        d.maxs.push(max);
        d.cuts.push((min < max).then(|| {
            [0.25, 0.5, 0.75].map(|p| quantile(&sorted, p))
        }));
    }
    Ok(d)
}

impl Discretizer {
    pub fn index_of(&self, feature: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == feature)
            .ok_or_else(|| Error::MissingFeature(feature.to_string()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    fn bin_at(&self, j: usize, value: f64) -> usize {
        match &self.cuts[j] {
            None => 0,
            Some(c) => c.iter().take_while(|q| value > **q).count(),
        }
    }

    /// Sampling range of bin `b` for feature `j`, or `None` if the training
    /// data leaves it empty. Bin 0 is closed below at the training minimum.
    fn bin_range(&self, j: usize, b: usize) -> Option<(f64, f64)> {
        let Some(c) = &self.cuts[j] else {
            return (b == 0).then_some((self.mins[j], self.maxs[j]));
        };
        let (lo, hi) = match b {
            0 => return Some((self.mins[j], c[0])),
            1 => (c[0], c[1]),
            2 => (c[1], c[2]),
            _ => (c[2], self.maxs[j]),
        };
        (lo < hi).then_some((lo, hi))
    }

    fn sample_in_bin(&self, j: usize, b: usize, rng: &mut impl Rng) -> f64 {
        let (lo, hi) = self.bin_range(j, b).expect("bin chosen from non-empty bins");
        if lo == hi {
            return lo;
        }
        let v = rng.random_range(lo..hi);
        // the half-open draw can land on an excluded lower edge
        if self.bin_at(j, v) == b {
            v
        } else {
            hi
        }
    }

    fn render(&self, j: usize, bin: usize) -> BoundaryCondition {
        let (lower, upper) = match &self.cuts[j] {
            None => (f64::NEG_INFINITY, f64::INFINITY),
            Some(c) => match bin {
                0 => (f64::NEG_INFINITY, c[0]),
                1 => (c[0], c[1]),
                2 => (c[1], c[2]),
                _ => (c[2], f64::INFINITY),
            },
        };
        BoundaryCondition::new(&self.names[j], lower, upper)
    }
}

/// Bin 0: `v <= q25`, 1: `q25 < v <= q50`, 2: `q50 < v <= q75`, 3: `v > q75`.
pub fn assign_bin(d: &Discretizer, feature: &str, value: f64) -> Result<usize> {
    Ok(d.bin_at(d.index_of(feature)?, value))
}

pub fn render_boundary(d: &Discretizer, feature: &str, bin: usize) -> Result<BoundaryCondition> {
    if bin >= N_BINS {
        return Err(Error::Validation(format!("bin {bin} out of range")));
    }
    Ok(d.render(d.index_of(feature)?, bin))
}

fn fmt2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub feature: String,
    /// `None` stands for an unbounded side.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub rendered: String,
}

impl BoundaryCondition {
    pub fn new(feature: &str, lower: f64, upper: f64) -> Self {
        let lower = lower.is_finite().then_some(lower);
        let upper = upper.is_finite().then_some(upper);
        let rendered = match (lower, upper) {
            (None, Some(b)) => format!("x <= {}", fmt2(b)),
            (Some(a), Some(b)) => format!("{} < x <= {}", fmt2(a), fmt2(b)),
            (Some(a), None) => format!("x > {}", fmt2(a)),
            (None, None) => "any x".to_string(),
        };
        BoundaryCondition {
            feature: feature.to_string(),
            lower,
            upper,
            rendered,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower.is_none_or(|a| value > a) && self.upper.is_none_or(|b| value <= b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

/// Solves `(AᵀWA + Λ)β = AᵀWy`, where `A` is `z` with an optional leading
/// column of ones whose coefficient is not penalized.
pub fn weighted_ridge(
    z: &Array2<f64>,
    targets: &[f64],
    sample_weights: &[f64],
    lambda: f64,
    fit_intercept: bool,
) -> Result<RidgeFit> {
    let (n, d) = z.dim();
    if targets.len() != n || sample_weights.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} rows, {} targets, {} weights",
            targets.len(),
            sample_weights.len()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig("ridge lambda must be nonnegative".into()));
    }
    if sample_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::Validation("sample weights must be nonnegative".into()));
    }
    let offset = usize::from(fit_intercept);
    let p = d + offset;
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    let mut row = vec![0.0; p];
    for i in 0..n {
        let w = sample_weights[i];
        if w == 0.0 {
            continue;
        }
        if fit_intercept {
            row[0] = 1.0;
        }
        for (slot, v) in row[offset..].iter_mut().zip(z.row(i)) {
            *slot = *v;
        }
        for a in 0..p {
            let wa = w * row[a];
            if wa == 0.0 {
                continue;
            }
            rhs[a] += wa * targets[i];
            for b in a..p {
                gram[(a, b)] += wa * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    for j in offset..p {
        gram[(j, j)] += lambda;
    }
    let chol = gram.cholesky().ok_or(Error::Singular)?;
    let diag = chol.l_dirty().diagonal();
    let max = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(max > 0.0) || min / max < 1e-7 {
        return Err(Error::Singular);
    }
    let beta = chol.solve(&rhs);
    Ok(RidgeFit {
        intercept: if fit_intercept { beta[0] } else { 0.0 },
        coefficients: beta.iter().skip(offset).copied().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainConfig {
    pub n_samples: usize,
    /// Defaults to `0.75 * sqrt(n_features)` when unset.
    pub kernel_width: Option<f64>,
    pub top_k: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            n_samples: 5000,
            kernel_width: None,
            top_k: 10,
            lambda: 1.0,
            seed: 42,
        }
    }
}

/// The sampled neighborhood and the full surrogate fit behind an explanation.
#[derive(Debug, Clone)]
pub struct LocalSurrogate {
    /// Perturbed z-values; row 0 is the instance itself.
    pub samples: Array2<f64>,
    /// Binary representation: 1 where the sample shares the instance's bin.
    pub binary: Array2<f64>,
    pub targets: Vec<f64>,
    pub weights: Vec<f64>,
    pub instance_bins: Vec<usize>,
    pub kernel_width: f64,
    pub fit: RidgeFit,
}

pub fn fit_local_surrogate(
    model: &TrainedModel,
    z: ArrayView1<'_, f64>,
    d: &Discretizer,
    target: Level,
    cfg: &ExplainConfig,
) -> Result<LocalSurrogate> {
    if cfg.n_samples < 10 {
        return Err(Error::InvalidConfig("n_samples must be at least 10".into()));
    }
    if !model.classes.contains(&target) {
        return Err(Error::Validation(format!("model has no class {target}")));
    }
    if d.names != model.feature_names {
        return Err(Error::DimensionMismatch(
            "discretizer and model use different features".into(),
        ));
    }
    if z.len() != d.len() {
        return Err(Error::DimensionMismatch(format!(
            "instance has {} values for {} features",
            z.len(),
            d.len()
        )));
    }
    let m = d.len();
    let kernel_width = cfg.kernel_width.unwrap_or(0.75 * (m as f64).sqrt());
    if !(kernel_width > 0.0 && kernel_width.is_finite()) {
        return Err(Error::InvalidConfig("kernel_width must be positive".into()));
    }
    let instance_bins: Vec<usize> = (0..m).map(|j| d.bin_at(j, z[j])).collect();
    let open_bins: Vec<Vec<usize>> = (0..m)
        .map(|j| (0..N_BINS).filter(|&b| d.bin_range(j, b).is_some()).collect())
        .collect();

    let n = cfg.n_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Array2::zeros((n, m));
    let mut binary = Array2::<f64>::ones((n, m));
    samples.row_mut(0).assign(&z);
    for i in 1..n {
        for j in 0..m {
            let b = open_bins[j][rng.random_range(0..open_bins[j].len())];
            samples[[i, j]] = d.sample_in_bin(j, b, &mut rng);
            if b != instance_bins[j] {
                binary[[i, j]] = 0.0;
            }
        }
    }
    let targets: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| Ok(model.predict_proba_z(samples.row(i))?[target.index()]))
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = binary
        .rows()
        .into_iter()
        .map(|r| {
            let dist2: f64 = r.iter().map(|v| (1.0 - v).powi(2)).sum();
            (-dist2 / (kernel_width * kernel_width)).exp()
        })
        .collect();
    let fit = weighted_ridge(&binary, &targets, &weights, cfg.lambda, true)?;
    Ok(LocalSurrogate {
        samples,
        binary,
        targets,
        weights,
        instance_bins,
        kernel_width,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationEntry {
    pub condition: BoundaryCondition,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalExplanation {
    pub doc_id: String,
    pub target: Level,
    pub predicted: Level,
    pub proba: [f64; 3],
    pub entries: Vec<ExplanationEntry>,
    pub intercept: f64,
    pub kernel_width: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Explains `model`'s probability for `target` around a standardized instance.
pub fn explain_instance_z(
    model: &TrainedModel,
    doc_id: &str,
    z: ArrayView1<'_, f64>,
    d: &Discretizer,
    target: Level,
    cfg: &ExplainConfig,
) -> Result<LocalExplanation> {
    let surrogate = fit_local_surrogate(model, z, d, target, cfg)?;
    let proba = model.predict_proba_z(z)?;
    // columns identical across the neighborhood carry no local signal
    let varying: Vec<usize> = (0..d.len())
        .filter(|&j| {
            let col = surrogate.binary.column(j);
            col.iter().any(|v| *v != col[0])
        })
        .collect();
    let mut order = varying;
    let coef = &surrogate.fit.coefficients;
    order.sort_by(|&a, &b| coef[b].abs().total_cmp(&coef[a].abs()));
    order.truncate(cfg.top_k);
    let entries = order
        .into_iter()
        .map(|j| ExplanationEntry {
            condition: d.render(j, surrogate.instance_bins[j]),
            weight: coef[j],
        })
        .collect();
    Ok(LocalExplanation {
        doc_id: doc_id.to_string(),
        target,
        predicted: crate::models::argmax_level(&proba),
        proba,
        entries,
        intercept: surrogate.fit.intercept,
        kernel_width: surrogate.kernel_width,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
    })
}

pub fn explain_instance(
    model: &TrainedModel,
    x: &FeatureVector,
    d: &Discretizer,
    target: Level,
    cfg: &ExplainConfig,
) -> Result<LocalExplanation> {
    let z = Array1::from(model.standardize_vector(x)?);
    explain_instance_z(model, &x.doc_id, z.view(), d, target, cfg)
}

impl LocalExplanation {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text bar list: one line per condition, positive weights tagged
    /// green and negative weights red.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "document: {}", self.doc_id);
        let _ = writeln!(
            out,
            "prediction: {}  proba: L1 {:.3} | L2 {:.3} | L3 {:.3}",
            self.predicted, self.proba[0], self.proba[1], self.proba[2]
        );
        let _ = writeln!(out, "explained class: {}", self.target);
        let width = self
            .entries
            .iter()
            .map(|e| e.condition.feature.len() + e.condition.rendered.len() + 2)
            .max()
            .unwrap_or(0);
        let scale = self
            .entries
            .iter()
            .map(|e| e.weight.abs())
            .fold(0.0, f64::max);
        for e in &self.entries {
            let tag = if e.weight >= 0.0 { "green" } else { "red" };
            let bars = if scale > 0.0 {
                (e.weight.abs() / scale * 20.0).round() as usize
            } else {
                0
            };
            let label = format!("{}: {}", e.condition.feature, e.condition.rendered);
            let _ = writeln!(
                out,
                "{label:<width$}  {:>+9.4}  [{tag:<5}] {}",
                e.weight,
                "#".repeat(bars)
            );
        }
        out
    }
}
