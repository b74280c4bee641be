//! Add-α smoothed n-gram language models (orders 1 to 3) and perplexity.
//!
//! Training pads each sentence with `order - 1` start markers and, for
//! orders above one, a single end marker. The prediction vocabulary is the
//! set of observed tokens plus the unknown token (and the end marker for
//! orders above one). Probabilities are
//! `P(w | ctx) = (count(ctx, w) + α) / (count(ctx) + α·|V|)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Level;

pub const START: &str = "<s>";
pub const END: &str = "</s>";
pub const UNKNOWN: &str = "<unk>";

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "NgramModelFile", try_from = "NgramModelFile")]
pub struct NgramModel {
    order: usize,
    level: Level,
    alpha: f64,
    vocabulary: BTreeSet<String>,
    ngram_counts: BTreeMap<Vec<String>, u64>,
    context_counts: BTreeMap<Vec<String>, u64>,
}

/// Trains an n-gram model of the given order on tokenized sentences.
pub fn train_ngram(
    texts: &[Vec<String>],
    order: usize,
    alpha: f64,
    level: Level,
) -> Result<NgramModel> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidConfig(format!(
            "n-gram order must be 1, 2 or 3, got {order}"
        )));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "smoothing alpha must be positive, got {alpha}"
        )));
    }
    if texts.iter().all(|t| t.is_empty()) {
        return Err(Error::EmptyInput("n-gram training texts are empty".into()));
    }

    let mut vocabulary = BTreeSet::new();
    vocabulary.insert(UNKNOWN.to_string());
    if order > 1 {
        vocabulary.insert(END.to_string());
    }
    let mut ngram_counts = BTreeMap::new();
    let mut context_counts = BTreeMap::new();
    for sentence in texts.iter().filter(|t| !t.is_empty()) {
        vocabulary.extend(sentence.iter().cloned());
        for gram in padded_grams(sentence, order) {
            *context_counts.entry(gram[..order - 1].to_vec()).or_insert(0) += 1;
            *ngram_counts.entry(gram).or_insert(0) += 1;
        }
    }
    Ok(NgramModel {
        order,
        level,
        alpha,
        vocabulary,
        ngram_counts,
        context_counts,
    })
}

fn pad(tokens: &[String], order: usize) -> Vec<String> {
    let mut padded = Vec::with_capacity(tokens.len() + order);
    padded.extend(std::iter::repeat_n(START.to_string(), order - 1));
    padded.extend(tokens.iter().cloned());
    if order > 1 {
        padded.push(END.to_string());
    }
    padded
}

fn padded_grams(tokens: &[String], order: usize) -> Vec<Vec<String>> {
    pad(tokens, order).windows(order).map(<[String]>::to_vec).collect()
}

impl NgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn ngram_count(&self, gram: &[&str]) -> u64 {
        let key: Vec<String> = gram.iter().map(|s| s.to_string()).collect();
        self.ngram_counts.get(&key).copied().unwrap_or(0)
    }

    pub fn context_count(&self, context: &[&str]) -> u64 {
        let key: Vec<String> = context.iter().map(|s| s.to_string()).collect();
        self.context_counts.get(&key).copied().unwrap_or(0)
    }

    /// Observed contexts (empty for unigram models).
    pub fn contexts(&self) -> impl Iterator<Item = &Vec<String>> {
        self.context_counts.keys()
    }

    fn map_token(&self, token: &str) -> String {
        if token == START || self.vocabulary.contains(token) {
            token.to_string()
        } else {
            UNKNOWN.to_string()
        }
    }

    /// Smoothed conditional probability of `token` after `context`. Both are
    /// mapped to the unknown token when out of vocabulary.
    pub fn probability(&self, context: &[String], token: &str) -> f64 {
        let mut gram: Vec<String> = context.iter().map(|t| self.map_token(t)).collect();
        let context_count = self.context_counts.get(&gram).copied().unwrap_or(0);
        gram.push(self.map_token(token));
        let count = self.ngram_counts.get(&gram).copied().unwrap_or(0);
        (count as f64 + self.alpha) / (context_count as f64 + self.alpha * self.vocabulary.len() as f64)
    }

    /// Sum of log-probabilities and number of scored positions for one
    /// token sequence.
    fn log_likelihood(&self, tokens: &[String]) -> (f64, usize) {
        let grams = padded_grams(tokens, self.order);
        let total = grams
            .iter()
            .map(|g| self.probability(&g[..self.order - 1], &g[self.order - 1]).ln())
            .sum();
        (total, grams.len())
    }

    /// Perplexity of a single token sequence.
    pub fn perplexity(&self, tokens: &[String]) -> Result<f64> {
        if tokens.is_empty() {
            return Err(Error::EmptyInput("cannot score an empty token list".into()));
        }
        let (log_sum, n) = self.log_likelihood(tokens);
        Ok((-log_sum / n as f64).exp())
    }

    /// Perplexity over several sentences, each padded independently; the
    /// scored positions of all sentences are pooled.
    pub fn perplexity_sentences(&self, sentences: &[Vec<String>]) -> Result<f64> {
        let (log_sum, n) = sentences
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| self.log_likelihood(s))
            .fold((0.0, 0usize), |(a, n), (b, m)| (a + b, n + m));
        if n == 0 {
            return Err(Error::EmptyInput("cannot score an empty token list".into()));
        }
        Ok((-log_sum / n as f64).exp())
    }
}

#[derive(Serialize, Deserialize)]
struct NgramEntry {
    gram: Vec<String>,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct NgramModelFile {
    version: u32,
    order: usize,
    level: Level,
    alpha: f64,
    vocabulary: Vec<String>,
    ngrams: Vec<NgramEntry>,
}

impl From<NgramModel> for NgramModelFile {
    fn from(model: NgramModel) -> Self {
        NgramModelFile {
            version: FORMAT_VERSION,
            order: model.order,
            level: model.level,
            alpha: model.alpha,
            vocabulary: model.vocabulary.into_iter().collect(),
            ngrams: model
                .ngram_counts
                .into_iter()
                .map(|(gram, count)| NgramEntry { gram, count })
                .collect(),
        }
    }
}

impl TryFrom<NgramModelFile> for NgramModel {
    type Error = Error;

    fn try_from(file: NgramModelFile) -> Result<Self> {
        if file.version != FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported n-gram model version {}",
                file.version
            )));
        }
        if !(1..=3).contains(&file.order) || !(file.alpha > 0.0) {
            return Err(Error::Validation("corrupt n-gram model header".into()));
        }
        let vocabulary: BTreeSet<String> = file.vocabulary.into_iter().collect();
        if !vocabulary.contains(UNKNOWN) {
            return Err(Error::Validation("n-gram vocabulary lacks the unknown token".into()));
        }
        let mut ngram_counts = BTreeMap::new();
        let mut context_counts = BTreeMap::new();
        for NgramEntry { gram, count } in file.ngrams {
            if gram.len() != file.order {
                return Err(Error::Validation("n-gram of wrong length in model file".into()));
            }
            *context_counts.entry(gram[..file.order - 1].to_vec()).or_insert(0) += count;
            ngram_counts.insert(gram, count);
        }
        Ok(NgramModel {
            order: file.order,
            level: file.level,
            alpha: file.alpha,
            vocabulary,
            ngram_counts,
            context_counts,
        })
    }
}

/// The nine per-level, per-order models used for perplexity features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelLanguageModels {
    pub models: Vec<NgramModel>,
}

impl LevelLanguageModels {
    /// Trains orders 1 to 3 for each level from that level's sentences.
    pub fn train(sentences_by_level: &BTreeMap<Level, Vec<Vec<String>>>, alpha: f64) -> Result<Self> {
        let mut models = Vec::with_capacity(9);
        for level in Level::ALL {
            let texts = sentences_by_level.get(&level).ok_or_else(|| {
                Error::EmptyInput(format!("no training sentences for {level} language models"))
            })?;
            for order in 1..=3 {
                models.push(train_ngram(texts, order, alpha, level)?);
            }
        }
        Ok(LevelLanguageModels { models })
    }

    pub fn get(&self, level: Level, order: usize) -> Option<&NgramModel> {
        self.models
            .iter()
            .find(|m| m.level == level && m.order == order)
    }
}
