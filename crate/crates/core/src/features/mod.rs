//! Linguistic predictors for one document, grouped into the TRAD, LEX, LM,
//! SYLL and MORPH families, plus matrix assembly and standardization.

pub mod morph;
mod registry;
mod standardize;

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{is_word_token, syllabify, Document};
use crate::error::{Error, Result};
use crate::lexicon::{LexiconTagger, Pos, PosTagger};
use crate::lm::LevelLanguageModels;
use crate::{FeatureMatrix, Level};

pub use morph::{AffixRule, AffixTable};
pub use registry::{
    Family, FeatureEntry, FeatureRegistry, LEX_FEATURES, LM_FEATURES, MORPH_FEATURES,
    SYLLABLE_PATTERNS, SYLL_FEATURES, TRAD_FEATURES,
};
pub use standardize::{standardize, StandardizationStats};

/// Values computed by one family extractor, plus non-fatal warnings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyValues {
    pub values: IndexMap<String, f64>,
    pub warnings: Vec<String>,
}

impl FamilyValues {
    fn push(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

/// Named feature values of one document, in registry order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub doc_id: String,
    pub values: IndexMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Result<f64> {
        self.values
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingFeature(name.to_string()))
    }
}

const PHRASE_DELIMITERS: &[char] = &[
    '.', ',', ';', ':', '!', '?', '(', ')', '[', ']', '{', '}', '"', '“', '”', '…', '—', '–',
];

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub fn extract_trad(doc: &Document) -> FamilyValues {
    let word_count = doc.tokens.len() as f64;
    let sentence_count = doc.sentences.len() as f64;
    let phrase_count = doc
        .text
        .split(PHRASE_DELIMITERS)
        .filter(|chunk| chunk.chars().any(char::is_alphanumeric))
        .count() as f64;

    let syllable_counts: Vec<usize> = doc
        .words()
        .filter_map(|w| syllabify(w).ok().map(|s| s.len()))
        .collect();
    let polysyll = syllable_counts.iter().filter(|&&n| n > 5).count() as f64;
    let total_syllables: usize = syllable_counts.iter().sum();
    let chars: usize = doc
        .tokens
        .iter()
        .map(|t| t.chars().filter(|c| c.is_alphanumeric()).count())
        .sum();

    let mut out = FamilyValues::default();
    out.push("word_count", word_count);
    out.push("sentence_count", sentence_count);
    out.push("phrase_count", phrase_count);
    out.push("polysyll_count", polysyll);
    out.push("avg_word_length", ratio(chars as f64, word_count));
    out.push("avg_sentence_length", ratio(word_count, sentence_count));
    out.push(
        "avg_syllables_per_word",
        ratio(total_syllables as f64, syllable_counts.len() as f64),
    );
    out
}

const FOREIGN_LETTERS: [char; 7] = ['c', 'f', 'j', 'q', 'v', 'x', 'z'];

pub fn extract_lex(doc: &Document, tagger: &dyn PosTagger) -> FamilyValues {
    let tokens = doc.tokens.len() as f64;
    let types = doc.tokens.iter().collect::<BTreeSet<_>>().len() as f64;
    let mut out = FamilyValues::default();
    out.push("ttr", types / tokens);
    out.push("root_ttr", types / tokens.sqrt());
    out.push("corr_ttr", types / (2.0 * tokens).sqrt());
    if doc.tokens.len() > 1 {
        out.push("bilog_ttr", types.ln() / tokens.ln());
    } else {
        out.push("bilog_ttr", 0.0);
        out.warnings.push(format!(
            "{}: bilog_ttr undefined for a single-token document, set to 0",
            doc.id
        ));
    }

    let tags: Vec<Pos> = doc.tokens.iter().map(|t| tagger.tag(t)).collect();
    let count = |pred: &dyn Fn(Pos) -> bool| tags.iter().filter(|p| pred(**p)).count() as f64;
    out.push("noun_token_ratio", count(&|p| p == Pos::Noun) / tokens);
    out.push("verb_token_ratio", count(&|p| p == Pos::Verb) / tokens);
    out.push("lexical_density", count(&|p| p.is_content()) / tokens);

    let foreign = doc
        .tokens
        .iter()
        .filter(|t| is_word_token(t))
        .filter(|t| t.contains(FOREIGN_LETTERS) || !tagger.is_known(t))
        .count() as f64;
    let compound = doc.tokens.iter().filter(|t| tagger.is_compound(t)).count() as f64;
    out.push("foreign_word_density", foreign / tokens);
    out.push("compound_word_density", compound / tokens);
    out
}

pub fn extract_syll(doc: &Document) -> Result<FamilyValues> {
    let mut counts = [0usize; SYLLABLE_PATTERNS.len()];
    let mut other = 0usize;
    for word in doc.words() {
        let Ok(syllables) = syllabify(word) else {
            continue;
        };
        for s in syllables {
            match SYLLABLE_PATTERNS.iter().position(|p| *p == s.pattern) {
                Some(i) => counts[i] += 1,
                None => other += 1,
            }
        }
    }
    let total = counts.iter().sum::<usize>() + other;
    if total == 0 {
        return Err(Error::Validation(format!(
            "document `{}` has no syllabifiable words",
            doc.id
        )));
    }
    let mut out = FamilyValues::default();
    for (name, count) in SYLL_FEATURES.iter().zip(counts.iter().chain(std::iter::once(&other))) {
        out.push(name, *count as f64 / total as f64);
    }
    Ok(out)
}

pub fn extract_lm(doc: &Document, models: &LevelLanguageModels) -> Result<FamilyValues> {
    let mut out = FamilyValues::default();
    let orders = ["unigram", "bigram", "trigram"];
    for level in Level::ALL {
        for (i, order_name) in orders.iter().enumerate() {
            let model = models.get(level, i + 1).ok_or_else(|| {
                Error::MissingFeature(format!("{level} {order_name} language model"))
            })?;
            let pp = model.perplexity_sentences(&doc.sentences)?;
            out.push(&format!("{level}_{order_name}"), pp);
        }
    }
    Ok(out)
}

/// Matches per category divided by word count.
pub fn extract_morph(doc: &Document, table: &AffixTable) -> FamilyValues {
    let counts = table.count(doc.tokens.iter().map(String::as_str));
    let words = doc.tokens.len() as f64;
    let mut out = FamilyValues::default();
    for (cat, count) in table.categories.iter().zip(counts) {
        out.push(cat, count as f64 / words);
    }
    out
}

/// Read-only resources needed to extract a registry's features.
pub struct Resources {
    pub registry: FeatureRegistry,
    pub tagger: Box<dyn PosTagger>,
    pub language_models: Option<LevelLanguageModels>,
    pub affixes: AffixTable,
}

impl Resources {
    /// Bundled tagger and affix table with the given registry and models.
    pub fn new(registry: FeatureRegistry, language_models: Option<LevelLanguageModels>) -> Self {
        Resources {
            registry,
            tagger: Box::new(LexiconTagger::bundled()),
            language_models,
            affixes: AffixTable::default(),
        }
    }
}

/// Extracts every feature of `resources.registry` from `doc`.
pub fn extract_all(doc: &Document, resources: &Resources) -> Result<FeatureVector> {
    let registry = &resources.registry;
    let mut pooled = FamilyValues::default();
    for family in registry.families() {
        let part = match family {
            Family::Trad => extract_trad(doc),
            Family::Lex => extract_lex(doc, resources.tagger.as_ref()),
            Family::Syll => extract_syll(doc)?,
            Family::Morph => extract_morph(doc, &resources.affixes),
            Family::Lm => {
                let models = resources.language_models.as_ref().ok_or_else(|| {
                    Error::MissingFeature("language models required for LM features".into())
                })?;
                extract_lm(doc, models)?
            }
        };
        pooled.values.extend(part.values);
        pooled.warnings.extend(part.warnings);
    }

    let mut values = IndexMap::with_capacity(registry.len());
    for entry in registry.entries() {
        let v = pooled
            .get(&entry.name)
            .ok_or_else(|| Error::MissingFeature(entry.name.clone()))?;
        if !v.is_finite() {
            return Err(Error::Validation(format!(
                "feature `{}` of `{}` is not finite",
                entry.name, doc.id
            )));
        }
        values.insert(entry.name.clone(), v);
    }
    Ok(FeatureVector {
        doc_id: doc.id.clone(),
        values,
        warnings: pooled.warnings,
    })
}

/// Extracts all documents in parallel and stacks them into a matrix whose
/// columns follow the registry. Row order follows `docs`.
pub fn extract_matrix(docs: &[Document], resources: &Resources) -> Result<(FeatureMatrix, Vec<String>)> {
    let vectors = docs
        .par_iter()
        .map(|d| extract_all(d, resources))
        .collect::<Result<Vec<_>>>()?;
    let names = resources.registry.names();
    let mut values = Array2::zeros((vectors.len(), names.len()));
    let mut warnings = Vec::new();
    for (i, v) in vectors.into_iter().enumerate() {
        for (j, value) in v.values.values().enumerate() {
            values[[i, j]] = *value;
        }
        warnings.extend(v.warnings);
    }
    let matrix = FeatureMatrix::new(
        docs.iter().map(|d| d.id.clone()).collect(),
        docs.iter().map(|d| d.label).collect(),
        names,
        values,
    )?;
    Ok((matrix, warnings))
}

/// Groups the sentences of `docs` by grade level, for language model
/// training.
pub fn sentences_by_level(docs: &[Document]) -> BTreeMap<Level, Vec<Vec<String>>> {
    let mut grouped: BTreeMap<Level, Vec<Vec<String>>> = BTreeMap::new();
    for doc in docs {
        grouped
            .entry(doc.label)
            .or_default()
            .extend(doc.sentences.iter().cloned());
    }
    grouped
}
